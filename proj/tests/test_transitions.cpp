#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtd/quadrature.hpp"
#include "mtd/transitions.hpp"
#include "support/families.hpp"
#include "support/stats.hpp"

using namespace mtd;

TEST_CASE("Gaussian component: rho = 0 decouples from the lag") {
    const TransitionFamily f = GaussianT(10.0, 100.0, 0.0);
    const Dist marg = Normal(10.0, 10.0);
    for (double xlag : {-20.0, 0.0, 35.0}) {
        for (double x : {-5.0, 10.0, 25.0}) {
            CHECK(trans_pdf(f, x, xlag) == doctest::Approx(pdf(marg, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Poisson component at x_lag = 0 is pure innovation") {
    const TransitionFamily f = PoissonT(2.0, 3.0);
    const Dist innov = Poisson(2.0);
    for (double x : {0.0, 1.0, 4.0, 9.0}) {
        CHECK(trans_pdf(f, x, 0.0) == doctest::Approx(pdf(innov, x)).epsilon(1e-12));
    }
}

TEST_CASE("special-case Lomax conditional is Lomax(phi + lag, alpha)") {
    const TransitionFamily f = LomaxT::special_case(10.0, 3.0);
    const Dist ref = Lomax(15.0, 3.0);
    for (double x : {0.0, 2.0, 11.0, 60.0}) {
        CHECK(trans_pdf(f, x, 5.0) == doctest::Approx(pdf(ref, x)).epsilon(1e-12));
    }
    CHECK(trans_cdf(f, 7.5, 5.0) == doctest::Approx(cdf(ref, 7.5)).epsilon(1e-12));
}

TEST_CASE("state-space violations are domain errors") {
    const TransitionFamily f = PoissonT(2.0, 3.0);
    CHECK_THROWS_AS(trans_pdf(f, -1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(trans_pdf(f, 1.5, 0.0), std::domain_error);
    const TransitionFamily g = LomaxT::special_case(1.0, 2.0);
    CHECK_THROWS_AS(trans_pdf(g, 1.0, -2.0), std::domain_error);
    const TransitionFamily b = BinomialT(5, 0.3, 0.2);
    CHECK_THROWS_AS(trans_pdf(b, 6.0, 2.0), std::domain_error);
}

TEST_CASE("conditional pmfs/pdfs are normalized in x_t") {
    Rng rng(811);
    for (const auto& tag : testsup::all_family_tags()) {
        const TransitionFamily f = testsup::random_family(tag, rng);
        const double v = marginal_quantile(f, 0.6);
        if (is_discrete_family(f)) {
            double total = 0.0;
            long k = 0;
            while (total < 1.0 - 1e-12 && k < 100000) {
                total += trans_pdf(f, static_cast<double>(k), v);
                ++k;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        } else {
            // knots from the conditional's own quantiles via cdf bisection
            const bool real_line = tag == "gaussian" || tag == "student_t";
            std::vector<double> knots;
            if (!real_line) knots.push_back(0.0);
            for (double p : testsup::quantile_ladder_probs()) {
                knots.push_back(testsup::quantile_by_bisection(
                    [&](double x) { return trans_cdf(f, x, v); }, p,
                    real_line ? -1.0 : 0.0, 1.0));
            }
            const double mass = testsup::segmented_integral(
                [&](double x) { return trans_pdf(f, x, v); }, knots);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("trans_sample: Poisson thinning draw matches exact pmf") {
    const TransitionFamily f = PoissonT(2.0, 3.0);
    Rng rng(303);
    const std::size_t n = 100000;
    // x_lag = 0: distribution must be exactly Poisson(2)
    const Dist innov = Poisson(2.0);
    const long K = static_cast<long>(quantile(innov, 1.0 - 1e-10));
    std::vector<long> counts(K + 1, 0);
    std::vector<double> probs(K + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const long k = std::min<long>(static_cast<long>(trans_sample(f, 0.0, rng)), K);
        ++counts[k];
    }
    for (long k = 0; k <= K; ++k) probs[k] = pdf(innov, static_cast<double>(k));
    CHECK(testsup::chi2_gof_passes(counts, probs, n));

    // and against the convolution pmf for a nonzero lag
    const double v = 4.0;
    const long K2 = 25;
    std::vector<long> c2(K2 + 1, 0);
    std::vector<double> p2(K2 + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const long k = std::min<long>(static_cast<long>(trans_sample(f, v, rng)), K2);
        ++c2[k];
    }
    for (long k = 0; k <= K2; ++k) p2[k] = trans_pdf(f, static_cast<double>(k), v);
    p2[K2] += 1.0 - trans_cdf(f, static_cast<double>(K2), v) + p2[K2] -
              p2[K2];  // fold tail into last cell
    CHECK(testsup::chi2_gof_passes(c2, p2, n));
}

TEST_CASE("Bernoulli component: four-cell enumeration oracle") {
    const BernoulliT b(0.3, 0.2);
    // cells: p(1,1)=p1, p(1,0)=p(0,1)=p2, p(0,0)=1-p1-2p2
    const double p11 = 0.3, p01 = 0.2;
    const double oracle = p11 / (p11 + p01);
    CHECK(b.success_prob(true) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(oracle == doctest::Approx(0.6));

    const TransitionFamily f = b;
    Rng rng(99);
    std::size_t ones = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) ones += trans_sample(f, 1.0, rng) == 1.0;
    const double se = std::sqrt(0.6 * 0.4 / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(ones) / n - 0.6) < 4.0 * se);
}

TEST_CASE("Gaussian component with rho near 1 concentrates at the lag") {
    const double mu = 5.0;
    const TransitionFamily f = GaussianT(mu, 4.0, 1.0 - 1e-9);
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        CHECK(std::abs(trans_sample(f, mu, rng) - mu) < 1e-3);
    }
}

TEST_CASE("invariant marginals: closed forms") {
    const TransitionFamily g = GaussianT(3.0, 25.0, 0.8);
    CHECK(marginal_pdf(g, 1.0) ==
          doctest::Approx(pdf(Normal(3.0, 5.0), 1.0)).epsilon(1e-13));

    const TransitionFamily p = PoissonT(2.0, 3.0);
    for (double k : {0.0, 3.0, 7.0})
        CHECK(marginal_pdf(p, k) == doctest::Approx(pdf(Poisson(5.0), k)).epsilon(1e-13));

    const TransitionFamily l = LomaxT::special_case(10.0, 3.0);
    CHECK(marginal_pdf(l, 0.0) == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("numeric marginals are normalized and consistent with their cdf") {
    const TransitionFamily lg = LomaxT(2.0, 1.0, 0.5, 3.0);
    const TransitionFamily gm = GammaT(2.0, 1.0, 0.5);
    for (const auto& f : {lg, gm}) {
        const double mass = quad::integrate_halfline(
            [&](double x) { return marginal_pdf(f, x); }, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
        const double q = marginal_quantile(f, 0.7);
        CHECK(marginal_cdf(f, q) == doctest::Approx(0.7).epsilon(1e-7));
    }
}

TEST_CASE("conditional means: closed-form checks") {
    // linear form of the Gaussian component: (1 - rho) mu + rho y
    CHECK(cond_mean(GaussianT(10.0, 100.0, 0.7), 20.0) ==
          doctest::Approx(17.0).epsilon(1e-14));
    CHECK(cond_mean(PoissonT(2.0, 3.0), 5.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(cond_mean(LomaxT::special_case(10.0, 3.0), 5.0) ==
          doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("cond_mean agrees with the numerical first moment of trans_pdf") {
    Rng rng(4242);
    for (const auto& tag : testsup::all_family_tags()) {
        const TransitionFamily f = testsup::random_family(tag, rng);
        if (family_tag(f) == "lomax" && std::get<LomaxT>(f).alpha <= 2.0) continue;
        const double v = std::floor(marginal_quantile(f, 0.7));
        const double want = cond_mean(f, v);
        if (is_discrete_family(f)) {
            double acc = 0.0, total = 0.0;
            for (long k = 0; total < 1.0 - 1e-13 && k < 200000; ++k) {
                const double pk = trans_pdf(f, static_cast<double>(k), v);
                acc += k * pk;
                total += pk;
            }
            CHECK(acc == doctest::Approx(want).epsilon(1e-8));
        } else {
            const bool real_line = tag == "gaussian" || tag == "student_t";
            std::vector<double> knots;
            if (!real_line) knots.push_back(0.0);
            for (double p : testsup::quantile_ladder_probs()) {
                knots.push_back(testsup::quantile_by_bisection(
                    [&](double x) { return trans_cdf(f, x, v); }, p,
                    real_line ? -1.0 : 0.0, 1.0));
            }
            const double acc = testsup::segmented_integral(
                [&](double x) { return x * trans_pdf(f, x, v); }, knots);
            CHECK(std::abs(acc - want) < 1e-6 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("linear coefficients reproduce cond_mean exactly") {
    CHECK(linear_coeffs(GaussianT(7.0, 4.0, 0.3)).has_value());
    const auto lc = *linear_coeffs(GaussianT(7.0, 4.0, 0.3));
    CHECK(lc.a == doctest::Approx(0.7 * 7.0).epsilon(1e-15));
    CHECK(lc.b == doctest::Approx(0.3).epsilon(1e-15));

    const auto pc = *linear_coeffs(PoissonT(2.0, 3.0));
    CHECK(pc.a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pc.b == doctest::Approx(0.6).epsilon(1e-15));

    Rng rng(606);
    for (const auto& tag : testsup::all_family_tags()) {
        const TransitionFamily f = testsup::random_family(tag, rng);
        const auto coeffs = linear_coeffs(f);
        if (!coeffs) continue;
        for (double y : {0.0, 1.0, 2.0, 5.0, 8.0}) {
            if (!in_support(f, y)) continue;
            CHECK(std::abs(coeffs->a + coeffs->b * y - cond_mean(f, y)) < 1e-12);
        }
    }
}

TEST_CASE("nonlinear families report no linear coefficients") {
    CHECK_FALSE(linear_coeffs(BernoulliT(0.3, 0.2)).has_value());
    CHECK_FALSE(linear_coeffs(GammaT(2.0, 1.0, 0.5)).has_value());
    CHECK_FALSE(linear_coeffs(LomaxT(2.0, 1.0, 0.5, 3.0)).has_value());
    CHECK(linear_coeffs(LomaxT::special_case(2.0, 3.0)).has_value());

    // GammaT cond_mean m0/(m1 + m2 y) fails the affine test at three points
    const GammaT g(2.0, 1.0, 0.5);
    const double m0 = cond_mean(g, 0.0), m1 = cond_mean(g, 1.0), m2 = cond_mean(g, 2.0);
    CHECK(std::abs((m2 - m1) - (m1 - m0)) > 1e-3);
}

TEST_CASE("invariance residuals: exact families") {
    CHECK(check_invariance(TransitionFamily{GaussianT(10.0, 100.0, 0.7)}, 1e-8) < 1e-8);
    CHECK(check_invariance(TransitionFamily{GaussianT(-2.0, 0.5, -0.85)}, 1e-8) < 1e-8);

    const auto rep = check_invariance_report(TransitionFamily{PoissonT(2.0, 3.0)}, 1e-10);
    CHECK(rep.max_residual < 1e-10);
    CHECK(rep.truncation > 10);  // Poisson(5) needs a tail beyond 10 to hit 1e-12
}

TEST_CASE("invariance check flags a broken construction") {
    // same conditional, marginal mean perturbed by +1 (one sd): residual blows up
    const TransitionFamily f = GaussianT(0.0, 1.0, 0.7);
    const TransitionFamily wrong = GaussianT(1.0, 1.0, 0.7);
    double worst = 0.0;
    for (double u : {-0.5, 0.5, 1.5}) {
        const double mixed = quad::integrate(
            [&](double v) { return trans_pdf(f, u, v) * marginal_pdf(wrong, v); },
            1.0 - 10.0, 1.0 + 10.0, 1e-9);
        worst = std::max(worst, std::abs(mixed - marginal_pdf(wrong, u)));
    }
    CHECK(worst > 0.01);
}

TEST_CASE("invariance property over randomized parameter sets (reduced)") {
    Rng rng(321);
    for (const auto& tag : testsup::all_family_tags()) {
        for (int rep = 0; rep < 4; ++rep) {
            const TransitionFamily f = testsup::random_family(tag, rng);
            const double tol = is_discrete_family(f) ? 1e-10 : 1e-6;
            const double resid = check_invariance(f, tol);
            INFO(tag << " rep " << rep << " residual " << resid);
            CHECK(resid < tol);
        }
    }
}

TEST_CASE("compatibility symmetry of the conditional-method families") {
    Rng rng(747);
    const TransitionFamily lg = LomaxT(2.0, 1.0, 0.5, 3.0);
    const TransitionFamily ls = LomaxT::special_case(5.0, 2.5);
    const TransitionFamily gm = GammaT(2.0, 1.0, 0.5);
    for (const auto& f : {lg, ls, gm}) {
        for (int i = 0; i < 40; ++i) {
            const double u = marginal_quantile(f, rng.uniform(0.02, 0.98));
            const double v = marginal_quantile(f, rng.uniform(0.02, 0.98));
            const double lhs = trans_pdf(f, u, v) * marginal_pdf(f, v);
            const double rhs = trans_pdf(f, v, u) * marginal_pdf(f, u);
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::max(lhs, rhs)));
        }
    }
}

TEST_CASE("same_marginal recognizes shared invariant distributions") {
    CHECK(same_marginal(GaussianT(1.0, 4.0, 0.2), GaussianT(1.0, 4.0, -0.7)));
    CHECK_FALSE(same_marginal(GaussianT(1.0, 4.0, 0.2), GaussianT(1.5, 4.0, 0.2)));
    CHECK(same_marginal(PoissonT(2.0, 3.0), PoissonT(1.0, 4.0)));  // both Pois(5)
    CHECK_FALSE(same_marginal(PoissonT(2.0, 3.0), PoissonT(2.0, 4.0)));
    CHECK_FALSE(same_marginal(TransitionFamily{GaussianT(0.0, 1.0, 0.0)},
                              TransitionFamily{StudentTT(0.0, 1.0, 5.0, 0.0)}));
}

TEST_CASE("Lomax parameter restrictions by alpha") {
    CHECK_NOTHROW(LomaxT(1.0, 1.0, 1.0, 1.0));
    CHECK_THROWS_AS(LomaxT(0.0, 1.0, 1.0, 1.0), std::invalid_argument);  // alpha = 1
    CHECK_NOTHROW(LomaxT(0.0, 1.0, 1.0, 0.5));   // alpha < 1 allows lambda0 = 0
    CHECK_THROWS_AS(LomaxT(1.0, 1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_NOTHROW(LomaxT(1.0, 1.0, 0.0, 2.0));   // alpha > 1 allows lambda2 = 0
    CHECK_THROWS_AS(LomaxT(0.0, 1.0, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(LomaxT::special_case(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("marginal moments agree with quadrature/sums") {
    const TransitionFamily g = GaussianT(3.0, 25.0, 0.8);
    auto mm = marginal_moments(g);
    CHECK(mm.mean == doctest::Approx(3.0));
    CHECK(mm.second == doctest::Approx(34.0));

    const TransitionFamily p = PoissonT(2.0, 3.0);
    mm = marginal_moments(p);
    CHECK(mm.mean == doctest::Approx(5.0));
    CHECK(mm.second == doctest::Approx(30.0));

    const TransitionFamily l = LomaxT::special_case(10.0, 5.0);  // marginal Lomax(10, 4)
    mm = marginal_moments(l);
    CHECK(mm.mean == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(mm.second == doctest::Approx(2.0 * 100.0 / (3.0 * 2.0)).epsilon(1e-12));

    const TransitionFamily gm = GammaT(2.0, 1.0, 0.5);
    mm = marginal_moments(gm);
    const double direct_mean = quad::integrate_halfline(
        [&](double x) { return x * marginal_pdf(gm, x); }, 1e-10);
    CHECK(mm.mean == doctest::Approx(direct_mean).epsilon(1e-9));

    CHECK_THROWS_AS(marginal_moments(TransitionFamily{StudentTT(0, 1, 2.0, 0.3)}),
                    mtd::NumericError);
}
