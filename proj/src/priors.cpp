#include "mtd/priors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace mtd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> dirichlet_shape(const DirichletW& p, int L) {
    if (p.shape) {
        detail::require(static_cast<int>(p.shape->size()) == L,
                        "DirichletW: shape length must equal L");
        return *p.shape;
    }
    return std::vector<double>(static_cast<std::size_t>(L), 1.0 / L);
}

std::vector<double> stick_break(std::span<const double> z) {
    const std::size_t L = z.size() + 1;
    std::vector<double> w(L);
    double stick = 1.0;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        w[l] = z[l] * stick;
        stick *= 1.0 - z[l];
    }
    w[L - 1] = stick;
    return w;
}

}  // namespace

std::vector<double> cdp_bin_masses(double a0, double b0, int L) {
    detail::require(L >= 1, "cdp_bin_masses: L must be >= 1");
    std::vector<double> a(static_cast<std::size_t>(L));
    double prev = 0.0;
    for (int l = 1; l <= L; ++l) {
        const double cur =
            l == L ? 1.0 : boost::math::ibeta(a0, b0, static_cast<double>(l) / L);
        a[l - 1] = cur - prev;
        prev = cur;
    }
    return a;
}

std::vector<double> prior_sample_w(const WeightPrior& p, int L, Rng& rng) {
    detail::require(L >= 1, "prior_sample_w: L must be >= 1");
    return std::visit(
        [&](const auto& q) -> std::vector<double> {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, DirichletW>) {
                return draw_dirichlet(rng, dirichlet_shape(q, L));
            } else if constexpr (std::is_same_v<T, StickBreaking>) {
                std::vector<double> z(static_cast<std::size_t>(L - 1));
                for (double& zi : z) zi = draw_beta(rng, 1.0, q.alpha_s);
                return stick_break(z);
            } else {
                std::vector<double> shape = cdp_bin_masses(q.a0, q.b0, L);
                for (double& s : shape) s *= q.alpha0;
                return draw_dirichlet(rng, shape);
            }
        },
        p);
}

std::vector<double> prior_mean_w(const WeightPrior& p, int L) {
    detail::require(L >= 1, "prior_mean_w: L must be >= 1");
    return std::visit(
        [&](const auto& q) -> std::vector<double> {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, DirichletW>) {
                std::vector<double> shape = dirichlet_shape(q, L);
                const double total =
                    std::accumulate(shape.begin(), shape.end(), 0.0);
                for (double& s : shape) s /= total;
                return shape;
            } else if constexpr (std::is_same_v<T, StickBreaking>) {
                // E(w_l) = a* (1 - a*)^(l-1) with a* = 1/(1 + alpha_s)
                const double astar = 1.0 / (1.0 + q.alpha_s);
                std::vector<double> m(static_cast<std::size_t>(L));
                for (int l = 0; l + 1 < L; ++l)
                    m[l] = astar * std::pow(1.0 - astar, l);
                m[L - 1] = std::pow(1.0 - astar, L - 1);
                return m;
            } else {
                return cdp_bin_masses(q.a0, q.b0, L);
            }
        },
        p);
}

std::vector<double> posterior_sample_w(const WeightPrior& p,
                                       std::span<const long> counts, Rng& rng) {
    const int L = static_cast<int>(counts.size());
    detail::require(L >= 1, "posterior_sample_w: counts must be non-empty");
    for (long c : counts)
        detail::require(c >= 0, "posterior_sample_w: counts must be >= 0");
    return std::visit(
        [&](const auto& q) -> std::vector<double> {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, DirichletW>) {
                std::vector<double> shape = dirichlet_shape(q, L);
                for (int l = 0; l < L; ++l) shape[l] += static_cast<double>(counts[l]);
                return draw_dirichlet(rng, shape);
            } else if constexpr (std::is_same_v<T, StickBreaking>) {
                std::vector<double> z(static_cast<std::size_t>(L - 1));
                long tail = std::accumulate(counts.begin(), counts.end(), 0L);
                for (int l = 0; l + 1 < L; ++l) {
                    tail -= counts[l];
                    z[l] = draw_beta(rng, 1.0 + static_cast<double>(counts[l]),
                                     q.alpha_s + static_cast<double>(tail));
                }
                return stick_break(z);
            } else {
                std::vector<double> shape = cdp_bin_masses(q.a0, q.b0, L);
                for (int l = 0; l < L; ++l)
                    shape[l] = q.alpha0 * shape[l] + static_cast<double>(counts[l]);
                return draw_dirichlet(rng, shape);
            }
        },
        p);
}

double log_prior_params(const GaussianPrior& p, const GaussianParams& t) {
    double lp = log_pdf(Dist{Normal(p.mu0, std::sqrt(p.sigma0_sq))}, t.mu);
    lp += log_pdf(Dist{InverseGamma(p.u0, p.v0)}, t.sigma2);
    for (double r : t.rho) {
        if (r <= -1.0 || r >= 1.0) return -kInf;
        lp += -std::log(2.0);
    }
    return lp;
}

double log_prior_params(const PoissonPrior& p, const PoissonParams& t) {
    return log_pdf(Dist{Gamma(p.u_lambda, p.v_lambda)}, t.lambda) +
           log_pdf(Dist{Gamma(p.u_gamma, p.v_gamma)}, t.gamma);
}

double log_prior_params(const LomaxPrior& p, const LomaxParams& t) {
    // beta carries a flat prior: no contribution
    return log_pdf(Dist{Gamma(p.u_alpha, p.v_alpha)}, t.alpha) +
           log_pdf(Dist{InverseGamma(p.u_phi, p.v_phi)}, t.phi);
}

}  // namespace mtd
