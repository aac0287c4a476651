#include "mtd/acf.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mtd/errors.hpp"

namespace mtd {

namespace {

struct LinearSpec {
    std::vector<double> a, b;
    double mu, mu2, phi_const;
};

LinearSpec linear_spec(const MtdModel& m) {
    LinearSpec s;
    for (const auto& comp : m.components()) {
        const auto lc = linear_coeffs(comp);
        if (!lc)
            throw std::invalid_argument("acf: family " + m.tag() +
                                        " has no linear conditional expectation");
        s.a.push_back(lc->a);
        s.b.push_back(lc->b);
    }
    const auto mm = marginal_moments(m.components().front());
    s.mu = mm.mean;
    s.mu2 = mm.second;
    if (!(s.mu2 > s.mu * s.mu))
        throw NumericError("acf: marginal variance must be positive");
    double wa = 0.0, wb = 0.0;
    for (int l = 0; l < m.order(); ++l) {
        wa += m.weights()[l] * s.a[l];
        wb += m.weights()[l] * s.b[l];
    }
    s.phi_const = (wa * s.mu - (1.0 - wb) * s.mu * s.mu) / (s.mu2 - s.mu * s.mu);
    return s;
}

}  // namespace

AcfResult acf(const MtdModel& m, int horizon, const AcfOptions& opts) {
    detail::require(horizon >= 0, "acf: horizon must be >= 0");
    const LinearSpec spec = linear_spec(m);
    const int L = m.order();

    AcfResult out;
    out.phi_const = spec.phi_const;
    out.r.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    out.r[0] = 1.0;

    if (L > 1 && horizon >= 1) {
        const std::size_t burn =
            opts.burnin > 0 ? opts.burnin
                            : std::max<std::size_t>(1000, 50 * static_cast<std::size_t>(L));
        Rng rng(opts.mc_seed);
        const std::vector<double> path = simulate(m, opts.mc_length + burn, rng);
        const std::size_t n = opts.mc_length;
        const double* x = path.data() + burn;
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += x[t];
        mean /= static_cast<double>(n);
        double c0 = 0.0;
        for (std::size_t t = 0; t < n; ++t) c0 += (x[t] - mean) * (x[t] - mean);
        std::vector<double> rhat(static_cast<std::size_t>(L), 0.0);
        for (int h = 1; h < L; ++h) {
            double ch = 0.0;
            for (std::size_t t = 0; t + h < n; ++t)
                ch += (x[t] - mean) * (x[t + h] - mean);
            rhat[h] = ch / c0;
        }
        double cum = 0.0;
        for (int h = 1; h < L && h <= horizon; ++h) {
            out.r[h] = rhat[h];
            out.init_se.push_back(
                std::sqrt((1.0 + 2.0 * cum) / static_cast<double>(n)));
            cum += rhat[h] * rhat[h];
        }
        out.mc_length = n;
        out.mc_seed = opts.mc_seed;
    }

    for (int h = std::max(L, 1); h <= horizon; ++h) {
        double acc = spec.phi_const;
        for (int l = 1; l <= L; ++l)
            acc += m.weights()[l - 1] * spec.b[l - 1] * out.r[h - l];
        out.r[h] = acc;
    }
    return out;
}

RootCheck companion_roots(std::span<const double> coeffs) {
    detail::require(!coeffs.empty(), "companion_roots: need at least one coefficient");
    const int L = static_cast<int>(coeffs.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(L, L);
    for (int l = 0; l < L; ++l) companion(0, l) = coeffs[l];
    for (int i = 1; i < L; ++i) companion(i, i - 1) = 1.0;

    RootCheck out;
    const Eigen::VectorXcd ev = companion.eigenvalues();
    double max_mod = 0.0;
    for (int i = 0; i < L; ++i) {
        out.roots.emplace_back(ev(i).real(), ev(i).imag());
        max_mod = std::max(max_mod, std::abs(ev(i)));
    }
    out.all_inside = max_mod < 1.0 - 1e-12;
    return out;
}

StationarityResult weak_stationarity_check(const MtdModel& m) {
    const LinearSpec spec = linear_spec(m);
    std::vector<double> coeffs(static_cast<std::size_t>(m.order()));
    for (int l = 0; l < m.order(); ++l) coeffs[l] = m.weights()[l] * spec.b[l];
    const RootCheck rc = companion_roots(coeffs);

    StationarityResult out;
    out.roots = rc.roots;
    out.all_inside = rc.all_inside;
    out.phi_const = spec.phi_const;
    return out;
}

}  // namespace mtd
