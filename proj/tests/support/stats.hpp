#pragma once

// Small statistical helpers shared by the test suites. These are oracles and
// test machinery only; nothing here is used by the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mtd/quadrature.hpp"

namespace testsup {

inline double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double var_of(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double sd_of(std::span<const double> x) { return std::sqrt(var_of(x)); }

/// One-sample two-sided Kolmogorov-Smirnov statistic against a continuous cdf.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

/// Asymptotic two-sided critical value at significance alpha.
inline double ks_critical(std::size_t n, double alpha = 0.01) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

inline double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

inline double two_sample_ks_critical(std::size_t n, std::size_t m, double alpha = 0.01) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

/// Pearson chi-squared test of integer counts against expected cell
/// probabilities. Cells with expected count below 5 are pooled from the right
/// tail. Returns true when the statistic is below the upper alpha quantile.
inline bool chi2_gof_passes(std::span<const long> observed,
                            std::span<const double> expected_probs, std::size_t n,
                            double alpha = 0.01) {
    if (observed.size() != expected_probs.size())
        throw std::invalid_argument("chi2_gof: size mismatch");
    std::vector<double> exp_counts(expected_probs.size());
    for (std::size_t i = 0; i < expected_probs.size(); ++i)
        exp_counts[i] = expected_probs[i] * static_cast<double>(n);
    // pool small expected cells into their left neighbour, scanning from the tail
    std::vector<double> eo, ee;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < exp_counts.size(); ++i) {
        acc_o += static_cast<double>(observed[i]);
        acc_e += exp_counts[i];
        if (acc_e >= 5.0) {
            eo.push_back(acc_o);
            ee.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0) {
        if (ee.empty()) return true;  // degenerate: everything in one cell
        eo.back() += acc_o;
        ee.back() += acc_e;
    }
    if (ee.size() < 2) return true;
    double stat = 0.0;
    for (std::size_t i = 0; i < ee.size(); ++i) {
        const double d = eo[i] - ee[i];
        stat += d * d / ee[i];
    }
    const boost::math::chi_squared_distribution<> chi2(
        static_cast<double>(ee.size() - 1));
    return stat < boost::math::quantile(chi2, 1.0 - alpha);
}

/// Integral of g over consecutive [knots[i], knots[i+1]] segments, each by
/// tanh-sinh so endpoint singularities and long decaying tails are safe.
inline double segmented_integral(const std::function<double(double)>& g,
                                 const std::vector<double>& knots) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] <= knots[i]) continue;
        // quantile-spaced knots keep each segment's variation bounded, so
        // Gauss-Kronrod stays honest even next to (excluded) singular endpoints;
        // 1e-10 absolute slack per segment across ~21 segments
        acc += mtd::quad::integrate(g, knots[i], knots[i + 1], 1e-9, 1e-10);
    }
    return acc;
}

/// Probability ladder for segment boundaries, dense in both tails.
inline std::vector<double> quantile_ladder_probs() {
    std::vector<double> p = {1e-13, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2};
    for (double q : {0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95}) p.push_back(q);
    for (double q : {1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-13}) p.push_back(1.0 - q);
    return p;
}

/// Generic quantile by expanding bracket + bisection on a cdf function.
inline double quantile_by_bisection(const std::function<double(double)>& cdf, double p,
                                    double lo, double hi) {
    while (cdf(lo) > p) lo = lo > 0 ? lo / 2 - 1.0 : lo * 2.0 - 1.0;
    while (cdf(hi) < p) hi = hi > 0 ? hi * 2.0 + 1.0 : hi / 2 + 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return hi;
}

/// Thin a series by stride (marginal-preserving subsample).
inline std::vector<double> thin(std::span<const double> x, std::size_t stride) {
    std::vector<double> out;
    out.reserve(x.size() / stride + 1);
    for (std::size_t i = 0; i < x.size(); i += stride) out.push_back(x[i]);
    return out;
}

inline double sample_autocorr(std::span<const double> x, std::size_t lag) {
    const double m = mean_of(x);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t + lag < x.size()) num += (x[t] - m) * (x[t + lag] - m);
    }
    return num / den;
}

}  // namespace testsup
