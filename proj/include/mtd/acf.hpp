#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mtd/model.hpp"

namespace mtd {

// Autocorrelation of linear MTD models (cond_mean(y) = a_l + b_l y per lag)
// through the recursion r(h) = phi + sum_l w_l b_l r(h-l) for h >= L, with
// phi = {sum_l w_l a_l mu - (1 - sum_l w_l b_l) mu^2} / (mu2 - mu^2).
// The recursion pins r only from lag L on; r(1..L-1) is estimated by Monte
// Carlo from a long simulation (closed-form initial conditions are not
// available for general linear MTDs).

struct AcfOptions {
    std::size_t mc_length = 1'000'000;
    std::uint64_t mc_seed = 20240917;
    std::size_t burnin = 0;  // 0 -> max(1000, 50 L)
};

struct AcfResult {
    std::vector<double> r;        // r[0..H]
    double phi_const = 0.0;
    std::vector<double> init_se;  // Bartlett s.e. of the MC estimates r(1..L-1)
    std::size_t mc_length = 0;    // 0 when no simulation was needed (L == 1)
    std::uint64_t mc_seed = 0;
};

/// Throws std::invalid_argument for nonlinear families and NumericError when
/// the marginal moments do not exist.
AcfResult acf(const MtdModel& m, int horizon, const AcfOptions& opts = {});

struct RootCheck {
    std::vector<std::complex<double>> roots;
    bool all_inside = false;  // max |z| < 1 - 1e-12
};

/// Roots of z^L - c_1 z^(L-1) - ... - c_L via companion-matrix eigenvalues.
RootCheck companion_roots(std::span<const double> coeffs);

struct StationarityResult {
    std::vector<std::complex<double>> roots;  // of z^L - w_1 b_1 z^(L-1) - ... - w_L b_L
    bool all_inside = false;                  // max |z| < 1 - 1e-12
    double phi_const = 0.0;                   // r(h) -> 0 additionally needs phi = 0
};

StationarityResult weak_stationarity_check(const MtdModel& m);

}  // namespace mtd
