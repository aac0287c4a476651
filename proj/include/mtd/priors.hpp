#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mtd/dists.hpp"
#include "mtd/rng.hpp"

namespace mtd {

// Priors on the mixture weights. All three are order-free objects: L is a
// property of each call, so one prior serves any order.

/// Dirichlet on the simplex; without an explicit shape the uniform 1_L / L is
/// used at call time.
struct DirichletW {
    std::optional<std::vector<double>> shape;
    DirichletW() = default;
    explicit DirichletW(std::vector<double> s) : shape(std::move(s)) {
        for (double a : *shape)
            detail::require(a > 0.0, "DirichletW: shape entries must be > 0");
    }
};

/// Truncated stick-breaking: w_1 = z_1, w_l = z_l prod_{r<l}(1 - z_r),
/// w_L = prod_{l<L}(1 - z_l), with z_l ~ Beta(1, alpha_s) i.i.d.
struct StickBreaking {
    double alpha_s;
    explicit StickBreaking(double alpha_s) : alpha_s(alpha_s) {
        detail::require(alpha_s > 0.0, "StickBreaking: alpha_s must be > 0");
    }
};

/// Cdf-based prior: weights are increments of a random cdf G ~ DP(alpha0, G0)
/// with G0 = Beta(a0, b0); the increment vector is Dirichlet with shape
/// alpha0 * (a_1, ..., a_L), a_l = G0(l/L) - G0((l-1)/L).
struct CdfBased {
    double alpha0, a0, b0;
    CdfBased(double alpha0, double a0, double b0) : alpha0(alpha0), a0(a0), b0(b0) {
        detail::require(alpha0 > 0.0, "CdfBased: alpha0 must be > 0");
        detail::require(a0 > 0.0 && b0 > 0.0, "CdfBased: base shapes must be > 0");
    }
};

using WeightPrior = std::variant<DirichletW, StickBreaking, CdfBased>;

/// Base-measure bin masses a_l of the cdf-based prior (sum to 1 within 1e-12).
std::vector<double> cdp_bin_masses(double a0, double b0, int L);

std::vector<double> prior_sample_w(const WeightPrior& p, int L, Rng& rng);
std::vector<double> prior_mean_w(const WeightPrior& p, int L);

/// Exact draw from the full conditional given allocation counts M_l.
/// Stick-breaking: z*_l ~ Beta(1 + M_l, alpha_s + sum_{r>l} M_r);
/// cdf-based / Dirichlet: standard Dirichlet conjugacy.
std::vector<double> posterior_sample_w(const WeightPrior& p,
                                       std::span<const long> counts, Rng& rng);

// Per-family parameter priors, defaults as used in the data illustrations.

struct GaussianParams {
    double mu = 0.0;
    double sigma2 = 1.0;
    std::vector<double> rho;  // one per lag
};

struct PoissonParams {
    double lambda = 1.0;
    double gamma = 1.0;
};

struct LomaxParams {
    double alpha = 2.0;
    double phi = 1.0;
    std::vector<double> beta;  // harmonic regression coefficients (may be empty)
};

/// N(mu0, sigma0_sq) on mu, IG(u0, v0) on sigma2, U(-1,1) on each rho_l.
struct GaussianPrior {
    double mu0 = 0.0, sigma0_sq = 100.0, u0 = 2.0, v0 = 0.1;
};

/// Ga(u_lambda, v_lambda) on lambda, Ga(u_gamma, v_gamma) on gamma.
struct PoissonPrior {
    double u_lambda = 2.0, v_lambda = 1.0, u_gamma = 2.0, v_gamma = 1.0;
};

/// Ga(u_alpha, v_alpha) on alpha, IG(u_phi, v_phi) on phi, flat on beta.
struct LomaxPrior {
    double u_alpha = 6.0, v_alpha = 1.0, u_phi = 3.0, v_phi = 20.0;
};

using ParamPrior = std::variant<GaussianPrior, PoissonPrior, LomaxPrior>;

double log_prior_params(const GaussianPrior& p, const GaussianParams& t);
double log_prior_params(const PoissonPrior& p, const PoissonParams& t);
double log_prior_params(const LomaxPrior& p, const LomaxParams& t);

}  // namespace mtd
