#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mtd/dists.hpp"
#include "mtd/errors.hpp"
#include "mtd/rng.hpp"

namespace mtd {

// One transition component of an MTD process: a bivariate pair (U, V) whose
// two marginals both equal the invariant density f_X, represented through its
// conditional density f(u | v), a sampler, and f_X itself.

/// Bivariate Gaussian pair: conditional N((1-rho) mu + rho v, sigma2 (1-rho^2)),
/// invariant marginal N(mu, sigma2).
struct GaussianT {
    double mu, sigma2, rho;
    GaussianT(double mu, double sigma2, double rho) : mu(mu), sigma2(sigma2), rho(rho) {
        detail::require(sigma2 > 0.0, "GaussianT: sigma2 must be > 0");
        detail::require(rho > -1.0 && rho < 1.0, "GaussianT: rho must be in (-1,1)");
    }
};

/// Bivariate Student-t pair (scale mixture of Gaussians): conditional is t with
/// df nu+1, location (1-rho) mu + rho v and squared scale
/// sigma^2 (1-rho^2) (nu + d)/(nu + 1), d = (v - mu)^2 / sigma^2;
/// invariant marginal t(mu, sigma, nu).
struct StudentTT {
    double mu, sigma, nu, rho;
    StudentTT(double mu, double sigma, double nu, double rho)
        : mu(mu), sigma(sigma), nu(nu), rho(rho) {
        detail::require(sigma > 0.0, "StudentTT: sigma must be > 0");
        detail::require(nu > 0.0, "StudentTT: nu must be > 0");
        detail::require(rho > -1.0 && rho < 1.0, "StudentTT: rho must be in (-1,1)");
    }
};

/// Bivariate Poisson pair (U, V) = (Q + Z, W + Z) with independent Poisson
/// Q, W ~ Pois(lambda), Z ~ Pois(gamma). Conditionally U | V=v is the
/// convolution of Pois(lambda) and Bin(v, gamma/(lambda+gamma)); invariant
/// marginal Pois(lambda + gamma).
struct PoissonT {
    double lambda, gamma;
    PoissonT(double lambda, double gamma) : lambda(lambda), gamma(gamma) {
        detail::require(lambda > 0.0, "PoissonT: lambda must be > 0");
        detail::require(gamma > 0.0, "PoissonT: gamma must be > 0");
    }
    double phi() const { return lambda + gamma; }
    double thinning_prob() const { return gamma / (lambda + gamma); }
};

/// Bivariate negative binomial (gamma-mixed bivariate Poisson). U | V=v is the
/// convolution of Bin(v, gamma/(lambda+gamma)) and
/// NB(k+v, 1 - lambda/(2 lambda + gamma + eta)); invariant marginal
/// NB(k, eta/(lambda+gamma+eta)).
struct NegBinT {
    double lambda, gamma, k, eta;
    NegBinT(double lambda, double gamma, double k, double eta)
        : lambda(lambda), gamma(gamma), k(k), eta(eta) {
        detail::require(lambda > 0.0, "NegBinT: lambda must be > 0");
        detail::require(gamma > 0.0, "NegBinT: gamma must be > 0");
        detail::require(k > 0.0, "NegBinT: k must be > 0");
        detail::require(eta > 0.0, "NegBinT: eta must be > 0");
    }
    double marginal_prob() const { return eta / (lambda + gamma + eta); }
    double nb_prob() const { return 1.0 - lambda / (2.0 * lambda + gamma + eta); }
};

/// Bivariate Bernoulli with cell probabilities p(1,1) = p1, p(1,0) = p(0,1) = p2,
/// p(0,0) = 1 - p1 - 2 p2; invariant marginal Ber(p1 + p2).
struct BernoulliT {
    double p1, p2;
    BernoulliT(double p1, double p2) : p1(p1), p2(p2) {
        detail::require(p1 > 0.0, "BernoulliT: p1 must be > 0");
        detail::require(p2 > 0.0, "BernoulliT: p2 must be > 0");
        detail::require(p1 + 2.0 * p2 < 1.0, "BernoulliT: p1 + 2 p2 must be < 1");
    }
    /// P(U = 1 | V = v).
    double success_prob(bool v) const {
        return v ? p1 / (p1 + p2) : p2 / (1.0 - p1 - p2);
    }
};

/// Sum of n independent bivariate Bernoulli pairs. U | V=v is the convolution
/// of Bin(n-v, p2/(1-p1-p2)) and Bin(v, p1/(p1+p2)); invariant marginal
/// Bin(n, p1 + p2).
struct BinomialT {
    long n;
    double p1, p2;
    BinomialT(long n, double p1, double p2) : n(n), p1(p1), p2(p2) {
        detail::require(n >= 1, "BinomialT: n must be >= 1");
        detail::require(p1 > 0.0, "BinomialT: p1 must be > 0");
        detail::require(p2 > 0.0, "BinomialT: p2 must be > 0");
        detail::require(p1 + 2.0 * p2 < 1.0, "BinomialT: p1 + 2 p2 must be < 1");
    }
};

/// Compatible Lomax conditionals: U | V=v is Lomax with shape alpha and scale
/// (lambda0 + lambda1 v)/(lambda1 + lambda2 v); invariant marginal proportional
/// to (lambda1 + lambda2 x)^-1 (lambda0 + lambda1 x)^-alpha. With lambda2 = 0
/// and alpha > 1 both the conditional and the marginal are Lomax; that special
/// case is parameterized by phi = lambda0/lambda1 and the marginal is
/// Lomax(phi, alpha - 1).
class LomaxT {
public:
    LomaxT(double lambda0, double lambda1, double lambda2, double alpha);
    static LomaxT special_case(double phi, double alpha);

    double lambda0, lambda1, lambda2, alpha;

    bool special() const { return lambda2 == 0.0; }
    double phi() const { return lambda0 / lambda1; }
    double cond_scale(double v) const {
        return (lambda0 + lambda1 * v) / (lambda1 + lambda2 * v);
    }
    /// log of the marginal normalizing constant (relative accuracy 1e-9,
    /// computed once at construction).
    double log_marginal_norm() const { return log_norm_; }

private:
    double log_norm_;
};

/// Compatible gamma conditionals: U | V=v ~ Ga(m0, m1 + m2 v); invariant
/// marginal proportional to x^(m0-1) exp(-m1 x) (m1 + m2 x)^-m0.
class GammaT {
public:
    GammaT(double m0, double m1, double m2);

    double m0, m1, m2;
    double log_marginal_norm() const { return log_norm_; }

private:
    double log_norm_;
};

using TransitionFamily = std::variant<GaussianT, StudentTT, PoissonT, NegBinT,
                                      BernoulliT, BinomialT, LomaxT, GammaT>;

struct LinearCoeffs {
    double a, b;  // cond_mean(y) = a + b y
};

struct InvarianceReport {
    double max_residual;
    long truncation;  // last summed state for discrete families, -1 otherwise
};

double trans_log_pdf(const TransitionFamily& f, double x_t, double x_lag);
double trans_pdf(const TransitionFamily& f, double x_t, double x_lag);
double trans_cdf(const TransitionFamily& f, double x_t, double x_lag);
double trans_sample(const TransitionFamily& f, double x_lag, Rng& rng);

double marginal_log_pdf(const TransitionFamily& f, double x);
double marginal_pdf(const TransitionFamily& f, double x);
double marginal_cdf(const TransitionFamily& f, double x);
double marginal_quantile(const TransitionFamily& f, double u);
double marginal_sample(const TransitionFamily& f, Rng& rng);

/// First and second moment of the invariant marginal. Throws NumericError when
/// a moment does not exist (e.g. Student-t with nu <= 2).
struct MarginalMoments {
    double mean, second;
};
MarginalMoments marginal_moments(const TransitionFamily& f);

/// E(U | V = y).
double cond_mean(const TransitionFamily& f, double y);

/// (a, b) with cond_mean(y) = a + b y when the family is linear; nullopt for
/// BernoulliT, GammaT and the general (lambda2 != 0) LomaxT.
std::optional<LinearCoeffs> linear_coeffs(const TransitionFamily& f);

/// Sup over a deterministic test grid of
///   | integral/sum of f(u|v) f_X(v) dv  -  f_X(u) |.
/// Continuous families use 200 Gauss-Legendre nodes on a 6-sigma-equivalent
/// quantile range; discrete families sum all states up to the point where the
/// marginal tail mass drops below 1e-12. Quadrature failure throws
/// NumericError (distinct from a large residual, which is returned).
InvarianceReport check_invariance_report(const TransitionFamily& f, double tol);
double check_invariance(const TransitionFamily& f, double tol);

bool is_discrete_family(const TransitionFamily& f);
bool in_support(const TransitionFamily& f, double x);
std::string family_tag(const TransitionFamily& f);

/// True when two components (same variant alternative) share the invariant
/// marginal, the Proposition-1 condition for mixing them in one model.
bool same_marginal(const TransitionFamily& a, const TransitionFamily& b);

}  // namespace mtd
