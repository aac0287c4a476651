#pragma once

#include <span>
#include <variant>
#include <vector>

#include "mtd/errors.hpp"
#include "mtd/rng.hpp"

namespace mtd {

// Elementary univariate families. Parameter domains are enforced at
// construction; evaluation never re-validates. Log-space evaluation is the
// canonical path, pdf() is exp(log_pdf()).

struct Normal {
    double mean, sd;
    Normal(double mean, double sd) : mean(mean), sd(sd) {
        detail::require(sd > 0.0, "Normal: sd must be > 0");
    }
};

/// Location / scale / degrees-of-freedom parameterization; scale is not a
/// variance.
struct StudentT {
    double loc, scale, df;
    StudentT(double loc, double scale, double df) : loc(loc), scale(scale), df(df) {
        detail::require(scale > 0.0, "StudentT: scale must be > 0");
        detail::require(df > 0.0, "StudentT: df must be > 0");
    }
};

/// Shape/rate parameterization, mean shape/rate.
struct Gamma {
    double shape, rate;
    Gamma(double shape, double rate) : shape(shape), rate(rate) {
        detail::require(shape > 0.0, "Gamma: shape must be > 0");
        detail::require(rate > 0.0, "Gamma: rate must be > 0");
    }
};

struct InverseGamma {
    double shape, scale;
    InverseGamma(double shape, double scale) : shape(shape), scale(scale) {
        detail::require(shape > 0.0, "InverseGamma: shape must be > 0");
        detail::require(scale > 0.0, "InverseGamma: scale must be > 0");
    }
};

struct Beta {
    double a, b;
    Beta(double a, double b) : a(a), b(b) {
        detail::require(a > 0.0 && b > 0.0, "Beta: shapes must be > 0");
    }
};

struct Uniform {
    double lo, hi;
    Uniform(double lo, double hi) : lo(lo), hi(hi) {
        detail::require(lo < hi, "Uniform: lo must be < hi");
    }
};

struct Poisson {
    double rate;
    explicit Poisson(double rate) : rate(rate) {
        detail::require(rate > 0.0, "Poisson: rate must be > 0");
    }
};

/// prob may sit at 0 or 1; the degenerate endpoints are well defined.
struct Binomial {
    long trials;
    double prob;
    Binomial(long trials, double prob) : trials(trials), prob(prob) {
        detail::require(trials >= 1, "Binomial: trials must be >= 1");
        detail::require(prob >= 0.0 && prob <= 1.0, "Binomial: prob must be in [0,1]");
    }
};

/// pmf over the number of failures before `successes` successes; `successes`
/// may be non-integer.
struct NegBinomial {
    double successes, prob;
    NegBinomial(double successes, double prob) : successes(successes), prob(prob) {
        detail::require(successes > 0.0, "NegBinomial: successes must be > 0");
        detail::require(prob > 0.0 && prob <= 1.0, "NegBinomial: prob must be in (0,1]");
    }
};

struct Bernoulli {
    double prob;
    explicit Bernoulli(double prob) : prob(prob) {
        detail::require(prob >= 0.0 && prob <= 1.0, "Bernoulli: prob must be in [0,1]");
    }
};

/// Shifted Pareto on [0, inf): density (shape/scale) (1 + x/scale)^-(shape+1).
struct Lomax {
    double scale, shape;
    Lomax(double scale, double shape) : scale(scale), shape(shape) {
        detail::require(scale > 0.0, "Lomax: scale must be > 0");
        detail::require(shape > 0.0, "Lomax: shape must be > 0");
    }
};

using Dist = std::variant<Normal, StudentT, Gamma, InverseGamma, Beta, Uniform,
                          Poisson, Binomial, NegBinomial, Bernoulli, Lomax>;

double log_pdf(const Dist& d, double x);
double pdf(const Dist& d, double x);

/// P(X <= x). Right-continuous for discrete families (x is integer-floored).
double cdf(const Dist& d, double x);

/// Inverse cdf; for discrete families, the smallest integer k with
/// cdf(k) >= u. Throws std::domain_error unless 0 < u < 1.
double quantile(const Dist& d, double u);

double sample(const Dist& d, Rng& rng);

bool is_discrete(const Dist& d);
double support_lower(const Dist& d);
double support_upper(const Dist& d);

/// Dirichlet lives outside the scalar variant: its support is the simplex.
struct Dirichlet {
    std::vector<double> shape;
    explicit Dirichlet(std::vector<double> shape_) : shape(std::move(shape_)) {
        detail::require(!shape.empty(), "Dirichlet: shape must be non-empty");
        for (double a : shape) detail::require(a > 0.0, "Dirichlet: shape entries must be > 0");
    }
};

double log_pdf(const Dirichlet& d, std::span<const double> x);
std::vector<double> sample(const Dirichlet& d, Rng& rng);
std::vector<double> mean(const Dirichlet& d);

// Primitive samplers shared by sample() and the MCMC kernels. All are
// deterministic functions of the rng stream.
double draw_normal(Rng& rng, double mean = 0.0, double sd = 1.0);
double draw_gamma(Rng& rng, double shape, double rate);
double draw_inverse_gamma(Rng& rng, double shape, double scale);
double draw_beta(Rng& rng, double a, double b);
double draw_student_t(Rng& rng, double loc, double scale, double df);
long draw_poisson(Rng& rng, double rate);
long draw_binomial(Rng& rng, long n, double p);
long draw_neg_binomial(Rng& rng, double r, double p);
std::vector<double> draw_dirichlet(Rng& rng, std::span<const double> shape);

/// Index draw proportional to non-negative weights (need not be normalized).
std::size_t draw_categorical(Rng& rng, std::span<const double> weights);

/// Index draw proportional to exp(logw), stabilized by max subtraction.
/// -inf entries are allowed; throws NumericError if all entries are -inf.
std::size_t draw_categorical_log(Rng& rng, std::span<const double> logw);

// Normal cdf / inverse-cdf, used directly by the quantile-residual machinery.
double std_normal_cdf(double x);
double std_normal_quantile(double u);

}  // namespace mtd
