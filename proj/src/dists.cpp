#include "mtd/dists.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace mtd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kPi = 3.14159265358979323846;

bool is_count(double x) { return x >= 0.0 && std::floor(x) == x; }

double lchoose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

const boost::math::normal_distribution<>& std_normal() {
    static const boost::math::normal_distribution<> d(0.0, 1.0);
    return d;
}

}  // namespace

double std_normal_cdf(double x) { return boost::math::cdf(std_normal(), x); }

double std_normal_quantile(double u) {
    detail::require(u > 0.0 && u < 1.0, "std_normal_quantile: u must be in (0,1)");
    return boost::math::quantile(std_normal(), u);
}

// ---------------------------------------------------------------------------
// log densities

namespace {

struct LogPdfVisitor {
    double x;

    double operator()(const Normal& d) const {
        const double z = (x - d.mean) / d.sd;
        return -0.5 * kLogTwoPi - std::log(d.sd) - 0.5 * z * z;
    }
    double operator()(const StudentT& d) const {
        const double z = (x - d.loc) / d.scale;
        return std::lgamma(0.5 * (d.df + 1.0)) - std::lgamma(0.5 * d.df) -
               0.5 * std::log(d.df * kPi) - std::log(d.scale) -
               0.5 * (d.df + 1.0) * std::log1p(z * z / d.df);
    }
    double operator()(const Gamma& d) const {
        if (x < 0.0) return -kInf;
        if (x == 0.0) {
            if (d.shape > 1.0) return -kInf;
            if (d.shape == 1.0) return std::log(d.rate);
            return kInf;  // density diverges at 0 for shape < 1
        }
        return d.shape * std::log(d.rate) - std::lgamma(d.shape) +
               (d.shape - 1.0) * std::log(x) - d.rate * x;
    }
    double operator()(const InverseGamma& d) const {
        if (x <= 0.0) return -kInf;
        return d.shape * std::log(d.scale) - std::lgamma(d.shape) -
               (d.shape + 1.0) * std::log(x) - d.scale / x;
    }
    double operator()(const Beta& d) const {
        if (x < 0.0 || x > 1.0) return -kInf;
        if ((x == 0.0 && d.a > 1.0) || (x == 1.0 && d.b > 1.0)) return -kInf;
        if ((x == 0.0 && d.a < 1.0) || (x == 1.0 && d.b < 1.0)) return kInf;
        return std::lgamma(d.a + d.b) - std::lgamma(d.a) - std::lgamma(d.b) +
               (d.a - 1.0) * std::log(x) + (d.b - 1.0) * std::log1p(-x);
    }
    double operator()(const Uniform& d) const {
        if (x < d.lo || x > d.hi) return -kInf;
        return -std::log(d.hi - d.lo);
    }
    double operator()(const Poisson& d) const {
        if (!is_count(x)) return -kInf;
        return x * std::log(d.rate) - d.rate - std::lgamma(x + 1.0);
    }
    double operator()(const Binomial& d) const {
        if (!is_count(x) || x > static_cast<double>(d.trials)) return -kInf;
        const double n = static_cast<double>(d.trials);
        if (d.prob == 0.0) return x == 0.0 ? 0.0 : -kInf;
        if (d.prob == 1.0) return x == n ? 0.0 : -kInf;
        return lchoose(n, x) + x * std::log(d.prob) + (n - x) * std::log1p(-d.prob);
    }
    double operator()(const NegBinomial& d) const {
        if (!is_count(x)) return -kInf;
        if (d.prob == 1.0) return x == 0.0 ? 0.0 : -kInf;
        return std::lgamma(x + d.successes) - std::lgamma(d.successes) -
               std::lgamma(x + 1.0) + d.successes * std::log(d.prob) +
               x * std::log1p(-d.prob);
    }
    double operator()(const Bernoulli& d) const {
        if (x == 1.0) return d.prob > 0.0 ? std::log(d.prob) : -kInf;
        if (x == 0.0) return d.prob < 1.0 ? std::log1p(-d.prob) : -kInf;
        return -kInf;
    }
    double operator()(const Lomax& d) const {
        if (x < 0.0) return -kInf;
        return std::log(d.shape) - std::log(d.scale) -
               (d.shape + 1.0) * std::log1p(x / d.scale);
    }
};

}  // namespace

double log_pdf(const Dist& d, double x) { return std::visit(LogPdfVisitor{x}, d); }
double pdf(const Dist& d, double x) { return std::exp(log_pdf(d, x)); }

// ---------------------------------------------------------------------------
// cdf

namespace {

struct CdfVisitor {
    double x;

    double operator()(const Normal& d) const {
        return std_normal_cdf((x - d.mean) / d.sd);
    }
    double operator()(const StudentT& d) const {
        return boost::math::cdf(boost::math::students_t_distribution<>(d.df),
                                (x - d.loc) / d.scale);
    }
    double operator()(const Gamma& d) const {
        if (x <= 0.0) return 0.0;
        return boost::math::gamma_p(d.shape, d.rate * x);
    }
    double operator()(const InverseGamma& d) const {
        if (x <= 0.0) return 0.0;
        return boost::math::gamma_q(d.shape, d.scale / x);
    }
    double operator()(const Beta& d) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return boost::math::ibeta(d.a, d.b, x);
    }
    double operator()(const Uniform& d) const {
        return std::clamp((x - d.lo) / (d.hi - d.lo), 0.0, 1.0);
    }
    double operator()(const Poisson& d) const {
        const double k = std::floor(x);
        if (k < 0.0) return 0.0;
        return boost::math::gamma_q(k + 1.0, d.rate);
    }
    double operator()(const Binomial& d) const {
        const double k = std::floor(x);
        const double n = static_cast<double>(d.trials);
        if (k < 0.0) return 0.0;
        if (k >= n) return 1.0;
        if (d.prob == 0.0) return 1.0;
        if (d.prob == 1.0) return 0.0;
        return boost::math::ibetac(k + 1.0, n - k, d.prob);
    }
    double operator()(const NegBinomial& d) const {
        const double k = std::floor(x);
        if (k < 0.0) return 0.0;
        if (d.prob == 1.0) return 1.0;
        return boost::math::ibeta(d.successes, k + 1.0, d.prob);
    }
    double operator()(const Bernoulli& d) const {
        if (x < 0.0) return 0.0;
        if (x < 1.0) return 1.0 - d.prob;
        return 1.0;
    }
    double operator()(const Lomax& d) const {
        if (x <= 0.0) return 0.0;
        return -std::expm1(-d.shape * std::log1p(x / d.scale));
    }
};

}  // namespace

double cdf(const Dist& d, double x) {
    detail::require(!std::isnan(x), "cdf: x must not be NaN");
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return std::visit(CdfVisitor{x}, d);
}

// ---------------------------------------------------------------------------
// quantile

namespace {

// Smallest integer k with cdf(k) >= u. Walks the pmf recurrence from zero
// when the distribution is short-ranged, otherwise bisects on the cdf.
long discrete_quantile(const Dist& d, double u, double mean, double log_pmf0,
                       double ratio_num(const Dist&, long), long hard_upper) {
    if (mean <= 256.0 && log_pmf0 > -680.0) {
        double pmf = std::exp(log_pmf0);
        double cum = pmf;
        long k = 0;
        const long cap = static_cast<long>(mean + 60.0 * std::sqrt(mean + 1.0)) + 128;
        while (cum < u && k < cap && (hard_upper < 0 || k < hard_upper)) {
            ++k;
            pmf *= ratio_num(d, k);
            cum += pmf;
        }
        if (cum >= u) return k;
        // fell off the walk in the extreme tail; bisection below
    }
    if (cdf(d, 0.0) >= u) return 0;
    long lo = 0, hi = 1;
    while (cdf(d, static_cast<double>(hi)) < u) {
        lo = hi;
        if (hard_upper >= 0 && hi >= hard_upper) return hard_upper;
        hi *= 2;
        if (hi > (1L << 48)) throw NumericError("discrete quantile: search diverged");
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (cdf(d, static_cast<double>(mid)) >= u) hi = mid;
        else lo = mid;
    }
    return hi;
}

double pois_ratio(const Dist& d, long k) {
    return std::get<Poisson>(d).rate / static_cast<double>(k);
}
double binom_ratio(const Dist& d, long k) {
    const auto& b = std::get<Binomial>(d);
    return (static_cast<double>(b.trials - k + 1) / static_cast<double>(k)) *
           (b.prob / (1.0 - b.prob));
}
double nb_ratio(const Dist& d, long k) {
    const auto& nb = std::get<NegBinomial>(d);
    return ((static_cast<double>(k) - 1.0 + nb.successes) / static_cast<double>(k)) *
           (1.0 - nb.prob);
}

struct QuantileVisitor {
    double u;
    const Dist& d;

    double operator()(const Normal& q) const {
        return q.mean + q.sd * std_normal_quantile(u);
    }
    double operator()(const StudentT& q) const {
        return q.loc + q.scale *
               boost::math::quantile(boost::math::students_t_distribution<>(q.df), u);
    }
    double operator()(const Gamma& q) const {
        return boost::math::gamma_p_inv(q.shape, u) / q.rate;
    }
    double operator()(const InverseGamma& q) const {
        return q.scale / boost::math::gamma_q_inv(q.shape, u);
    }
    double operator()(const Beta& q) const {
        return boost::math::ibeta_inv(q.a, q.b, u);
    }
    double operator()(const Uniform& q) const { return q.lo + u * (q.hi - q.lo); }
    double operator()(const Poisson& q) const {
        return static_cast<double>(
            discrete_quantile(d, u, q.rate, -q.rate, pois_ratio, -1));
    }
    double operator()(const Binomial& q) const {
        if (q.prob == 0.0) return 0.0;
        if (q.prob == 1.0) return static_cast<double>(q.trials);
        const double n = static_cast<double>(q.trials);
        return static_cast<double>(discrete_quantile(
            d, u, n * q.prob, n * std::log1p(-q.prob), binom_ratio, q.trials));
    }
    double operator()(const NegBinomial& q) const {
        if (q.prob == 1.0) return 0.0;
        return static_cast<double>(discrete_quantile(
            d, u, q.successes * (1.0 - q.prob) / q.prob,
            q.successes * std::log(q.prob), nb_ratio, -1));
    }
    double operator()(const Bernoulli& q) const {
        return u > 1.0 - q.prob ? 1.0 : 0.0;
    }
    double operator()(const Lomax& q) const {
        return q.scale * std::expm1(-std::log1p(-u) / q.shape);
    }
};

}  // namespace

double quantile(const Dist& d, double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile: u must be in (0,1)");
    return std::visit(QuantileVisitor{u, d}, d);
}

// ---------------------------------------------------------------------------
// sampling

double draw_normal(Rng& rng, double mean, double sd) {
    return mean + sd * std_normal_quantile(rng.uniform());
}

// Marsaglia-Tsang squeeze; shape < 1 boosted via Ga(shape) = Ga(shape+1) U^(1/shape).
double draw_gamma(Rng& rng, double shape, double rate) {
    if (shape < 1.0) {
        const double u = rng.uniform();
        return draw_gamma(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = draw_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double draw_inverse_gamma(Rng& rng, double shape, double scale) {
    return scale / draw_gamma(rng, shape, 1.0);
}

double draw_beta(Rng& rng, double a, double b) {
    const double ga = draw_gamma(rng, a, 1.0);
    const double gb = draw_gamma(rng, b, 1.0);
    if (ga + gb == 0.0) throw NumericError("draw_beta: degenerate gamma pair");
    return ga / (ga + gb);
}

double draw_student_t(Rng& rng, double loc, double scale, double df) {
    return loc + scale *
           boost::math::quantile(boost::math::students_t_distribution<>(df),
                                 rng.uniform());
}

long draw_poisson(Rng& rng, double rate) {
    return static_cast<long>(quantile(Dist{Poisson(rate)}, rng.uniform()));
}

long draw_binomial(Rng& rng, long n, double p) {
    return static_cast<long>(quantile(Dist{Binomial(n, p)}, rng.uniform()));
}

long draw_neg_binomial(Rng& rng, double r, double p) {
    return static_cast<long>(quantile(Dist{NegBinomial(r, p)}, rng.uniform()));
}

std::vector<double> draw_dirichlet(Rng& rng, std::span<const double> shape) {
    std::vector<double> w(shape.size());
    double total = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        w[i] = draw_gamma(rng, shape[i], 1.0);
        total += w[i];
    }
    if (total <= 0.0) throw NumericError("draw_dirichlet: all gamma draws underflowed");
    for (double& v : w) v /= total;
    return w;
}

std::size_t draw_categorical(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        detail::require(w >= 0.0, "draw_categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw NumericError("draw_categorical: all weights zero");
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return i;
    }
    return weights.size() - 1;
}

std::size_t draw_categorical_log(Rng& rng, std::span<const double> logw) {
    double mx = -kInf;
    for (double lw : logw) mx = std::max(mx, lw);
    if (mx == -kInf) throw NumericError("draw_categorical_log: all weights are -inf");
    double total = 0.0;
    for (double lw : logw) total += std::exp(lw - mx);
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i + 1 < logw.size(); ++i) {
        u -= std::exp(logw[i] - mx);
        if (u <= 0.0) return i;
    }
    return logw.size() - 1;
}

namespace {

struct SampleVisitor {
    Rng& rng;
    const Dist& d;

    double operator()(const Normal& s) { return draw_normal(rng, s.mean, s.sd); }
    double operator()(const StudentT& s) {
        return draw_student_t(rng, s.loc, s.scale, s.df);
    }
    double operator()(const Gamma& s) { return draw_gamma(rng, s.shape, s.rate); }
    double operator()(const InverseGamma& s) {
        return draw_inverse_gamma(rng, s.shape, s.scale);
    }
    double operator()(const Beta& s) { return draw_beta(rng, s.a, s.b); }
    double operator()(const Uniform& s) { return rng.uniform(s.lo, s.hi); }
    double operator()(const Poisson&) { return quantile(d, rng.uniform()); }
    double operator()(const Binomial& s) {
        if (s.prob == 0.0) return 0.0;
        if (s.prob == 1.0) return static_cast<double>(s.trials);
        return quantile(d, rng.uniform());
    }
    double operator()(const NegBinomial&) { return quantile(d, rng.uniform()); }
    double operator()(const Bernoulli& s) {
        return rng.uniform() < s.prob ? 1.0 : 0.0;
    }
    double operator()(const Lomax&) { return quantile(d, rng.uniform()); }
};

}  // namespace

double sample(const Dist& d, Rng& rng) { return std::visit(SampleVisitor{rng, d}, d); }

// ---------------------------------------------------------------------------
// support queries

bool is_discrete(const Dist& d) {
    return std::holds_alternative<Poisson>(d) || std::holds_alternative<Binomial>(d) ||
           std::holds_alternative<NegBinomial>(d) || std::holds_alternative<Bernoulli>(d);
}

double support_lower(const Dist& d) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Normal> || std::is_same_v<T, StudentT>)
                return -kInf;
            else if constexpr (std::is_same_v<T, Uniform>)
                return s.lo;
            else if constexpr (std::is_same_v<T, Beta>)
                return 0.0;
            else
                return 0.0;
        },
        d);
}

double support_upper(const Dist& d) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Uniform>)
                return s.hi;
            else if constexpr (std::is_same_v<T, Beta>)
                return 1.0;
            else if constexpr (std::is_same_v<T, Binomial>)
                return static_cast<double>(s.trials);
            else if constexpr (std::is_same_v<T, Bernoulli>)
                return 1.0;
            else
                return kInf;
        },
        d);
}

// ---------------------------------------------------------------------------
// Dirichlet

double log_pdf(const Dirichlet& d, std::span<const double> x) {
    detail::require(x.size() == d.shape.size(), "Dirichlet log_pdf: dimension mismatch");
    double sum = 0.0;
    for (double xi : x) {
        if (xi < 0.0) return -kInf;
        sum += xi;
    }
    if (std::abs(sum - 1.0) > 1e-9) return -kInf;
    double lp = std::lgamma(std::accumulate(d.shape.begin(), d.shape.end(), 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        lp -= std::lgamma(d.shape[i]);
        lp += (d.shape[i] - 1.0) * std::log(x[i]);
    }
    return lp;
}

std::vector<double> sample(const Dirichlet& d, Rng& rng) {
    return draw_dirichlet(rng, d.shape);
}

std::vector<double> mean(const Dirichlet& d) {
    const double total = std::accumulate(d.shape.begin(), d.shape.end(), 0.0);
    std::vector<double> m(d.shape.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = d.shape[i] / total;
    return m;
}

}  // namespace mtd
