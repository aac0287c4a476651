#include "mtd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mtd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp_inplace(std::vector<double>& terms) {
    double mx = -kInf;
    for (double t : terms) mx = std::max(mx, t);
    if (mx == -kInf) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    return mx + std::log(s);
}

}  // namespace

MtdModel::MtdModel(std::vector<double> weights, std::vector<TransitionFamily> components,
                   bool verify_invariance)
    : weights_(std::move(weights)), components_(std::move(components)) {
    detail::require(!weights_.empty(), "MtdModel: order must be >= 1");
    detail::require(weights_.size() == components_.size(),
                    "MtdModel: weights and components must have equal length");
    double total = 0.0;
    for (double w : weights_) {
        detail::require(w >= 0.0, "MtdModel: weights must be nonnegative");
        total += w;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "MtdModel: weights must sum to 1");
    for (std::size_t l = 1; l < components_.size(); ++l) {
        detail::require(components_[l].index() == components_[0].index(),
                        "MtdModel: all components must share one family");
        detail::require(same_marginal(components_[0], components_[l]),
                        "MtdModel: components must share the invariant marginal");
    }
    if (verify_invariance) {
        const double tol = is_discrete_family(components_[0]) ? 1e-10 : 1e-6;
        for (std::size_t l = 0; l < components_.size(); ++l) {
            const double resid = check_invariance(components_[l], tol);
            detail::require(resid < tol,
                            "MtdModel: component " + std::to_string(l + 1) +
                                " fails the invariance check");
        }
    }
}

namespace {

void check_history(const MtdModel& m, std::span<const double> history) {
    if (history.size() < static_cast<std::size_t>(m.order()))
        throw std::invalid_argument("MtdModel: history must hold at least L values");
}

}  // namespace

double transition_log_pdf(const MtdModel& m, double x_t, std::span<const double> history) {
    check_history(m, history);
    const int L = m.order();
    std::vector<double> terms(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        const double w = m.weights()[l];
        terms[l] = w > 0.0
                       ? std::log(w) + trans_log_pdf(m.components()[l], x_t, history[l])
                       : -kInf;
    }
    return logsumexp_inplace(terms);
}

double transition_pdf(const MtdModel& m, double x_t, std::span<const double> history) {
    return std::exp(transition_log_pdf(m, x_t, history));
}

double transition_cdf(const MtdModel& m, double x_t, std::span<const double> history) {
    check_history(m, history);
    double acc = 0.0;
    for (int l = 0; l < m.order(); ++l) {
        const double w = m.weights()[l];
        if (w > 0.0) acc += w * trans_cdf(m.components()[l], x_t, history[l]);
    }
    return std::min(acc, 1.0);
}

std::vector<double> simulate(const MtdModel& m, std::size_t n, Rng& rng,
                             const SimInit& init) {
    const std::size_t L = static_cast<std::size_t>(m.order());
    std::vector<double> x(n);
    if (n == 0) return x;

    std::size_t start;  // first index generated by the stationary kernel
    if (init.mode == SimInit::Mode::Fixed) {
        if (init.values.size() != L)
            throw std::invalid_argument("simulate: Fixed init must supply exactly L values");
        for (std::size_t t = 0; t < std::min(L, n); ++t) x[t] = init.values[t];
        start = L;
    } else {
        x[0] = marginal_sample(m.components().front(), rng);
        // early-time rule: residual weight mass rides on lag t-1, which
        // conditions on x_1
        for (std::size_t t = 2; t <= std::min(L, n); ++t) {
            std::vector<double> w(t - 1);
            double used = 0.0;
            for (std::size_t k = 0; k + 1 < t - 1; ++k) {
                w[k] = m.weights()[k];
                used += w[k];
            }
            w[t - 2] = 1.0 - used;
            const std::size_t lag = draw_categorical(rng, w) + 1;  // 1..t-1
            x[t - 1] = trans_sample(m.components()[lag - 1], x[t - 1 - lag], rng);
        }
        start = L;
    }
    for (std::size_t t = start; t < n; ++t) {
        const std::size_t lag = draw_categorical(rng, m.weights()) + 1;
        x[t] = trans_sample(m.components()[lag - 1], x[t - lag], rng);
    }
    return x;
}

double log_cond_likelihood(const MtdModel& m, std::span<const double> x,
                           std::string* diagnostic) {
    const std::size_t L = static_cast<std::size_t>(m.order());
    if (x.size() <= L)
        throw std::invalid_argument("log_cond_likelihood: need more than L observations");
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!in_support(m.components().front(), x[t])) {
            if (diagnostic)
                *diagnostic = "observation " + std::to_string(t + 1) +
                              " outside the state space of " + m.tag();
            return -kInf;
        }
    }
    double acc = 0.0;
    std::vector<double> terms(L);
    for (std::size_t t = L; t < x.size(); ++t) {
        for (std::size_t l = 0; l < L; ++l) {
            const double w = m.weights()[l];
            terms[l] = w > 0.0 ? std::log(w) + trans_log_pdf(m.components()[l], x[t],
                                                             x[t - 1 - l])
                               : -kInf;
        }
        acc += logsumexp_inplace(terms);
    }
    return acc;
}

}  // namespace mtd
