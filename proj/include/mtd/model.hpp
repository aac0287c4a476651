#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtd/transitions.hpp"

namespace mtd {

/// First-order strictly stationary mixture transition distribution process of
/// order L: weights on the simplex and one transition component per lag, all
/// sharing a single family tag and a single invariant marginal.
class MtdModel {
public:
    /// Throws std::invalid_argument on weight/component mismatch, weights off
    /// the simplex (1e-12), mixed family tags, or differing invariant
    /// marginals. With verify_invariance set, additionally runs the numeric
    /// invariance check on every component (1e-6 continuous / 1e-10 discrete).
    MtdModel(std::vector<double> weights, std::vector<TransitionFamily> components,
             bool verify_invariance = false);

    int order() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<TransitionFamily>& components() const { return components_; }
    /// lag is 1-based.
    const TransitionFamily& component(int lag) const { return components_.at(lag - 1); }
    bool discrete() const { return is_discrete_family(components_.front()); }
    std::string tag() const { return family_tag(components_.front()); }

private:
    std::vector<double> weights_;
    std::vector<TransitionFamily> components_;
};

/// Mixture transition density at x_t given history (most recent first,
/// length >= L; entries beyond L are ignored).
double transition_log_pdf(const MtdModel& m, double x_t, std::span<const double> history);
double transition_pdf(const MtdModel& m, double x_t, std::span<const double> history);
double transition_cdf(const MtdModel& m, double x_t, std::span<const double> history);

struct SimInit {
    enum class Mode { FromMarginal, Fixed };
    Mode mode = Mode::FromMarginal;
    std::vector<double> values;  // length L when mode == Fixed

    static SimInit from_marginal() { return {}; }
    static SimInit fixed(std::vector<double> v) {
        return {Mode::Fixed, std::move(v)};
    }
};

/// Generates a path of length n. FromMarginal draws x_1 from the invariant
/// marginal and applies the early-time rule for 2 <= t <= L: the lag index is
/// drawn from (w_1, ..., w_{t-2}, 1 - sum_{k<=t-2} w_k), with the residual
/// mass conditioning on x_1 through component t-1. For t > L the lag is drawn
/// from w. Fixed(values) seeds x_1..x_L directly and skips the start-up rule.
std::vector<double> simulate(const MtdModel& m, std::size_t n, Rng& rng,
                             const SimInit& init = SimInit::from_marginal());

/// Conditional log likelihood sum_{t=L+1}^{n} log f(x_t | history). Data
/// outside the family support yields -inf; if diagnostic is non-null it
/// receives the offending index description.
double log_cond_likelihood(const MtdModel& m, std::span<const double> x,
                           std::string* diagnostic = nullptr);

}  // namespace mtd
