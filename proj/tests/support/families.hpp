#pragma once

// Deterministic valid parameter-set generators for the eight transition
// families, used by property tests and the acceptance suite.

#include <string>
#include <vector>

#include "mtd/rng.hpp"
#include "mtd/transitions.hpp"

namespace testsup {

inline mtd::TransitionFamily random_family(const std::string& tag, mtd::Rng& rng) {
    using namespace mtd;
    auto u = [&](double lo, double hi) { return rng.uniform(lo, hi); };
    if (tag == "gaussian") return GaussianT(u(-5, 15), u(0.25, 36), u(-0.9, 0.9));
    if (tag == "student_t") return StudentTT(u(-5, 5), u(0.5, 3), u(3, 15), u(-0.9, 0.9));
    if (tag == "poisson") return PoissonT(u(0.3, 5), u(0.3, 5));
    if (tag == "negbin") return NegBinT(u(0.3, 2.5), u(0.3, 2.5), u(0.5, 4), u(0.5, 4));
    if (tag == "bernoulli") {
        const double p1 = u(0.05, 0.6);
        return BernoulliT(p1, u(0.02, 0.49 * (1.0 - p1)));
    }
    if (tag == "binomial") {
        const long n = 1 + static_cast<long>(u(0.0, 15.0));
        const double p1 = u(0.05, 0.6);
        return BinomialT(n, p1, u(0.02, 0.49 * (1.0 - p1)));
    }
    if (tag == "lomax") {
        // alternate the closed-form special case with the general construction
        if (rng.uniform() < 0.5) return LomaxT::special_case(u(1, 20), u(1.5, 6));
        return LomaxT(u(0.5, 5), u(0.5, 4), u(0.1, 3), u(0.7, 5));
    }
    if (tag == "gamma") return GammaT(u(0.7, 4), u(0.3, 3), u(0.1, 2));
    throw std::invalid_argument("random_family: unknown tag " + tag);
}

inline const std::vector<std::string>& all_family_tags() {
    static const std::vector<std::string> tags = {
        "gaussian", "student_t", "poisson", "negbin",
        "bernoulli", "binomial", "lomax", "gamma"};
    return tags;
}

}  // namespace testsup
