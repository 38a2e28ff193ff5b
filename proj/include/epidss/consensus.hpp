#pragma once

// Group consensus over expert posteriors: linear opinion pool plus a
// disagreement measure (largest pairwise total-variation distance).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "epidss/admiralty.hpp"
#include "epidss/error.hpp"

namespace epidss::consensus {

struct ExpertPosterior {
    std::string expert_id;
    std::vector<double> posterior;
    std::variant<double, admiralty::AdmiraltyGrade> weight = 1.0;

    double resolved_weight() const {
        if (const auto* g = std::get_if<admiralty::AdmiraltyGrade>(&weight)) return admiralty::grade_weight(*g);
        return std::get<double>(weight);
    }
};

enum class PoolMethod { Linear };

inline std::vector<double> pool(const std::vector<ExpertPosterior>& experts, PoolMethod method = PoolMethod::Linear) {
    EPIDSS_REQUIRE(method == PoolMethod::Linear, ErrorCode::InvalidArgument, "unsupported pooling method");
    EPIDSS_REQUIRE(!experts.empty(), ErrorCode::InvalidArgument, "pool needs at least one expert");
    const std::size_t len = experts.front().posterior.size();
    double wsum = 0.0;
    for (const auto& e : experts) {
        if (e.posterior.size() != len)
            throw Error(ErrorCode::InvalidArgument, "posterior of expert '" + e.expert_id + "' has length " +
                                                        std::to_string(e.posterior.size()) + ", expected " +
                                                        std::to_string(len));
        double w = e.resolved_weight();
        EPIDSS_REQUIRE(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument,
                       "weight of expert '" + e.expert_id + "' must be >= 0");
        wsum += w;
    }
    EPIDSS_REQUIRE(wsum > 0.0, ErrorCode::InvalidArgument, "all expert weights are zero");

    std::vector<double> out(len, 0.0);
    for (const auto& e : experts) {
        const double w = e.resolved_weight() / wsum;
        for (std::size_t s = 0; s < len; ++s) out[s] += w * e.posterior[s];
    }
    // Unanimous input returns the shared posterior bit-for-bit.
    const bool unanimous = std::all_of(experts.begin(), experts.end(), [&](const ExpertPosterior& e) {
        return e.posterior == experts.front().posterior;
    });
    if (unanimous) return experts.front().posterior;
    double z = 0.0;
    for (double x : out) z += x;
    for (double& x : out) x /= z;
    return out;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    EPIDSS_REQUIRE(p.size() == q.size(), ErrorCode::InvalidArgument, "distributions differ in length");
    double d = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) d += std::abs(p[s] - q[s]);
    return 0.5 * d;
}

inline double conflict(const std::vector<ExpertPosterior>& experts) {
    EPIDSS_REQUIRE(experts.size() >= 2, ErrorCode::InvalidArgument, "conflict needs at least two experts");
    double worst = 0.0;
    for (std::size_t i = 0; i < experts.size(); ++i)
        for (std::size_t j = i + 1; j < experts.size(); ++j)
            worst = std::max(worst, total_variation(experts[i].posterior, experts[j].posterior));
    return std::min(worst, 1.0);
}

} // namespace epidss::consensus
