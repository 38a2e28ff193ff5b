#pragma once

// Risk as expected cost over a posterior, bias of repeated estimates against a
// reference, expected-shortfall tail risk, and sequential re-assessment as
// graded observations arrive.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epidss/admiralty.hpp"
#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/exact.hpp"
#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::risk {

inline constexpr double kBiasTolerance = 1e-9;

// variable id -> state -> non-negative cost (abstract loss units).
struct CostModel {
    std::map<std::string, std::map<std::string, double>> costs;

    CostModel& set(const std::string& var, const std::string& state, double cost) {
        EPIDSS_REQUIRE(std::isfinite(cost) && cost >= 0.0, ErrorCode::InvalidArgument,
                       "cost for " + var + "=" + state + " must be finite and >= 0");
        costs[var][state] = cost;
        return *this;
    }

    std::optional<double> cost(const std::string& var, const std::string& state) const {
        auto v = costs.find(var);
        if (v == costs.end()) return std::nullopt;
        auto s = v->second.find(state);
        if (s == v->second.end()) return std::nullopt;
        return s->second;
    }

    CostModel scaled(double a) const {
        CostModel out = *this;
        for (auto& [_, states] : out.costs)
            for (auto& [__, c] : states) c *= a;
        return out;
    }

    friend bool operator==(const CostModel&, const CostModel&) = default;
};

struct StateContribution {
    std::string state;
    double cost = 0.0;
    double probability = 0.0;
    double contribution = 0.0;
};

struct TailRisk {
    double value = 0.0;    // mean of samples at or above the q-quantile
    double quantile = 0.0; // the interpolated q-quantile itself
    double q = 0.0;
    bool fallback = false; // too few samples to interpolate; value is the max
};

struct RiskAssessment {
    std::string variable;
    double risk = 0.0;
    std::vector<StateContribution> contributions;
    std::vector<double> posterior;
    std::optional<TailRisk> tail;
};

// risk = sum_s cost(s) * P(s).
inline RiskAssessment risk_score(const CostModel& cost, std::span<const double> posterior, const bayes::Variable& var) {
    EPIDSS_REQUIRE(posterior.size() == var.cardinality(), ErrorCode::InvalidArgument,
                   "posterior length does not match '" + var.id + "'");
    RiskAssessment out;
    out.variable = var.id;
    out.posterior.assign(posterior.begin(), posterior.end());
    for (std::size_t s = 0; s < var.cardinality(); ++s) {
        auto c = cost.cost(var.id, var.states[s]);
        if (!c) throw Error(ErrorCode::InvalidArgument, "no cost for " + var.id + "=" + var.states[s]);
        EPIDSS_REQUIRE(std::isfinite(*c) && *c >= 0.0, ErrorCode::InvalidArgument,
                       "cost for " + var.id + "=" + var.states[s] + " must be finite and >= 0");
        double contribution = *c * posterior[s];
        out.contributions.push_back({var.states[s], *c, posterior[s], contribution});
        out.risk += contribution;
    }
    return out;
}

enum class BiasDirection { Over, Under, None };

inline const char* to_string(BiasDirection d) {
    switch (d) {
        case BiasDirection::Over: return "over";
        case BiasDirection::Under: return "under";
        case BiasDirection::None: return "none";
    }
    return "none";
}

struct BiasReport {
    double mean_error = 0.0;
    BiasDirection direction = BiasDirection::None;
    std::size_t count = 0;
};

inline BiasReport bias_estimate(std::span<const double> estimates, double reference) {
    EPIDSS_REQUIRE(!estimates.empty(), ErrorCode::InvalidArgument, "bias needs at least one estimate");
    double sum = 0.0;
    for (double e : estimates) sum += e;
    BiasReport r;
    r.count = estimates.size();
    r.mean_error = sum / static_cast<double>(estimates.size()) - reference;
    if (r.mean_error > kBiasTolerance)
        r.direction = BiasDirection::Over;
    else if (r.mean_error < -kBiasTolerance)
        r.direction = BiasDirection::Under;
    return r;
}

// Expected shortfall: mean of the samples >= the q-quantile, where the
// quantile interpolates linearly between order statistics at h = (n-1)q.
inline TailRisk tail_risk(std::span<const double> samples, double q) {
    EPIDSS_REQUIRE(!samples.empty(), ErrorCode::InvalidArgument, "tail risk needs at least one sample");
    EPIDSS_REQUIRE(q > 0.0 && q < 1.0, ErrorCode::InvalidArgument, "quantile level must be in (0,1)");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    TailRisk out;
    out.q = q;
    if (sorted.size() < 2) {
        out.value = out.quantile = sorted.back();
        out.fallback = true;
        return out;
    }
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    out.quantile = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    auto first = std::lower_bound(sorted.begin(), sorted.end(), out.quantile);
    double sum = 0.0;
    for (auto it = first; it != sorted.end(); ++it) sum += *it;
    out.value = sum / static_cast<double>(sorted.end() - first);
    return out;
}

// Raised when an observation drives the evidence probability to zero.
class ContradictionError : public Error {
public:
    ContradictionError(std::size_t index, const std::string& message)
        : Error(ErrorCode::ContradictoryEvidence, message), index_(index) {}

    // Zero-based position of the first offending observation.
    std::size_t observation_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// Accumulated soft evidence after discounting every observation by its grade.
inline bayes::Evidence accumulate_evidence(const bayes::CausalNetwork& net,
                                           const std::vector<admiralty::GradedEvidence>& observations) {
    bayes::Evidence acc;
    for (const auto& ge : observations) acc = admiralty::combine_soft(acc, admiralty::discount_to_likelihood(ge, net));
    return acc;
}

// Posterior of `query` before any observation and after each one.
inline std::vector<std::vector<double>> sequential_adjust(const bayes::CausalNetwork& net,
                                                          const std::vector<admiralty::GradedEvidence>& observations,
                                                          const std::string& query) {
    bayes::CompiledNetwork compiled(net);
    std::vector<std::vector<double>> snapshots;
    bayes::Evidence acc;
    snapshots.push_back(bayes::posterior_exact(compiled, acc, query));
    for (std::size_t i = 0; i < observations.size(); ++i) {
        acc = admiralty::combine_soft(acc, admiralty::discount_to_likelihood(observations[i], net));
        bool zero_row = false;
        for (const auto& [_, lik] : acc.soft)
            zero_row = zero_row || std::all_of(lik.begin(), lik.end(), [](double x) { return x == 0.0; });
        if (zero_row || !(bayes::evidence_probability(compiled, acc) > 0.0))
            throw ContradictionError(i, "observation " + std::to_string(i) + " from '" + observations[i].source_id +
                                            "' makes the evidence set contradictory (zero probability)");
        snapshots.push_back(bayes::posterior_exact(compiled, acc, query));
    }
    return snapshots;
}

} // namespace epidss::risk
