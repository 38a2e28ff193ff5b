#pragma once

// Shipped outbreak-risk network, WHO strategic preparedness ladder,
// transmissibility/severity staging and the five-sub-index preparedness score.
//
// Template structure:
//
//   ImportedCases ──► LocalTransmission ──► CommunityTransmission ──┐
//   TestingCapacity ─┘                                              ▼
//   Transmissibility ─────────────────────────────────────────► OutbreakRisk
//   Severity ───────────────────────────────────────────────────────┘
//
// The CUT numbers are shipped defaults built to be monotone (more imports or
// weaker testing never lowers local transmission; community transmission,
// transmissibility and severity never lower outbreak risk). They are meant to
// be replaced by users; edit data/outbreak_network.json or install rows from
// an SIR ensemble with bind_ensemble().

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/exact.hpp"
#include "epidss/bayes/network.hpp"
#include "epidss/epi/ensemble.hpp"
#include "epidss/error.hpp"

namespace epidss::preparedness {

namespace node {
inline constexpr const char* ImportedCases = "ImportedCases";
inline constexpr const char* TestingCapacity = "TestingCapacity";
inline constexpr const char* LocalTransmission = "LocalTransmission";
inline constexpr const char* CommunityTransmission = "CommunityTransmission";
inline constexpr const char* Transmissibility = "Transmissibility";
inline constexpr const char* Severity = "Severity";
inline constexpr const char* OutbreakRisk = "OutbreakRisk";
} // namespace node

// Severity-weighted score in [0,1] driving the OutbreakRisk CUT.
inline double outbreak_score(bool community, int transmissibility, int severity) {
    return 0.45 * (community ? 1.0 : 0.0) + 0.30 * (transmissibility - 1) / 4.0 + 0.25 * (severity - 1) / 6.0;
}

inline std::vector<double> outbreak_row(double x) {
    const double low = 0.90 * (1.0 - x) * (1.0 - x);
    const double high = 0.05 + 0.85 * x * x;
    return {low, 1.0 - low - high, high};
}

inline bayes::CausalNetwork default_outbreak_network() {
    using namespace node;
    bayes::CausalNetwork net;
    net.add_variable(ImportedCases, {"none", "few", "many"});
    net.add_variable(TestingCapacity, {"low", "high"});
    net.add_variable(LocalTransmission, {"yes", "no"});
    net.add_variable(CommunityTransmission, {"yes", "no"});
    net.add_variable(Transmissibility, {"1", "2", "3", "4", "5"});
    net.add_variable(Severity, {"1", "2", "3", "4", "5", "6", "7"});
    net.add_variable(OutbreakRisk, {"low", "med", "high"});

    net.add_edge(ImportedCases, LocalTransmission);
    net.add_edge(TestingCapacity, LocalTransmission);
    net.add_edge(LocalTransmission, CommunityTransmission);
    net.add_edge(CommunityTransmission, OutbreakRisk);
    net.add_edge(Transmissibility, OutbreakRisk);
    net.add_edge(Severity, OutbreakRisk);

    net.set_prior(ImportedCases, {0.6, 0.3, 0.1});
    net.set_prior(TestingCapacity, {0.4, 0.6});
    net.set_prior(Transmissibility, {0.30, 0.30, 0.20, 0.12, 0.08});
    net.set_prior(Severity, {0.30, 0.25, 0.18, 0.12, 0.08, 0.05, 0.02});

    net.set_row(LocalTransmission, "none|low", {0.05, 0.95});
    net.set_row(LocalTransmission, "none|high", {0.02, 0.98});
    net.set_row(LocalTransmission, "few|low", {0.45, 0.55});
    net.set_row(LocalTransmission, "few|high", {0.25, 0.75});
    net.set_row(LocalTransmission, "many|low", {0.80, 0.20});
    net.set_row(LocalTransmission, "many|high", {0.60, 0.40});

    // Community transmission presupposes local transmission.
    net.set_row(CommunityTransmission, "yes", {0.40, 0.60});
    net.set_row(CommunityTransmission, "no", {0.0, 1.0});

    for (bool community : {true, false})
        for (int t = 1; t <= 5; ++t)
            for (int s = 1; s <= 7; ++s)
                net.set_row(OutbreakRisk,
                            bayes::join_key({community ? "yes" : "no", std::to_string(t), std::to_string(s)}),
                            outbreak_row(outbreak_score(community, t, s)));
    return net;
}

// Which CUT row(s) an ensemble statistic feeds. An empty row_key overwrites
// every row of the variable, making it independent of its parents.
struct EnsembleBinding {
    std::string variable = node::OutbreakRisk;
    std::string row_key;
    epi::Statistic statistic = epi::Statistic::PeakInfected;
    std::vector<double> thresholds;
};

inline bayes::CausalNetwork bind_ensemble(const bayes::CausalNetwork& net, const EnsembleBinding& binding,
                                          const epi::TrajectoryEnsemble& ens) {
    const auto& var = net.variable(binding.variable);
    if (binding.thresholds.size() + 1 != var.cardinality())
        throw Error(ErrorCode::InvalidArgument, "binding for '" + var.id + "' needs " +
                                                    std::to_string(var.cardinality() - 1) + " thresholds");
    auto row = epi::discretize_to_cpt(ens, binding.statistic, binding.thresholds);
    bayes::CausalNetwork out = net;
    if (binding.row_key.empty()) {
        for (const auto& key : net.row_keys(var.id)) out.set_row(var.id, key, row);
    } else {
        auto keys = net.row_keys(var.id);
        if (std::find(keys.begin(), keys.end(), binding.row_key) == keys.end())
            throw Error(ErrorCode::InvalidArgument, "no row '" + binding.row_key + "' in CUT of '" + var.id + "'");
        out.set_row(var.id, binding.row_key, row);
    }
    return out;
}

enum class WhoLevel { CommunityTransmission = 1, LocalTransmission = 2, ImportedCases = 3, HighRiskImported = 4, Preparedness = 5 };

inline std::string_view to_string(WhoLevel level) {
    switch (level) {
        case WhoLevel::CommunityTransmission: return "community_transmission";
        case WhoLevel::LocalTransmission: return "local_transmission";
        case WhoLevel::ImportedCases: return "imported_cases";
        case WhoLevel::HighRiskImported: return "high_risk_imported";
        case WhoLevel::Preparedness: return "preparedness";
    }
    return "";
}

struct WhoInput {
    bayes::Evidence evidence;                  // hard observations drive the ladder
    bool neighboring_region_high_risk = false; // a neighbouring region reports transmissibility >= 4
};

// First matching rung wins: community > local > imported > high-risk imported > preparedness.
inline WhoLevel who_level(const WhoInput& input, const bayes::CausalNetwork& net = default_outbreak_network()) {
    bayes::CompiledNetwork compiled(net);
    if (!(bayes::evidence_probability(compiled, input.evidence) > 0.0))
        throw Error(ErrorCode::ContradictoryEvidence, "contradictory evidence for WHO level");
    auto is = [&](const char* var, std::string_view state) {
        auto it = input.evidence.hard.find(var);
        return it != input.evidence.hard.end() && it->second == state;
    };
    if (is(node::CommunityTransmission, "yes")) return WhoLevel::CommunityTransmission;
    if (is(node::LocalTransmission, "yes")) return WhoLevel::LocalTransmission;
    if (is(node::ImportedCases, "few") || is(node::ImportedCases, "many")) return WhoLevel::ImportedCases;
    if (input.neighboring_region_high_risk) return WhoLevel::HighRiskImported;
    return WhoLevel::Preparedness;
}

enum class Stage { Early, DataRich };
enum class CoarseScore { LowModerate, ModerateHigh };
enum class ImpactCategory { Low, Moderate, High, Extreme };

inline std::string_view to_string(ImpactCategory c) {
    switch (c) {
        case ImpactCategory::Low: return "low";
        case ImpactCategory::Moderate: return "moderate";
        case ImpactCategory::High: return "high";
        case ImpactCategory::Extreme: return "extreme";
    }
    return "";
}

struct SeverityAssessment {
    Stage stage = Stage::DataRich;
    int transmissibility = 1; // 1..5, data-rich stage
    int severity = 1;         // 1..7, data-rich stage
    CoarseScore coarse_transmissibility = CoarseScore::LowModerate; // early stage
    CoarseScore coarse_severity = CoarseScore::LowModerate;         // early stage
};

inline ImpactCategory severity_stage(const SeverityAssessment& a) {
    if (a.stage == Stage::Early) {
        bool high = a.coarse_transmissibility == CoarseScore::ModerateHigh ||
                    a.coarse_severity == CoarseScore::ModerateHigh;
        return high ? ImpactCategory::High : ImpactCategory::Moderate;
    }
    const int t = a.transmissibility, s = a.severity;
    EPIDSS_REQUIRE(t >= 1 && t <= 5, ErrorCode::InvalidArgument, "transmissibility must be in 1..5");
    EPIDSS_REQUIRE(s >= 1 && s <= 7, ErrorCode::InvalidArgument, "severity must be in 1..7");
    if (t >= 4 && s >= 6) return ImpactCategory::Extreme;
    if (t >= 4 || s >= 5) return ImpactCategory::High;
    if (t <= 2 && s <= 2) return ImpactCategory::Low;
    return ImpactCategory::Moderate;
}

struct EpiSubIndexes {
    double public_health_infrastructure = 0.0;
    double physical_infrastructure = 0.0;
    double institutional_capacity = 0.0;
    double economic_resources = 0.0;
    double public_health_communication = 0.0;

    std::array<double, 5> values() const {
        return {public_health_infrastructure, physical_infrastructure, institutional_capacity, economic_resources,
                public_health_communication};
    }
};

inline double epi_index(const EpiSubIndexes& sub, const std::array<double, 5>& weights) {
    double wsum = 0.0;
    for (double w : weights) {
        EPIDSS_REQUIRE(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument, "EPI weights must be >= 0");
        wsum += w;
    }
    EPIDSS_REQUIRE(std::abs(wsum - 1.0) <= 1e-9, ErrorCode::InvalidArgument, "EPI weights must sum to 1");
    auto v = sub.values();
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        EPIDSS_REQUIRE(v[k] >= 0.0 && v[k] <= 1.0, ErrorCode::InvalidArgument, "EPI sub-indexes must lie in [0,1]");
        acc += weights[k] * v[k];
    }
    return std::clamp(acc, 0.0, 1.0);
}

} // namespace epidss::preparedness
