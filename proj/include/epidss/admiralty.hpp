#pragma once

// Admiralty-style evidence grading: source reliability (A..F) crossed with
// information credibility (1..6). Grades discount observations into soft
// evidence and sort system states into usable vs. high-risk.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::admiralty {

enum class Reliability : std::uint8_t { A, B, C, D, E, F };
enum class Credibility : std::uint8_t { One, Two, Three, Four, Five, Six };

inline constexpr std::array<std::string_view, 6> kReliabilityLabels = {
    "Completely reliable", "Usually reliable", "Fairly reliable",
    "Not usually reliable", "Unreliable", "Reliability cannot be judged"};
inline constexpr std::array<std::string_view, 6> kCredibilityLabels = {
    "Confirmed by other sources", "Probably true", "Possibly true",
    "Doubtful true", "Improbable", "Truth cannot be judged"};

struct AdmiraltyGrade {
    Reliability reliability = Reliability::F;
    Credibility credibility = Credibility::Six;

    friend auto operator<=>(const AdmiraltyGrade&, const AdmiraltyGrade&) = default;
};

inline std::string to_string(AdmiraltyGrade g) {
    std::string s(2, ' ');
    s[0] = static_cast<char>('A' + static_cast<int>(g.reliability));
    s[1] = static_cast<char>('1' + static_cast<int>(g.credibility));
    return s;
}

inline AdmiraltyGrade parse_grade(std::string_view text) {
    if (text.size() != 2 || text[0] < 'A' || text[0] > 'F' || text[1] < '1' || text[1] > '6')
        throw Error(ErrorCode::Parse, "invalid Admiralty grade '" + std::string(text) + "' (expected A1..F6)");
    return {static_cast<Reliability>(text[0] - 'A'), static_cast<Credibility>(text[1] - '1')};
}

// Every grade on the 6x6 grid, rows A..F, columns 1..6.
inline std::vector<AdmiraltyGrade> all_grades() {
    std::vector<AdmiraltyGrade> out;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) out.push_back({static_cast<Reliability>(r), static_cast<Credibility>(c)});
    return out;
}

// Linear 1.0 -> 0.2 along each judged axis; "cannot be judged" (F, 6) is neutral 0.5.
inline constexpr std::array<double, 6> kReliabilityWeight = {1.0, 0.8, 0.6, 0.4, 0.2, 0.5};
inline constexpr std::array<double, 6> kCredibilityWeight = {1.0, 0.8, 0.6, 0.4, 0.2, 0.5};

inline double grade_weight(AdmiraltyGrade g) noexcept {
    return kReliabilityWeight[static_cast<std::size_t>(g.reliability)] *
           kCredibilityWeight[static_cast<std::size_t>(g.credibility)];
}

using Timestamp = std::chrono::sys_seconds;

inline std::string format_timestamp(Timestamp t) {
    std::time_t tt = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline Timestamp parse_timestamp(const std::string& text) {
    std::tm tm{};
    int y, mo, d, h, mi, s;
    char z = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 || z != 'Z')
        throw Error(ErrorCode::Parse, "invalid timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return Timestamp{std::chrono::seconds{timegm(&tm)}};
}

inline Timestamp now() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

struct GradedEvidence {
    bayes::Evidence evidence;
    AdmiraltyGrade grade;
    std::string source_id;
    Timestamp timestamp{};

    friend bool operator==(const GradedEvidence&, const GradedEvidence&) = default;
};

// Discounts a graded observation into soft evidence with weight w = grade_weight:
// a hard observation of state k becomes likelihood 1 at k and 1-w elsewhere.
// Soft entries are first scaled to max 1 and then discounted the same way,
// l' = w*l + (1-w), which coincides with the hard rule on one-hot input.
inline bayes::Evidence discount_to_likelihood(const GradedEvidence& ge, const bayes::CausalNetwork& net,
                                              double weight) {
    EPIDSS_REQUIRE(weight >= 0.0 && weight <= 1.0, ErrorCode::InvalidArgument, "discount weight outside [0,1]");
    bayes::Evidence out;
    for (const auto& [id, state] : ge.evidence.hard) {
        const auto& var = net.variable(id);
        auto k = var.state_index(state);
        if (!k) throw Error(ErrorCode::UnknownState, "unknown state '" + state + "' for variable '" + id + "'");
        std::vector<double> lik(var.cardinality(), 1.0 - weight);
        lik[*k] = 1.0;
        out.soft[id] = std::move(lik);
    }
    for (const auto& [id, lik] : ge.evidence.soft) {
        const auto& var = net.variable(id);
        if (ge.evidence.hard.count(id))
            throw Error(ErrorCode::InvalidArgument, "variable '" + id + "' has both hard and soft evidence");
        if (lik.size() != var.cardinality())
            throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' has length " +
                                                        std::to_string(lik.size()) + ", expected " +
                                                        std::to_string(var.cardinality()));
        double peak = 0.0;
        for (double x : lik) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' has a negative or non-finite entry");
            peak = std::max(peak, x);
        }
        if (!(peak > 0.0)) throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' is all zero");
        std::vector<double> discounted;
        for (double x : lik) discounted.push_back(weight * (x / peak) + (1.0 - weight));
        out.soft[id] = std::move(discounted);
    }
    return out;
}

inline bayes::Evidence discount_to_likelihood(const GradedEvidence& ge, const bayes::CausalNetwork& net) {
    return discount_to_likelihood(ge, net, grade_weight(ge.grade));
}

// Elementwise product of independent likelihoods on shared variables.
inline bayes::Evidence combine_soft(const bayes::Evidence& a, const bayes::Evidence& b) {
    bayes::Evidence out = a;
    for (const auto& [id, lik] : b.soft) {
        auto it = out.soft.find(id);
        if (it == out.soft.end()) {
            out.soft[id] = lik;
            continue;
        }
        if (it->second.size() != lik.size())
            throw Error(ErrorCode::InvalidArgument, "likelihood length mismatch on '" + id + "'");
        for (std::size_t s = 0; s < lik.size(); ++s) it->second[s] *= lik[s];
    }
    for (const auto& [id, state] : b.hard) out.hard[id] = state;
    return out;
}

struct SystemState {
    std::string id;
    AdmiraltyGrade grade;
};

struct StatePartition {
    std::vector<std::string> usable;
    std::vector<std::string> high_risk;
};

inline bool is_high_risk(AdmiraltyGrade g) noexcept {
    return g.reliability >= Reliability::D || g.credibility >= Credibility::Five;
}

// Partition preserves input order within each side.
inline StatePartition classify_states(const std::vector<SystemState>& states) {
    EPIDSS_REQUIRE(!states.empty(), ErrorCode::InvalidArgument, "no system states to classify");
    std::set<std::string> seen;
    StatePartition out;
    for (const auto& s : states) {
        if (!seen.insert(s.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate state id '" + s.id + "'");
        (is_high_risk(s.grade) ? out.high_risk : out.usable).push_back(s.id);
    }
    return out;
}

} // namespace epidss::admiralty
