#pragma once

// Network interchange document:
//
//   {
//     "variables": [{"id": "Disease", "states": ["yes", "no"]}, ...],
//     "edges":     [["Disease", "Test"], ...],
//     "cuts":      {"Disease": {"": [0.01, 0.99]},
//                   "Test":    {"yes": [0.95, 0.05], "no": [0.02, 0.98]}}
//   }
//
// Row keys are parent state labels joined with '|' in edge order. Doubles are
// written with round-trip precision so load -> save -> load is value-identical.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::bayes {

using Json = nlohmann::ordered_json;

inline constexpr double kRenormalizeWarnDrift = 1e-6;

struct LoadResult {
    CausalNetwork network;
    std::vector<std::string> warnings;
};

inline Json network_to_json(const CausalNetwork& net) {
    Json doc;
    doc["variables"] = Json::array();
    for (const auto& v : net.variables) doc["variables"].push_back({{"id", v.id}, {"states", v.states}});
    doc["edges"] = Json::array();
    for (const auto& e : net.edges) doc["edges"].push_back(Json::array({e.parent, e.child}));
    doc["cuts"] = Json::object();
    for (const auto& c : net.cuts) {
        Json rows = Json::object();
        // Canonical (mixed-radix) order where the structure allows it.
        std::vector<std::string> keys;
        try {
            keys = net.row_keys(c.owner);
        } catch (const Error&) {
        }
        for (const auto& k : keys)
            if (auto it = c.rows.find(k); it != c.rows.end()) rows[k] = it->second;
        for (const auto& [k, row] : c.rows)
            if (!rows.contains(k)) rows[k] = row;
        doc["cuts"][c.owner] = std::move(rows);
    }
    return doc;
}

inline std::string save_network(const CausalNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

// Parses the document structure only; semantic checks are validate_network's
// job. Rows off by more than the validation tolerance are renormalized once,
// with a warning when the drift exceeds 1e-6.
inline LoadResult network_from_json(const Json& doc) {
    LoadResult out;
    try {
        for (const auto& v : doc.at("variables"))
            out.network.add_variable(v.at("id").get<std::string>(), v.at("states").get<std::vector<std::string>>());
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::Parse, "edge must be a [parent, child] pair");
            out.network.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        for (const auto& [owner, rows] : doc.at("cuts").items()) {
            if (!rows.is_object()) throw Error(ErrorCode::Parse, "CUT for '" + owner + "' must be an object");
            if (rows.empty()) out.network.cuts.push_back(Cut{owner, {}});
            for (const auto& [key, row] : rows.items()) {
                auto values = row.get<std::vector<double>>();
                double sum = 0.0;
                bool nonneg = true;
                for (double x : values) {
                    sum += x;
                    nonneg = nonneg && x >= 0.0 && std::isfinite(x);
                }
                double drift = std::abs(sum - 1.0);
                if (nonneg && sum > 0.0 && drift > kRowSumTolerance) {
                    for (double& x : values) x /= sum;
                    if (drift > kRenormalizeWarnDrift)
                        out.warnings.push_back("renormalized row '" + key + "' of '" + owner + "' (sum " +
                                               detail::fmt_number(sum) + ")");
                }
                out.network.set_row(owner, key, std::move(values));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed network document: ") + e.what());
    }
    return out;
}

inline LoadResult load_network(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("network document is not valid JSON: ") + e.what());
    }
    return network_from_json(doc);
}

inline Json evidence_to_json(const Evidence& ev) {
    Json doc = Json::object();
    doc["hard"] = Json::object();
    for (const auto& [k, v] : ev.hard) doc["hard"][k] = v;
    doc["soft"] = Json::object();
    for (const auto& [k, v] : ev.soft) doc["soft"][k] = v;
    return doc;
}

inline Evidence evidence_from_json(const Json& doc) {
    Evidence ev;
    try {
        if (doc.contains("hard"))
            for (const auto& [k, v] : doc.at("hard").items()) ev.hard[k] = v.get<std::string>();
        if (doc.contains("soft"))
            for (const auto& [k, v] : doc.at("soft").items()) ev.soft[k] = v.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed evidence: ") + e.what());
    }
    for (const auto& [k, _] : ev.soft)
        if (ev.hard.count(k)) throw Error(ErrorCode::InvalidArgument, "variable '" + k + "' has both hard and soft evidence");
    return ev;
}

} // namespace epidss::bayes
