#pragma once

// Discrete causal network: variables, parent->child edges and one
// conditional table (CUT) per variable, keyed by the parents' joint state.
//
// CausalNetwork is the editable value type. It may hold an invalid
// structure (duplicates, cycles, missing rows) so that validate_network()
// can report every violation; inference compiles it first.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epidss/error.hpp"

namespace epidss::bayes {

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr char kKeySeparator = '|';

struct Variable {
    std::string id;
    std::vector<std::string> states;

    std::size_t cardinality() const noexcept { return states.size(); }

    std::optional<std::size_t> state_index(std::string_view label) const {
        auto it = std::find(states.begin(), states.end(), label);
        if (it == states.end()) return std::nullopt;
        return static_cast<std::size_t>(it - states.begin());
    }

    friend bool operator==(const Variable&, const Variable&) = default;
};

struct Edge {
    std::string parent;
    std::string child;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Row key -> distribution over the owner's states. Keys are the parent
// state labels joined with '|' in parent order; a root has the single key "".
struct Cut {
    std::string owner;
    std::map<std::string, std::vector<double>> rows;

    friend bool operator==(const Cut&, const Cut&) = default;
};

inline std::string join_key(const std::vector<std::string>& labels) {
    std::string key;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) key += kKeySeparator;
        key += labels[i];
    }
    return key;
}

class CausalNetwork {
public:
    std::vector<Variable> variables;
    std::vector<Edge> edges;
    std::vector<Cut> cuts;

    CausalNetwork& add_variable(std::string id, std::vector<std::string> states) {
        variables.push_back(Variable{std::move(id), std::move(states)});
        return *this;
    }

    CausalNetwork& add_edge(std::string parent, std::string child) {
        edges.push_back(Edge{std::move(parent), std::move(child)});
        return *this;
    }

    // Sets one row of `owner`'s CUT, creating the CUT on first use.
    CausalNetwork& set_row(const std::string& owner, const std::string& key, std::vector<double> row) {
        cut_for(owner).rows[key] = std::move(row);
        return *this;
    }

    CausalNetwork& set_prior(const std::string& owner, std::vector<double> row) {
        return set_row(owner, "", std::move(row));
    }

    const Variable* find_variable(std::string_view id) const {
        for (const auto& v : variables)
            if (v.id == id) return &v;
        return nullptr;
    }

    const Variable& variable(std::string_view id) const {
        const Variable* v = find_variable(id);
        if (!v) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(id) + "'");
        return *v;
    }

    const Cut* find_cut(std::string_view owner) const {
        for (const auto& c : cuts)
            if (c.owner == owner) return &c;
        return nullptr;
    }

    // Parents in edge declaration order; this order defines CUT row keys.
    std::vector<std::string> parents_of(std::string_view child) const {
        std::vector<std::string> out;
        for (const auto& e : edges)
            if (e.child == child) out.push_back(e.parent);
        return out;
    }

    std::vector<std::string> children_of(std::string_view parent) const {
        std::vector<std::string> out;
        for (const auto& e : edges)
            if (e.parent == parent) out.push_back(e.child);
        return out;
    }

    // All row keys of `owner`'s CUT in mixed-radix order (last parent fastest).
    std::vector<std::string> row_keys(std::string_view owner) const {
        std::vector<const Variable*> parents;
        for (const auto& p : parents_of(owner)) parents.push_back(&variable(p));
        std::vector<std::string> keys;
        for (const auto* p : parents)
            if (p->states.empty()) return keys;
        std::vector<std::size_t> digit(parents.size(), 0);
        while (true) {
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < parents.size(); ++i) labels.push_back(parents[i]->states[digit[i]]);
            keys.push_back(join_key(labels));
            std::size_t pos = parents.size();
            while (pos > 0) {
                --pos;
                if (++digit[pos] < parents[pos]->cardinality()) break;
                digit[pos] = 0;
                if (pos == 0) return keys;
            }
            if (parents.empty()) return keys;
        }
    }

    friend bool operator==(const CausalNetwork&, const CausalNetwork&) = default;

private:
    Cut& cut_for(const std::string& owner) {
        for (auto& c : cuts)
            if (c.owner == owner) return c;
        cuts.push_back(Cut{owner, {}});
        return cuts.back();
    }
};

// Hard observations name a state; soft ones carry a likelihood vector
// (non-negative, not all zero, not necessarily normalized).
struct Evidence {
    std::map<std::string, std::string> hard;
    std::map<std::string, std::vector<double>> soft;

    bool empty() const noexcept { return hard.empty() && soft.empty(); }

    friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct Violation {
    std::string variable;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline std::string fmt_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline bool has_cycle(const CausalNetwork& net, std::string& witness) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : net.edges) adj[e.parent].push_back(e.child);
    std::map<std::string, int> color; // 0 white, 1 grey, 2 black
    bool found = false;
    auto visit = [&](auto&& self, const std::string& u) -> void {
        color[u] = 1;
        for (const auto& w : adj[u]) {
            if (found) return;
            if (color[w] == 1) {
                found = true;
                witness = w;
                return;
            }
            if (color[w] == 0) self(self, w);
        }
        color[u] = 2;
    };
    for (const auto& [u, _] : adj) {
        if (found) break;
        if (color[u] == 0) visit(visit, u);
    }
    return found;
}

} // namespace detail

inline std::string to_string(const ValidationReport& report) {
    std::string out;
    for (const auto& v : report) {
        if (!out.empty()) out += "; ";
        out += v.variable.empty() ? v.message : v.variable + ": " + v.message;
    }
    return out;
}

// Empty report iff the network is well formed.
inline ValidationReport validate_network(const CausalNetwork& net) {
    ValidationReport report;
    auto add = [&](const std::string& var, std::string msg) { report.push_back({var, std::move(msg)}); };

    std::set<std::string> ids;
    for (const auto& v : net.variables) {
        if (v.id.empty()) add(v.id, "empty variable id");
        if (!ids.insert(v.id).second) add(v.id, "duplicate variable id");
        if (v.states.size() < 2) add(v.id, "fewer than 2 states");
        std::set<std::string> labels;
        for (const auto& s : v.states) {
            if (!labels.insert(s).second) add(v.id, "duplicate state label '" + s + "'");
            if (s.empty()) add(v.id, "empty state label");
            if (s.find(kKeySeparator) != std::string::npos) add(v.id, "state label '" + s + "' contains '|'");
        }
    }

    std::set<std::pair<std::string, std::string>> seen_edges;
    bool edges_ok = true;
    for (const auto& e : net.edges) {
        if (!ids.count(e.parent) || !ids.count(e.child)) {
            add(ids.count(e.child) ? e.parent : e.child, "edge " + e.parent + "->" + e.child + " references unknown variable");
            edges_ok = false;
        }
        if (e.parent == e.child) add(e.child, "self loop");
        if (!seen_edges.insert({e.parent, e.child}).second) add(e.child, "duplicate edge " + e.parent + "->" + e.child);
    }
    std::string witness;
    if (detail::has_cycle(net, witness)) add(witness, "cycle detected");

    std::map<std::string, int> cut_count;
    for (const auto& c : net.cuts) {
        ++cut_count[c.owner];
        if (!ids.count(c.owner)) add(c.owner, "CUT for unknown variable");
    }
    for (const auto& v : net.variables) {
        int n = cut_count[v.id];
        if (n == 0) add(v.id, "missing CUT");
        if (n > 1) add(v.id, "more than one CUT");
    }
    if (!edges_ok) return report;

    for (const auto& v : net.variables) {
        const Cut* cut = net.find_cut(v.id);
        if (!cut || cut_count[v.id] != 1) continue;
        std::size_t expected_rows = 1;
        for (const auto& p : net.parents_of(v.id)) expected_rows *= net.variable(p).cardinality();
        if (cut->rows.size() != expected_rows)
            add(v.id, "row count " + std::to_string(cut->rows.size()) + " != " + std::to_string(expected_rows));
        std::set<std::string> wanted;
        for (auto& k : net.row_keys(v.id)) wanted.insert(std::move(k));
        for (const auto& k : wanted)
            if (!cut->rows.count(k)) add(v.id, "missing row '" + k + "'");
        for (const auto& [key, row] : cut->rows) {
            if (!wanted.count(key)) add(v.id, "unexpected row '" + key + "'");
            if (row.size() != v.cardinality()) {
                add(v.id, "row '" + key + "' has " + std::to_string(row.size()) + " entries, expected " +
                              std::to_string(v.cardinality()));
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range) add(v.id, "row '" + key + "' has entries outside [0,1]");
            if (!(std::abs(sum - 1.0) <= kRowSumTolerance))
                add(v.id, "row sum " + detail::fmt_number(sum) + " ≠ 1");
        }
    }
    return report;
}

inline bool is_valid(const CausalNetwork& net) { return validate_network(net).empty(); }

} // namespace epidss::bayes
