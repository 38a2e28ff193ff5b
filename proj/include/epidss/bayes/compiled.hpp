#pragma once

// Index-based, immutable view of a validated CausalNetwork. Inference runs
// on this form; a CompiledNetwork can be shared freely across threads.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::bayes {

class CompiledNetwork {
public:
    explicit CompiledNetwork(const CausalNetwork& net) {
        auto report = validate_network(net);
        if (!report.empty()) throw Error(ErrorCode::InvalidNetwork, to_string(report));

        const std::size_t n = net.variables.size();
        names_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            names_.push_back(net.variables[i].id);
            states_.push_back(net.variables[i].states);
            index_.emplace(net.variables[i].id, i);
        }
        parents_.resize(n);
        children_.resize(n);
        for (const auto& e : net.edges) {
            std::size_t p = index_.at(e.parent), c = index_.at(e.child);
            parents_[c].push_back(p);
            children_[p].push_back(c);
        }
        tables_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Cut& cut = *net.find_cut(names_[i]);
            for (const auto& key : net.row_keys(names_[i])) {
                const auto& row = cut.rows.at(key);
                tables_[i].insert(tables_[i].end(), row.begin(), row.end());
            }
        }
        topo_ = topological_order();
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    std::size_t cardinality(std::size_t i) const { return states_[i].size(); }
    const std::vector<std::string>& states(std::size_t i) const { return states_[i]; }
    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    const std::vector<std::size_t>& topological() const noexcept { return topo_; }

    // Flat CUT: rows in mixed-radix parent order (last parent fastest),
    // each row `cardinality(i)` wide.
    const std::vector<double>& table(std::size_t i) const { return tables_[i]; }

    std::size_t index(std::string_view id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(id) + "'");
        return it->second;
    }

    std::size_t state_index(std::size_t var, std::string_view label) const {
        const auto& s = states_[var];
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] == label) return k;
        throw Error(ErrorCode::UnknownState,
                    "unknown state '" + std::string(label) + "' for variable '" + names_[var] + "'");
    }

    // Row offset of variable `i` given a full assignment (indexed by variable).
    std::size_t row_offset(std::size_t i, std::span<const std::size_t> assignment) const {
        std::size_t row = 0;
        for (std::size_t p : parents_[i]) row = row * cardinality(p) + assignment[p];
        return row * cardinality(i);
    }

    double conditional(std::size_t i, std::span<const std::size_t> assignment) const {
        return tables_[i][row_offset(i, assignment) + assignment[i]];
    }

private:
    std::vector<std::size_t> topological_order() const {
        std::vector<std::size_t> indegree(size(), 0), order;
        for (std::size_t i = 0; i < size(); ++i) indegree[i] = parents_[i].size();
        // Smallest index first keeps the order deterministic.
        std::vector<std::size_t> ready;
        for (std::size_t i = size(); i-- > 0;)
            if (indegree[i] == 0) ready.push_back(i);
        while (!ready.empty()) {
            std::size_t u = ready.back();
            ready.pop_back();
            order.push_back(u);
            for (std::size_t c : children_[u])
                if (--indegree[c] == 0) ready.push_back(c);
        }
        return order;
    }

    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> states_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<double>> tables_;
    std::vector<std::size_t> topo_;
};

// Product of CUT lookups for a full assignment.
inline double joint_probability(const CompiledNetwork& net, const std::map<std::string, std::string>& assignment) {
    std::vector<std::size_t> a(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto it = assignment.find(net.name(i));
        if (it == assignment.end())
            throw Error(ErrorCode::InvalidArgument, "assignment is missing variable '" + net.name(i) + "'");
        a[i] = net.state_index(i, it->second);
    }
    for (const auto& [id, _] : assignment) net.index(id);
    double p = 1.0;
    for (std::size_t i = 0; i < net.size(); ++i) p *= net.conditional(i, a);
    return p;
}

inline double joint_probability(const CausalNetwork& net, const std::map<std::string, std::string>& assignment) {
    return joint_probability(CompiledNetwork(net), assignment);
}

} // namespace epidss::bayes
