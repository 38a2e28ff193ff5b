#pragma once

// Exact posterior marginals by variable elimination.
//
// Elimination order is greedy min-fill over the interaction graph, ties
// broken by the lexically smallest variable id. Nodes that are neither the
// query, evidence, nor an ancestor of either are dropped before elimination
// (their CUTs sum to one).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/factor.hpp"
#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::bayes {

// Evidence resolved to one likelihood vector per variable (hard evidence
// becomes a one-hot vector); variables without evidence hold nullopt.
using ResolvedEvidence = std::vector<std::optional<std::vector<double>>>;

inline ResolvedEvidence resolve_evidence(const CompiledNetwork& net, const Evidence& ev) {
    ResolvedEvidence out(net.size());
    for (const auto& [id, state] : ev.hard) {
        std::size_t v = net.index(id);
        std::vector<double> l(net.cardinality(v), 0.0);
        l[net.state_index(v, state)] = 1.0;
        out[v] = std::move(l);
    }
    for (const auto& [id, lik] : ev.soft) {
        std::size_t v = net.index(id);
        if (out[v])
            throw Error(ErrorCode::InvalidArgument, "variable '" + id + "' has both hard and soft evidence");
        if (lik.size() != net.cardinality(v))
            throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' has length " +
                                                        std::to_string(lik.size()) + ", expected " +
                                                        std::to_string(net.cardinality(v)));
        bool positive = false;
        for (double x : lik) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' has a negative or non-finite entry");
            positive = positive || x > 0.0;
        }
        if (!positive) throw Error(ErrorCode::InvalidArgument, "likelihood for '" + id + "' is all zero");
        out[v] = lik;
    }
    return out;
}

struct EliminationPlan {
    std::vector<std::size_t> order;
    std::size_t width = 0; // largest (neighbours of an eliminated node), i.e. induced width
};

namespace detail {

// Greedy min-fill over an undirected graph restricted to `active` nodes,
// eliminating every active node not in `keep`.
inline EliminationPlan min_fill(const CompiledNetwork& net, std::vector<std::set<std::size_t>> adj,
                                const std::vector<bool>& active, const std::vector<bool>& keep) {
    EliminationPlan plan;
    std::vector<bool> done(net.size(), false);
    std::size_t remaining = 0;
    for (std::size_t v = 0; v < net.size(); ++v)
        if (active[v] && !keep[v]) ++remaining;

    while (remaining > 0) {
        std::optional<std::size_t> best;
        std::size_t best_fill = 0;
        for (std::size_t v = 0; v < net.size(); ++v) {
            if (!active[v] || keep[v] || done[v]) continue;
            std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
            std::size_t fill = 0;
            for (std::size_t a = 0; a < nb.size(); ++a)
                for (std::size_t b = a + 1; b < nb.size(); ++b)
                    if (!adj[nb[a]].count(nb[b])) ++fill;
            if (!best || fill < best_fill || (fill == best_fill && net.name(v) < net.name(*best))) {
                best = v;
                best_fill = fill;
            }
        }
        std::size_t v = *best;
        std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
        plan.width = std::max(plan.width, nb.size());
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                adj[nb[a]].insert(nb[b]);
                adj[nb[b]].insert(nb[a]);
            }
        for (std::size_t u : nb) adj[u].erase(v);
        adj[v].clear();
        done[v] = true;
        plan.order.push_back(v);
        --remaining;
    }
    return plan;
}

inline std::vector<bool> ancestral_closure(const CompiledNetwork& net, std::vector<std::size_t> seeds) {
    std::vector<bool> in(net.size(), false);
    while (!seeds.empty()) {
        std::size_t v = seeds.back();
        seeds.pop_back();
        if (in[v]) continue;
        in[v] = true;
        for (std::size_t p : net.parents(v)) seeds.push_back(p);
    }
    return in;
}

inline Factor cut_factor(const CompiledNetwork& net, std::size_t v) {
    Factor f;
    for (std::size_t p : net.parents(v)) {
        f.vars.push_back(p);
        f.cards.push_back(net.cardinality(p));
    }
    f.vars.push_back(v);
    f.cards.push_back(net.cardinality(v));
    f.values = net.table(v);
    return f;
}

// Eliminates every relevant variable except `keep` (may be empty) and
// returns the product of what is left: an unnormalized factor over `keep`.
inline Factor eliminate_all_but(const CompiledNetwork& net, const ResolvedEvidence& ev,
                                const std::vector<std::size_t>& keep_vars) {
    std::vector<std::size_t> seeds = keep_vars;
    for (std::size_t v = 0; v < net.size(); ++v)
        if (ev[v]) seeds.push_back(v);
    auto active = ancestral_closure(net, seeds);

    std::vector<Factor> factors;
    std::vector<std::set<std::size_t>> adj(net.size());
    for (std::size_t v = 0; v < net.size(); ++v) {
        if (!active[v]) continue;
        factors.push_back(cut_factor(net, v));
        const auto& vars = factors.back().vars;
        for (std::size_t a : vars)
            for (std::size_t b : vars)
                if (a != b) adj[a].insert(b);
        if (ev[v]) factors.push_back(Factor{{v}, {net.cardinality(v)}, *ev[v]});
    }

    std::vector<bool> keep(net.size(), false);
    for (std::size_t v : keep_vars) keep[v] = true;
    auto plan = min_fill(net, std::move(adj), active, keep);

    for (std::size_t v : plan.order) {
        Factor acc{{}, {}, {1.0}};
        std::vector<Factor> rest;
        for (auto& f : factors) {
            if (f.contains(v))
                acc = multiply(acc, f);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(sum_out(acc, v));
        factors = std::move(rest);
    }
    Factor result{{}, {}, {1.0}};
    for (const auto& f : factors) result = multiply(result, f);
    return result;
}

inline std::vector<std::set<std::size_t>> moral_graph(const CompiledNetwork& net) {
    std::vector<std::set<std::size_t>> adj(net.size());
    for (std::size_t v = 0; v < net.size(); ++v) {
        std::vector<std::size_t> family = net.parents(v);
        family.push_back(v);
        for (std::size_t a : family)
            for (std::size_t b : family)
                if (a != b) adj[a].insert(b);
    }
    return adj;
}

} // namespace detail

// Posterior over `query`'s states given evidence; sums to one.
inline std::vector<double> posterior_exact(const CompiledNetwork& net, const Evidence& ev, std::string_view query) {
    std::size_t q = net.index(query);
    if (ev.hard.count(std::string(query)))
        throw Error(ErrorCode::InvalidArgument, "query variable '" + std::string(query) + "' is in hard evidence");
    auto resolved = resolve_evidence(net, ev);
    Factor f = detail::eliminate_all_but(net, resolved, {q});

    // f ranges over {q} alone.
    std::vector<double> out(net.cardinality(q), 0.0);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = f.values[s];
    double z = 0.0;
    for (double x : out) z += x;
    if (!(z > 0.0))
        throw Error(ErrorCode::ContradictoryEvidence, "evidence has zero probability (contradictory evidence set)");
    for (double& x : out) x /= z;
    return out;
}

inline std::vector<double> posterior_exact(const CausalNetwork& net, const Evidence& ev, std::string_view query) {
    return posterior_exact(CompiledNetwork(net), ev, query);
}

// P(evidence), with soft likelihoods entering as multiplicative factors.
inline double evidence_probability(const CompiledNetwork& net, const Evidence& ev) {
    auto resolved = resolve_evidence(net, ev);
    return detail::eliminate_all_but(net, resolved, {}).values.at(0);
}

// Posterior for every variable. Hard-evidence variables get a one-hot vector.
inline std::map<std::string, std::vector<double>> posterior_marginals(const CompiledNetwork& net, const Evidence& ev) {
    std::map<std::string, std::vector<double>> out;
    if (!(evidence_probability(net, ev) > 0.0))
        throw Error(ErrorCode::ContradictoryEvidence, "evidence has zero probability (contradictory evidence set)");
    for (std::size_t v = 0; v < net.size(); ++v) {
        auto hard = ev.hard.find(net.name(v));
        if (hard != ev.hard.end()) {
            std::vector<double> onehot(net.cardinality(v), 0.0);
            onehot[net.state_index(v, hard->second)] = 1.0;
            out[net.name(v)] = std::move(onehot);
        } else {
            out[net.name(v)] = posterior_exact(net, ev, net.name(v));
        }
    }
    return out;
}

// Induced width of a min-fill elimination of the whole moral graph.
inline std::size_t elimination_width(const CompiledNetwork& net) {
    auto adj = detail::moral_graph(net);
    std::vector<bool> active(net.size(), true), keep(net.size(), false);
    return detail::min_fill(net, std::move(adj), active, keep).width;
}

inline EliminationPlan elimination_plan(const CompiledNetwork& net, std::string_view query) {
    auto adj = detail::moral_graph(net);
    std::vector<bool> active(net.size(), true), keep(net.size(), false);
    keep[net.index(query)] = true;
    return detail::min_fill(net, std::move(adj), active, keep);
}

} // namespace epidss::bayes
