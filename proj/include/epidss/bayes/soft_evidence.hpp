#pragma once

// Pearl virtual evidence: an uncertain observation on `var` becomes a new
// binary child whose "observed" column is the normalized likelihood.
// Conditioning that child on "observed" multiplies the joint by the
// likelihood, which is exactly what a soft Evidence entry does.

#include <cmath>
#include <string>
#include <vector>

#include "epidss/bayes/network.hpp"
#include "epidss/error.hpp"

namespace epidss::bayes {

inline constexpr const char* kVirtualObserved = "observed";
inline constexpr const char* kVirtualUnobserved = "not_observed";

struct VirtualEvidence {
    CausalNetwork network;
    std::string node;                             // the fresh virtual child
    std::string observed_state = kVirtualObserved;

    // Hard evidence that activates the virtual observation.
    Evidence activation() const {
        Evidence ev;
        ev.hard[node] = observed_state;
        return ev;
    }
};

inline VirtualEvidence apply_soft_evidence(const CausalNetwork& net, const std::string& var,
                                           const std::vector<double>& likelihood) {
    const Variable& target = net.variable(var);
    if (likelihood.size() != target.cardinality())
        throw Error(ErrorCode::InvalidArgument, "likelihood for '" + var + "' has length " +
                                                    std::to_string(likelihood.size()) + ", expected " +
                                                    std::to_string(target.cardinality()));
    double total = 0.0;
    for (double x : likelihood) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw Error(ErrorCode::InvalidArgument, "likelihood for '" + var + "' has a negative or non-finite entry");
        total += x;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "likelihood for '" + var + "' is all zero");

    VirtualEvidence out{net, {}};
    std::string base = "virtual_" + var;
    std::string name = base;
    for (int k = 1; net.find_variable(name); ++k) name = base + "_" + std::to_string(k);
    out.node = name;

    out.network.add_variable(name, {kVirtualObserved, kVirtualUnobserved});
    out.network.add_edge(var, name);
    for (std::size_t s = 0; s < target.cardinality(); ++s) {
        double p = likelihood[s] / total;
        out.network.set_row(name, target.states[s], {p, 1.0 - p});
    }
    return out;
}

} // namespace epidss::bayes
