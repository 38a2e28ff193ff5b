#pragma once

// Engine selection shared by every service response: exact elimination when
// the min-fill width allows it, otherwise likelihood weighting with a fixed
// draw count and a recorded seed.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/exact.hpp"
#include "epidss/bayes/sampling.hpp"

namespace epidss::service {

using Json = nlohmann::ordered_json;

inline constexpr std::size_t kExactWidthLimit = 20;
inline constexpr std::size_t kSampledDraws = 100000;

struct EngineInfo {
    std::string name; // "exact" | "sampled"
    std::size_t width = 0;
    std::uint64_t seed = 0;
    std::size_t samples = 0; // 0 for exact

    friend bool operator==(const EngineInfo&, const EngineInfo&) = default;
};

inline EngineInfo choose_engine(const bayes::CompiledNetwork& net, std::uint64_t seed) {
    EngineInfo e;
    e.width = bayes::elimination_width(net);
    e.seed = seed;
    if (e.width <= kExactWidthLimit) {
        e.name = "exact";
    } else {
        e.name = "sampled";
        e.samples = kSampledDraws;
    }
    return e;
}

inline Json to_json(const EngineInfo& e) {
    Json j{{"name", e.name}, {"width", e.width}, {"seed", e.seed}};
    if (e.samples) j["samples"] = e.samples;
    return j;
}

inline EngineInfo engine_from_json(const Json& j) {
    EngineInfo e;
    e.name = j.at("name").get<std::string>();
    e.width = j.at("width").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.samples = j.value("samples", std::size_t{0});
    return e;
}

inline bayes::SamplerOptions sampler_options() {
    return {.workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()))};
}

inline std::vector<double> posterior(const bayes::CompiledNetwork& net, const bayes::Evidence& ev,
                                     const std::string& var, const EngineInfo& engine) {
    if (engine.name == "exact") return bayes::posterior_exact(net, ev, var);
    return bayes::posterior_sampled(net, ev, var, engine.samples, engine.seed, sampler_options()).probabilities;
}

// Marginal of every variable, keyed by id. Zero-probability evidence throws
// ContradictoryEvidence under either engine.
inline std::map<std::string, std::vector<double>> all_posteriors(const bayes::CompiledNetwork& net,
                                                                 const bayes::Evidence& ev, const EngineInfo& engine) {
    if (engine.name == "exact") return bayes::posterior_marginals(net, ev);
    std::map<std::string, std::vector<double>> out;
    try {
        for (std::size_t v = 0; v < net.size(); ++v) out[net.name(v)] = posterior(net, ev, net.name(v), engine);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnreachableEvidence) throw Error(ErrorCode::ContradictoryEvidence, e.what());
        throw;
    }
    return out;
}

} // namespace epidss::service
