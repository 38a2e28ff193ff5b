#pragma once

// Likelihood-weighted forward sampling. Evidence variables are clamped (hard)
// or sampled and reweighted by their likelihood (soft). Work is split into
// per-worker streams derived from the seed; worker tallies merge by summing
// weights, so a (seed, workers) pair always yields the same bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/exact.hpp"
#include "epidss/error.hpp"
#include "epidss/rng.hpp"

namespace epidss::bayes {

struct SamplerOptions {
    std::size_t workers = 1;
};

struct SampledPosterior {
    std::vector<double> probabilities;
    std::vector<double> standard_errors;
    double effective_sample_size = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

struct WeightTally {
    std::vector<double> weight;    // per query state
    std::vector<double> weight_sq; // per query state

    void merge(const WeightTally& o) {
        for (std::size_t s = 0; s < weight.size(); ++s) {
            weight[s] += o.weight[s];
            weight_sq[s] += o.weight_sq[s];
        }
    }
};

inline std::size_t draw_state(Rng& rng, const double* row, std::size_t card) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < card; ++s) {
        acc += row[s];
        if (u < acc) return s;
    }
    return card - 1;
}

inline WeightTally run_stream(const CompiledNetwork& net, const ResolvedEvidence& ev, const std::vector<bool>& clamped,
                              std::size_t query, std::size_t n, std::uint64_t stream_seed) {
    WeightTally tally{std::vector<double>(net.cardinality(query), 0.0),
                      std::vector<double>(net.cardinality(query), 0.0)};
    Rng rng(stream_seed);
    std::vector<std::size_t> a(net.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (std::size_t v : net.topological()) {
            const double* row = net.table(v).data() + net.row_offset(v, a);
            if (clamped[v]) {
                const auto& lik = *ev[v];
                std::size_t k = 0;
                while (lik[k] == 0.0) ++k;
                a[v] = k;
                w *= row[k];
            } else {
                a[v] = draw_state(rng, row, net.cardinality(v));
                if (ev[v]) w *= (*ev[v])[a[v]];
            }
        }
        tally.weight[a[query]] += w;
        tally.weight_sq[a[query]] += w * w;
    }
    return tally;
}

} // namespace detail

inline SampledPosterior posterior_sampled(const CompiledNetwork& net, const Evidence& ev, std::string_view query,
                                          std::size_t n_samples, std::uint64_t seed, SamplerOptions options = {}) {
    EPIDSS_REQUIRE(n_samples >= 1, ErrorCode::InvalidArgument, "n_samples must be at least 1");
    std::size_t q = net.index(query);
    if (ev.hard.count(std::string(query)))
        throw Error(ErrorCode::InvalidArgument, "query variable '" + std::string(query) + "' is in hard evidence");
    auto resolved = resolve_evidence(net, ev);
    std::vector<bool> clamped(net.size(), false);
    for (const auto& [id, _] : ev.hard) clamped[net.index(id)] = true;

    std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, n_samples));
    std::vector<detail::WeightTally> tallies(workers);
    auto share = [&](std::size_t k) { return n_samples / workers + (k < n_samples % workers ? 1 : 0); };
    if (workers == 1) {
        tallies[0] = detail::run_stream(net, resolved, clamped, q, n_samples, derive_seed(seed, 0));
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < workers; ++k)
            pool.emplace_back([&, k] { tallies[k] = detail::run_stream(net, resolved, clamped, q, share(k), derive_seed(seed, k)); });
        for (auto& t : pool) t.join();
    }
    detail::WeightTally total = tallies[0];
    for (std::size_t k = 1; k < workers; ++k) total.merge(tallies[k]);

    double w_sum = 0.0, w_sq = 0.0;
    for (std::size_t s = 0; s < total.weight.size(); ++s) {
        w_sum += total.weight[s];
        w_sq += total.weight_sq[s];
    }
    if (!(w_sum > 0.0))
        throw Error(ErrorCode::UnreachableEvidence,
                    "all " + std::to_string(n_samples) +
                        " sample weights are zero: evidence is unreachable under forward sampling");

    SampledPosterior out;
    out.samples = n_samples;
    out.seed = seed;
    out.effective_sample_size = w_sum * w_sum / w_sq;
    for (std::size_t s = 0; s < total.weight.size(); ++s) {
        double p = total.weight[s] / w_sum;
        // Delta-method variance of the self-normalized estimator.
        double var = (total.weight_sq[s] * (1.0 - p) * (1.0 - p) + (w_sq - total.weight_sq[s]) * p * p) / (w_sum * w_sum);
        out.probabilities.push_back(p);
        out.standard_errors.push_back(std::sqrt(var));
    }
    return out;
}

inline SampledPosterior posterior_sampled(const CausalNetwork& net, const Evidence& ev, std::string_view query,
                                          std::size_t n_samples, std::uint64_t seed, SamplerOptions options = {}) {
    return posterior_sampled(CompiledNetwork(net), ev, query, n_samples, seed, options);
}

} // namespace epidss::bayes
