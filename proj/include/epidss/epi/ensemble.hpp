#pragma once

// Monte Carlo SIR ensembles under uniform parameter priors, and
// discretization of per-draw statistics into CUT rows.
//
// Draw i uses its own stream derive_seed(seed, i), so the ensemble does not
// depend on how draws are spread across workers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "epidss/epi/sir.hpp"
#include "epidss/error.hpp"
#include "epidss/rng.hpp"

namespace epidss::epi {

struct UniformRange {
    double lower = 0.0;
    double upper = 0.0;

    static UniformRange point(double x) { return {x, x}; }
    bool is_point() const noexcept { return lower == upper; }
};

struct ParamPrior {
    UniformRange beta;
    UniformRange gamma;

    void validate() const {
        EPIDSS_REQUIRE(beta.lower <= beta.upper, ErrorCode::InvalidArgument, "beta prior: lower > upper");
        EPIDSS_REQUIRE(gamma.lower <= gamma.upper, ErrorCode::InvalidArgument, "gamma prior: lower > upper");
        EPIDSS_REQUIRE(beta.lower >= 0.0, ErrorCode::InvalidArgument, "beta prior must be >= 0");
        EPIDSS_REQUIRE(gamma.lower > 0.0, ErrorCode::InvalidArgument, "gamma prior must be > 0");
        EPIDSS_REQUIRE(std::isfinite(beta.upper) && std::isfinite(gamma.upper), ErrorCode::InvalidArgument,
                       "prior bounds must be finite");
    }
};

struct EnsembleMember {
    SirParams params;
    TrajectorySummary summary;
    std::optional<Trajectory> trajectory; // kept only on request
};

struct TrajectoryEnsemble {
    std::vector<EnsembleMember> members;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return members.size(); }
};

struct EnsembleOptions {
    bool keep_trajectories = false;
    std::size_t workers = 1;
};

inline TrajectoryEnsemble sample_ensemble(const ParamPrior& prior, const SirParams& base, std::size_t n,
                                          std::uint64_t seed, EnsembleOptions options = {}) {
    EPIDSS_REQUIRE(n >= 1, ErrorCode::InvalidArgument, "ensemble size must be at least 1");
    prior.validate();
    base.validate();

    TrajectoryEnsemble ens;
    ens.seed = seed;
    ens.members.resize(n);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(derive_seed(seed, i));
            SirParams p = base;
            p.beta = prior.beta.is_point() ? prior.beta.lower : rng.uniform(prior.beta.lower, prior.beta.upper);
            p.gamma = prior.gamma.is_point() ? prior.gamma.lower : rng.uniform(prior.gamma.lower, prior.gamma.upper);
            Trajectory tr = simulate_sir(p);
            ens.members[i].params = p;
            ens.members[i].summary = summarize(tr, p.population);
            if (options.keep_trajectories) ens.members[i].trajectory = std::move(tr);
        }
    };

    std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, n));
    if (workers == 1) {
        run(0, n);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t k = 0; k < workers; ++k) {
            std::size_t begin = n * k / workers, end = n * (k + 1) / workers;
            pool.emplace_back([&, k, begin, end] {
                try {
                    run(begin, end);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return ens;
}

enum class Statistic { PeakInfected, AttackRate, PeakTime };

inline std::string_view to_string(Statistic s) {
    switch (s) {
        case Statistic::PeakInfected: return "peak_infected";
        case Statistic::AttackRate: return "attack_rate";
        case Statistic::PeakTime: return "peak_time";
    }
    return "";
}

inline Statistic parse_statistic(std::string_view s) {
    if (s == "peak_infected") return Statistic::PeakInfected;
    if (s == "attack_rate") return Statistic::AttackRate;
    if (s == "peak_time") return Statistic::PeakTime;
    throw Error(ErrorCode::Parse, "unknown statistic '" + std::string(s) + "'");
}

inline double statistic_of(const TrajectorySummary& s, Statistic which) {
    switch (which) {
        case Statistic::PeakInfected: return s.peak_infected;
        case Statistic::AttackRate: return s.attack_rate;
        case Statistic::PeakTime: return s.peak_time;
    }
    return 0.0;
}

inline std::vector<double> statistic_values(const TrajectoryEnsemble& ens, Statistic which) {
    std::vector<double> out;
    out.reserve(ens.size());
    for (const auto& m : ens.members) out.push_back(statistic_of(m.summary, which));
    return out;
}

// Bin index for thresholds t_1 < ... < t_k: bin 0 is (-inf, t_1), bin j is
// [t_j, t_{j+1}), bin k is [t_k, +inf).
inline std::size_t bin_of(double x, const std::vector<double>& thresholds) {
    return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), x) - thresholds.begin());
}

// Bin occupancy frequencies of `statistic`; thresholds.size() + 1 entries.
inline std::vector<double> discretize_to_cpt(const TrajectoryEnsemble& ens, Statistic statistic,
                                             const std::vector<double>& thresholds) {
    EPIDSS_REQUIRE(!thresholds.empty(), ErrorCode::InvalidArgument, "bins list is empty");
    EPIDSS_REQUIRE(!ens.members.empty(), ErrorCode::InvalidArgument, "ensemble is empty");
    for (std::size_t k = 1; k < thresholds.size(); ++k)
        EPIDSS_REQUIRE(thresholds[k - 1] < thresholds[k], ErrorCode::InvalidArgument,
                       "bin thresholds must be strictly increasing");
    std::vector<std::size_t> counts(thresholds.size() + 1, 0);
    for (const auto& m : ens.members) ++counts[bin_of(statistic_of(m.summary, statistic), thresholds)];
    std::vector<double> row;
    const double n = static_cast<double>(ens.size());
    for (std::size_t c : counts) row.push_back(static_cast<double>(c) / n);
    return row;
}

// Audit export: one row per draw.
inline constexpr const char* kEnsembleHeader = "beta,gamma,peak_infected,attack_rate,peak_time";

inline std::string export_ensemble_csv(const TrajectoryEnsemble& ens) {
    std::string out = std::string(kEnsembleHeader) + "\n";
    char buf[160];
    for (const auto& m : ens.members) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", m.params.beta, m.params.gamma,
                      m.summary.peak_infected, m.summary.attack_rate, m.summary.peak_time);
        out += buf;
    }
    return out;
}

struct EnsembleRecord {
    double beta = 0.0;
    double gamma = 0.0;
    TrajectorySummary summary;
};

inline std::vector<EnsembleRecord> parse_ensemble_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kEnsembleHeader)
        throw Error(ErrorCode::Parse, "ensemble export must start with header '" + std::string(kEnsembleHeader) + "'");
    std::vector<EnsembleRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EnsembleRecord r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.beta, &r.gamma, &r.summary.peak_infected,
                        &r.summary.attack_rate, &r.summary.peak_time) != 5)
            throw Error(ErrorCode::Parse, "malformed ensemble row: " + line);
        out.push_back(r);
    }
    return out;
}

} // namespace epidss::epi
