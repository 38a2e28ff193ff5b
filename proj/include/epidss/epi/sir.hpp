#pragma once

// Deterministic SIR compartment model, forward Euler:
//   dS = -beta*S*I/N,  dI = beta*S*I/N - gamma*I,  dR = gamma*I
// Flows are moved between compartments as whole quantities so S+I+R stays
// at N up to rounding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "epidss/error.hpp"

namespace epidss::epi {

struct SirParams {
    double beta = 0.3;           // transmission rate per day
    double gamma = 0.1;          // recovery rate per day
    double population = 1e6;     // N
    double initial_infected = 10.0;
    double horizon = 365.0;      // days
    double dt = 0.1;             // days

    void validate() const {
        EPIDSS_REQUIRE(std::isfinite(beta) && beta >= 0.0, ErrorCode::InvalidArgument, "beta must be >= 0");
        EPIDSS_REQUIRE(std::isfinite(gamma) && gamma > 0.0, ErrorCode::InvalidArgument, "gamma must be > 0");
        EPIDSS_REQUIRE(std::isfinite(population) && population > 0.0, ErrorCode::InvalidArgument,
                       "population must be > 0");
        EPIDSS_REQUIRE(initial_infected > 0.0 && initial_infected <= population, ErrorCode::InvalidArgument,
                       "initial infected must be in (0, N]");
        EPIDSS_REQUIRE(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "dt must be > 0");
        EPIDSS_REQUIRE(std::isfinite(horizon) && horizon >= dt, ErrorCode::InvalidArgument, "horizon must be >= dt");
    }

    double basic_reproduction_number() const { return beta / gamma; }
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> S;
    std::vector<double> I;
    std::vector<double> R;

    std::size_t size() const noexcept { return t.size(); }
};

inline Trajectory simulate_sir(const SirParams& p) {
    p.validate();
    const auto steps = static_cast<std::size_t>(std::llround(p.horizon / p.dt));
    Trajectory tr;
    tr.t.reserve(steps + 1);
    tr.S.reserve(steps + 1);
    tr.I.reserve(steps + 1);
    tr.R.reserve(steps + 1);

    double S = p.population - p.initial_infected, I = p.initial_infected, R = 0.0;
    auto record = [&](std::size_t k) {
        tr.t.push_back(static_cast<double>(k) * p.dt);
        tr.S.push_back(S);
        tr.I.push_back(I);
        tr.R.push_back(R);
    };
    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double infections = p.dt * p.beta * S * I / p.population;
        const double recoveries = p.dt * p.gamma * I;
        if (infections > S || infections + I < recoveries)
            throw Error(ErrorCode::StepTooLarge,
                        "negative compartment at t=" + std::to_string(static_cast<double>(k) * p.dt) +
                            "; use a smaller dt (currently " + std::to_string(p.dt) + ")");
        S -= infections;
        I += infections - recoveries;
        R += recoveries;
        record(k);
    }
    return tr;
}

struct TrajectorySummary {
    double peak_infected = 0.0;
    double attack_rate = 0.0; // fraction of N ever infected by the horizon
    double peak_time = 0.0;   // first time I reaches its maximum
};

inline TrajectorySummary summarize(const Trajectory& tr, double population) {
    TrajectorySummary s;
    auto peak = std::max_element(tr.I.begin(), tr.I.end());
    s.peak_infected = *peak;
    s.peak_time = tr.t[static_cast<std::size_t>(peak - tr.I.begin())];
    s.attack_rate = (population - tr.S.back()) / population;
    return s;
}

} // namespace epidss::epi
