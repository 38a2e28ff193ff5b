#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "epidss/epi/sir.hpp"

using namespace epidss;
using namespace epidss::epi;

TEST(Sir, NoTransmission) {
    SirParams p;
    p.beta = 0.0;
    auto tr = simulate_sir(p);
    for (std::size_t k = 1; k < tr.size(); ++k) {
        EXPECT_LT(tr.I[k], tr.I[k - 1]);
        EXPECT_EQ(tr.S[k], tr.S[0]);
    }
}

TEST(Sir, SubcriticalDiesOut) {
    SirParams p;
    p.beta = 0.3;
    p.gamma = 2.0;
    auto tr = simulate_sir(p);
    EXPECT_LT(tr.I.back(), p.initial_infected);
    for (double i : tr.I) EXPECT_LE(i, p.initial_infected);
}

TEST(Sir, PeakMatchesAnalyticCondition) {
    SirParams p;
    p.beta = 0.5;
    p.gamma = 0.25;
    p.population = 1e6;
    p.initial_infected = 10;
    p.dt = 0.1;
    auto tr = simulate_sir(p);
    auto s = summarize(tr, p.population);
    std::size_t cross = 0;
    while (tr.S[cross] / p.population > p.gamma / p.beta) ++cross;
    EXPECT_LE(std::abs(s.peak_time - tr.t[cross]), p.dt + 1e-12);
}

TEST(Sir, ConservationAndMonotoneRecovered) {
    for (double beta : {0.0, 0.1, 0.3, 0.8, 1.5})
        for (double gamma : {0.05, 0.2, 0.7}) {
            SirParams p;
            p.beta = beta;
            p.gamma = gamma;
            p.horizon = 200;
            auto tr = simulate_sir(p);
            for (std::size_t k = 0; k < tr.size(); ++k) {
                EXPECT_LE(std::abs(tr.S[k] + tr.I[k] + tr.R[k] - p.population), 1e-9 * p.population);
                EXPECT_GE(tr.S[k], 0.0);
                EXPECT_GE(tr.I[k], 0.0);
                if (k) { EXPECT_GE(tr.R[k], tr.R[k - 1]); }
            }
        }
}

TEST(Sir, Summary) {
    SirParams p;
    auto tr = simulate_sir(p);
    auto s = summarize(tr, p.population);
    EXPECT_EQ(s.peak_infected, *std::max_element(tr.I.begin(), tr.I.end()));
    EXPECT_NEAR(s.attack_rate, (p.population - tr.S.back()) / p.population, 1e-15);
    EXPECT_GT(s.attack_rate, 0.5); // R0 = 3
    EXPECT_EQ(tr.size(), 3651u);
}

TEST(Sir, StepTooLargeIsReported) {
    SirParams p;
    p.gamma = 5.0;
    p.beta = 0.1;
    p.dt = 0.5;
    try {
        simulate_sir(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
        EXPECT_NE(std::string(e.what()).find("smaller dt"), std::string::npos);
    }
}

TEST(Sir, InvalidParameters) {
    auto bad = [](auto mutate) {
        SirParams p;
        mutate(p);
        EXPECT_THROW(simulate_sir(p), Error);
    };
    bad([](SirParams& p) { p.beta = -1; });
    bad([](SirParams& p) { p.gamma = 0; });
    bad([](SirParams& p) { p.initial_infected = 0; });
    bad([](SirParams& p) { p.initial_infected = 2e6; });
    bad([](SirParams& p) { p.dt = 0; });
    bad([](SirParams& p) { p.horizon = 0.01; });
}
