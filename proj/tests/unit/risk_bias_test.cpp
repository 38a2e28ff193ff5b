#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "epidss/bayes/sampling.hpp"
#include "epidss/epi/ensemble.hpp"
#include "epidss/risk_bias.hpp"
#include "support/oracle.hpp"

using namespace epidss;
using namespace epidss::risk;

namespace {

bayes::Variable binary(const std::string& id) { return {id, {"yes", "no"}}; }

// Sort, locate the interpolated quantile by hand, average everything at or above it.
double shortfall_oracle(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    double h = (xs.size() - 1) * q;
    std::size_t i = static_cast<std::size_t>(h);
    double quant = i + 1 < xs.size() ? xs[i] + (h - i) * (xs[i + 1] - xs[i]) : xs[i];
    double sum = 0;
    int n = 0;
    for (double x : xs)
        if (x >= quant) sum += x, ++n;
    return sum / n;
}

admiralty::GradedEvidence observe(const std::string& var, const std::string& state, const char* grade = "A1",
                                  const std::string& source = "lab") {
    admiralty::GradedEvidence ge{{}, admiralty::parse_grade(grade), source, {}};
    ge.evidence.hard[var] = state;
    return ge;
}

} // namespace

TEST(RiskScore, Examples) {
    auto var = binary("Disease");
    CostModel zero;
    zero.set("Disease", "yes", 0).set("Disease", "no", 0);
    EXPECT_EQ(risk_score(zero, std::vector<double>{0.3, 0.7}, var).risk, 0.0);

    CostModel certain;
    certain.set("Disease", "yes", 42).set("Disease", "no", 0);
    EXPECT_EQ(risk_score(certain, std::vector<double>{1.0, 0.0}, var).risk, 42.0);

    CostModel c;
    c.set("Disease", "yes", 100).set("Disease", "no", 0);
    auto posterior = bayes::posterior_exact(oracle::disease_network(), {{{"Test", "positive"}}, {}}, "Disease");
    auto r = risk_score(c, posterior, var);
    EXPECT_NEAR(r.risk, 100.0 * oracle::kDiseasePositivePosterior, 1e-12);
    EXPECT_NEAR(r.risk, 32.42, 0.005);
    ASSERT_EQ(r.contributions.size(), 2u);
    EXPECT_NEAR(r.contributions[0].contribution + r.contributions[1].contribution, r.risk, 1e-15);
}

TEST(RiskScore, Errors) {
    auto var = binary("Disease");
    CostModel partial;
    partial.set("Disease", "yes", 1);
    EXPECT_THROW(risk_score(partial, std::vector<double>{0.5, 0.5}, var), Error);
    EXPECT_THROW(partial.set("Disease", "no", -1), Error);
    CostModel full;
    full.set("Disease", "yes", 1).set("Disease", "no", 1);
    EXPECT_THROW(risk_score(full, std::vector<double>{1.0}, var), Error);
}

TEST(RiskScore, LinearAndMonotone) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 10);
    bayes::Variable v{"x", {"a", "b", "c"}};
    for (int k = 0; k < 100; ++k) {
        std::vector<double> p{u(rng), u(rng), u(rng)};
        double z = p[0] + p[1] + p[2];
        for (double& x : p) x /= z;
        CostModel c;
        for (const auto& s : v.states) c.set("x", s, u(rng));
        double a = u(rng);
        EXPECT_NEAR(risk_score(c.scaled(a), p, v).risk, a * risk_score(c, p, v).risk, 1e-9);
        CostModel raised = c;
        raised.costs["x"]["b"] += u(rng);
        EXPECT_GE(risk_score(raised, p, v).risk, risk_score(c, p, v).risk);
    }
}

TEST(Bias, Examples) {
    auto none = bias_estimate(std::vector<double>{5, 5, 5}, 5);
    EXPECT_EQ(none.direction, BiasDirection::None);
    auto over = bias_estimate(std::vector<double>{6, 7, 8}, 5);
    EXPECT_DOUBLE_EQ(over.mean_error, 2.0);
    EXPECT_EQ(over.direction, BiasDirection::Over);
    EXPECT_EQ(over.count, 3u);
    EXPECT_EQ(bias_estimate(std::vector<double>{1}, 5).direction, BiasDirection::Under);
    EXPECT_EQ(bias_estimate(std::vector<double>{5 + 1e-12}, 5).direction, BiasDirection::None);
    EXPECT_THROW(bias_estimate(std::vector<double>{}, 0), Error);
}

TEST(Bias, SamplerIsUnbiased) {
    auto net = oracle::random_binary_network(8, 8);
    bayes::Evidence ev;
    ev.hard["x07"] = "t";
    const double exact = bayes::posterior_exact(net, ev, "x01")[0];
    std::vector<double> estimates;
    double var_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = bayes::posterior_sampled(net, ev, "x01", 5000, seed);
        estimates.push_back(s.probabilities[0]);
        var_sum += s.standard_errors[0] * s.standard_errors[0];
    }
    const double pooled = std::sqrt(var_sum) / 50.0;
    EXPECT_LE(std::abs(bias_estimate(estimates, exact).mean_error), 3.0 * pooled);
}

TEST(TailRisk, Examples) {
    EXPECT_EQ(tail_risk(std::vector<double>{4, 4, 4, 4}, 0.3).value, 4.0);
    std::vector<double> xs(100);
    std::iota(xs.begin(), xs.end(), 1.0);
    auto t = tail_risk(xs, 0.9);
    EXPECT_NEAR(t.quantile, 90.1, 1e-12);
    EXPECT_NEAR(t.value, 95.5, 1e-12);
    EXPECT_NEAR(t.value, shortfall_oracle(xs, 0.9), 1e-12);
    EXPECT_FALSE(t.fallback);
    auto single = tail_risk(std::vector<double>{3.0}, 0.9);
    EXPECT_TRUE(single.fallback);
    EXPECT_EQ(single.value, 3.0);
    EXPECT_THROW(tail_risk(std::vector<double>{}, 0.5), Error);
    EXPECT_THROW(tail_risk(std::vector<double>{1, 2}, 1.0), Error);
}

TEST(TailRisk, MatchesOracleAndDominatesMean) {
    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> d(0, 1);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> xs(2 + rng() % 50);
        for (double& x : xs) x = d(rng);
        double q = 0.5 + 0.49 * std::uniform_real_distribution<double>()(rng);
        double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        auto t = tail_risk(xs, q);
        EXPECT_NEAR(t.value, shortfall_oracle(xs, q), 1e-12);
        EXPECT_GE(t.value, mean - 1e-12);
    }
}

TEST(TailRisk, AgreesWithAuditExport) {
    epi::SirParams base;
    base.horizon = 150;
    base.dt = 0.25;
    auto ens = epi::sample_ensemble({{0.2, 0.6}, {0.1, 0.3}}, base, 300, 12);
    std::vector<double> from_file;
    for (const auto& r : epi::parse_ensemble_csv(epi::export_ensemble_csv(ens)))
        from_file.push_back(r.summary.peak_infected);
    auto direct = tail_risk(epi::statistic_values(ens, epi::Statistic::PeakInfected), 0.95);
    EXPECT_EQ(direct.value, shortfall_oracle(from_file, 0.95));
}

TEST(Sequential, EmptyListGivesPrior) {
    auto snaps = sequential_adjust(oracle::disease_network(), {}, "Disease");
    ASSERT_EQ(snaps.size(), 1u);
    EXPECT_NEAR(snaps[0][0], 0.01, 1e-15);
}

TEST(Sequential, SinglePositiveTest) {
    auto snaps = sequential_adjust(oracle::disease_network(), {observe("Test", "positive")}, "Disease");
    ASSERT_EQ(snaps.size(), 2u);
    EXPECT_NEAR(snaps[0][0], 0.01, 1e-15);
    EXPECT_NEAR(snaps[1][0], oracle::kDiseasePositivePosterior, 1e-12);
}

TEST(Sequential, IncrementalEqualsBatch) {
    auto net = oracle::two_test_network();
    std::vector<admiralty::GradedEvidence> obs{observe("Test", "positive"), observe("Test2", "positive")};
    auto snaps = sequential_adjust(net, obs, "Disease");
    bayes::Evidence batch;
    batch.hard["Test"] = "positive";
    batch.hard["Test2"] = "positive";
    auto expect = oracle::oracle_posterior(net, batch, "Disease");
    for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(snaps.back()[s], expect[s], 1e-10);

    // Discounted observations: batch of combined likelihoods, enumerated by the oracle.
    std::vector<admiralty::GradedEvidence> graded{observe("Test", "positive", "C2"), observe("Test2", "negative", "B3"),
                                                  observe("Test", "positive", "D1")};
    auto gsnaps = sequential_adjust(net, graded, "Disease");
    auto gexpect = oracle::oracle_posterior(net, accumulate_evidence(net, graded), "Disease");
    for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(gsnaps.back()[s], gexpect[s], 1e-10);
}

TEST(Sequential, OrderInvariant) {
    auto net = oracle::two_test_network();
    std::vector<admiralty::GradedEvidence> obs{observe("Test", "negative", "B2"), observe("Test2", "positive", "A1"),
                                               observe("Test", "negative", "C3")};
    auto ref = sequential_adjust(net, obs, "Disease").back();
    std::sort(obs.begin(), obs.end(), [](auto& a, auto& b) { return a.grade < b.grade; });
    do {
        auto got = sequential_adjust(net, obs, "Disease").back();
        for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(got[s], ref[s], 1e-10);
    } while (std::next_permutation(obs.begin(), obs.end(), [](auto& a, auto& b) { return a.grade < b.grade; }));
}

TEST(Sequential, ContradictionNamesFirstOffender) {
    auto net = oracle::disease_network();
    std::vector<admiralty::GradedEvidence> obs{observe("Test", "positive", "A1", "s0"),
                                               observe("Disease", "yes", "B2", "s1"),
                                               observe("Test", "negative", "A1", "s2"),
                                               observe("Test", "negative", "A1", "s3")};
    try {
        sequential_adjust(net, obs, "Disease");
        FAIL();
    } catch (const ContradictionError& e) {
        EXPECT_EQ(e.observation_index(), 2u);
        EXPECT_NE(std::string(e.what()).find("s2"), std::string::npos);
    }
}
