#include <gtest/gtest.h>

#include <random>

#include "epidss/bayes/exact.hpp"
#include "support/oracle.hpp"

using namespace epidss;
using namespace epidss::bayes;

TEST(PosteriorExact, NoEvidenceRootEqualsPrior) {
    CausalNetwork net;
    net.add_variable("r", {"a", "b"}).set_prior("r", {0.2, 0.8});
    auto p = posterior_exact(net, {}, "r");
    EXPECT_NEAR(p[0], 0.2, 1e-15);
    EXPECT_NEAR(p[1], 0.8, 1e-15);
}

TEST(PosteriorExact, DiseaseTestPositive) {
    auto net = oracle::disease_network();
    Evidence ev;
    ev.hard["Test"] = "positive";
    auto p = posterior_exact(net, ev, "Disease");
    EXPECT_NEAR(p[0], oracle::kDiseasePositivePosterior, 1e-12);
    EXPECT_NEAR(p[0], 0.3242, 5e-5);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9);
}

TEST(PosteriorExact, ZeroProbabilityEvidenceIsAnError) {
    auto net = oracle::disease_network(0.01, 1.0, 0.98); // perfect sensitivity
    Evidence ev;
    ev.hard["Test"] = "negative";
    ev.hard["Disease"] = "yes";
    CausalNetwork extended = net;
    extended.add_variable("Q", {"a", "b"}).add_edge("Disease", "Q");
    extended.set_row("Q", "yes", {0.5, 0.5}).set_row("Q", "no", {0.5, 0.5});
    try {
        posterior_exact(extended, ev, "Q");
        FAIL() << "expected contradiction";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ContradictoryEvidence);
    }
}

TEST(PosteriorExact, ArgumentErrors) {
    auto net = oracle::disease_network();
    Evidence ev;
    ev.hard["Test"] = "positive";
    EXPECT_THROW(posterior_exact(net, ev, "Nope"), Error);
    EXPECT_THROW(posterior_exact(net, ev, "Test"), Error); // query in hard evidence
    Evidence bad;
    bad.soft["Test"] = {1.0};
    EXPECT_THROW(posterior_exact(net, bad, "Disease"), Error);
    bad.soft["Test"] = {0.0, 0.0};
    EXPECT_THROW(posterior_exact(net, bad, "Disease"), Error);
    bad.soft["Test"] = {-1.0, 2.0};
    EXPECT_THROW(posterior_exact(net, bad, "Disease"), Error);
    Evidence unknown_state;
    unknown_state.hard["Test"] = "maybe";
    try {
        posterior_exact(net, unknown_state, "Disease");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownState);
    }
}

TEST(PosteriorExact, MatchesEnumerationOnTenNodeNetworks) {
    std::mt19937_64 rng(2024);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto net = oracle::random_binary_network(seed * 7919, 10);
        CompiledNetwork compiled(net);
        for (int pair = 0; pair < 10; ++pair) {
            const auto& query = net.variables[rng() % net.variables.size()].id;
            auto ev = oracle::random_evidence(rng, net, query, 4);
            auto got = posterior_exact(compiled, ev, query);
            auto want = oracle::oracle_posterior(net, ev, query);
            for (std::size_t s = 0; s < got.size(); ++s) EXPECT_NEAR(got[s], want[s], 1e-10);
        }
    }
}

TEST(PosteriorExact, MultiValuedStates) {
    CausalNetwork net;
    net.add_variable("a", {"x", "y", "z"}).add_variable("b", {"0", "1", "2", "3"}).add_variable("c", {"u", "v"});
    net.add_edge("a", "b").add_edge("a", "c").add_edge("b", "c");
    net.set_prior("a", {0.2, 0.5, 0.3});
    net.set_row("b", "x", {0.1, 0.2, 0.3, 0.4}).set_row("b", "y", {0.4, 0.3, 0.2, 0.1}).set_row("b", "z", {0.25, 0.25, 0.25, 0.25});
    double p = 0.05;
    for (const auto& key : net.row_keys("c")) {
        net.set_row("c", key, {p, 1.0 - p});
        p += 0.07;
    }
    Evidence ev;
    ev.hard["c"] = "v";
    ev.soft["b"] = {0.3, 1.0, 0.2, 0.6};
    auto got = posterior_exact(net, ev, "a");
    auto want = oracle::oracle_posterior(net, ev, "a");
    for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(got[s], want[s], 1e-12);
}

TEST(PosteriorExact, EvidenceProbability) {
    auto net = oracle::disease_network();
    Evidence ev;
    ev.hard["Test"] = "positive";
    EXPECT_NEAR(evidence_probability(CompiledNetwork(net), ev), 0.0095 + 0.0198, 1e-15);
    EXPECT_NEAR(evidence_probability(CompiledNetwork(net), {}), 1.0, 1e-15);
}

TEST(PosteriorExact, MarginalsIncludeOneHotForHardEvidence) {
    auto net = oracle::disease_network();
    Evidence ev;
    ev.hard["Test"] = "positive";
    auto m = posterior_marginals(CompiledNetwork(net), ev);
    EXPECT_EQ(m.at("Test"), (std::vector<double>{1.0, 0.0}));
    EXPECT_NEAR(m.at("Disease")[0], oracle::kDiseasePositivePosterior, 1e-12);
}

TEST(EliminationOrder, MinFillWithLexicalTies) {
    // Chain c -> b -> a: every node has fill 0, so order follows ids.
    CausalNetwork net;
    net.add_variable("c", {"0", "1"}).add_variable("b", {"0", "1"}).add_variable("a", {"0", "1"});
    net.add_edge("c", "b").add_edge("b", "a");
    net.set_prior("c", {0.5, 0.5});
    for (const char* v : {"b", "a"})
        for (const char* k : {"0", "1"}) net.set_row(v, k, {0.5, 0.5});
    CompiledNetwork compiled(net);
    auto plan = elimination_plan(compiled, "c");
    ASSERT_EQ(plan.order.size(), 2u);
    EXPECT_EQ(compiled.name(plan.order[0]), "a");
    EXPECT_EQ(compiled.name(plan.order[1]), "b");
    EXPECT_EQ(elimination_width(compiled), 1u);
}

TEST(EliminationOrder, WidthOfCompleteDag) {
    CausalNetwork net;
    const int n = 5;
    for (int i = 0; i < n; ++i) net.add_variable("v" + std::to_string(i), {"0", "1"});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) net.add_edge("v" + std::to_string(j), "v" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (const auto& k : net.row_keys("v" + std::to_string(i))) net.set_row("v" + std::to_string(i), k, {0.5, 0.5});
    EXPECT_EQ(elimination_width(CompiledNetwork(net)), static_cast<std::size_t>(n - 1));
}
