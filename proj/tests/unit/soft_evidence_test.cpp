#include <gtest/gtest.h>

#include <random>

#include "epidss/bayes/exact.hpp"
#include "epidss/bayes/soft_evidence.hpp"
#include "support/oracle.hpp"

using namespace epidss;
using namespace epidss::bayes;

namespace {

CausalNetwork coin(double p0 = 0.5) {
    CausalNetwork net;
    net.add_variable("c", {"s1", "s2"}).set_prior("c", {p0, 1.0 - p0});
    return net;
}

} // namespace

TEST(SoftEvidence, UninformativeLikelihoodLeavesPosterior) {
    auto net = coin(0.3);
    auto ve = apply_soft_evidence(net, "c", {1.0, 1.0});
    auto p = posterior_exact(ve.network, ve.activation(), "c");
    EXPECT_NEAR(p[0], 0.3, 1e-15);
    EXPECT_NEAR(p[1], 0.7, 1e-15);
}

TEST(SoftEvidence, OneHotLikelihoodEqualsHardEvidence) {
    auto net = oracle::two_test_network();
    auto ve = apply_soft_evidence(net, "Test", {1.0, 0.0});
    Evidence hard;
    hard.hard["Test"] = "positive";
    auto via_virtual = posterior_exact(ve.network, ve.activation(), "Disease");
    auto via_hard = posterior_exact(net, hard, "Disease");
    for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(via_virtual[s], via_hard[s], 1e-12);
}

TEST(SoftEvidence, NormalizedElementwiseProduct) {
    auto net = coin(0.5);
    auto ve = apply_soft_evidence(net, "c", {0.9, 0.2});
    auto p = posterior_exact(ve.network, ve.activation(), "c");
    EXPECT_NEAR(p[0], 0.9 / 1.1, 1e-12); // 0.818...
    EXPECT_NEAR(p[1], 0.2 / 1.1, 1e-12); // 0.181...
}

TEST(SoftEvidence, VirtualChildMatchesInlineSoftEvidence) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto net = oracle::random_binary_network(seed, 8);
        const auto& target = net.variables[rng() % 8].id;
        std::uniform_real_distribution<double> u(0.0, 3.0);
        std::vector<double> lik{u(rng), u(rng) + 0.01};
        auto ve = apply_soft_evidence(net, target, lik);
        EXPECT_TRUE(validate_network(ve.network).empty());
        Evidence inline_ev;
        inline_ev.soft[target] = lik;
        const auto& query = net.variables[rng() % 8].id;
        auto a = posterior_exact(ve.network, ve.activation(), query);
        auto b = posterior_exact(net, inline_ev, query);
        for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(a[s], b[s], 1e-12);
    }
}

TEST(SoftEvidence, ProportionalOneHotAndFreshNames) {
    auto net = coin();
    auto first = apply_soft_evidence(net, "c", {0.0, 5.0});
    auto second = apply_soft_evidence(first.network, "c", {2.0, 1.0});
    EXPECT_NE(first.node, second.node);
    EXPECT_TRUE(validate_network(second.network).empty());
    auto p = posterior_exact(first.network, first.activation(), "c");
    EXPECT_NEAR(p[1], 1.0, 1e-12);
}

TEST(SoftEvidence, Errors) {
    auto net = coin();
    EXPECT_THROW(apply_soft_evidence(net, "c", {0.0, 0.0}), Error);
    EXPECT_THROW(apply_soft_evidence(net, "c", {1.0}), Error);
    EXPECT_THROW(apply_soft_evidence(net, "nope", {1.0, 1.0}), Error);
}
