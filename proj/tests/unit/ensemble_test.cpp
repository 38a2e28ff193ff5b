#include <gtest/gtest.h>

#include <cmath>

#include "epidss/bayes/network.hpp"
#include "epidss/epi/ensemble.hpp"

using namespace epidss;
using namespace epidss::epi;

namespace {

SirParams quick_base() {
    SirParams p;
    p.horizon = 120;
    p.dt = 0.25;
    return p;
}

// Independent histogram: linear scan of thresholds, no binary search.
std::vector<double> histogram(const std::vector<double>& xs, const std::vector<double>& th) {
    std::vector<double> counts(th.size() + 1, 0.0);
    for (double x : xs) {
        std::size_t bin = 0;
        while (bin < th.size() && x >= th[bin]) ++bin;
        counts[bin] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(xs.size());
    return counts;
}

} // namespace

TEST(Ensemble, PointMassGivesIdenticalMembers) {
    ParamPrior prior{UniformRange::point(0.4), UniformRange::point(0.2)};
    auto ens = sample_ensemble(prior, quick_base(), 5, 1, {.keep_trajectories = true});
    ASSERT_EQ(ens.size(), 5u);
    for (const auto& m : ens.members) {
        EXPECT_EQ(m.params.beta, 0.4);
        ASSERT_TRUE(m.trajectory);
        EXPECT_EQ(m.trajectory->I, ens.members[0].trajectory->I);
    }
    auto row = discretize_to_cpt(ens, Statistic::PeakInfected, {100, 1000});
    EXPECT_EQ(row, (std::vector<double>{0, 0, 1}));
}

TEST(Ensemble, TrajectoriesDroppedByDefault) {
    ParamPrior prior{{0.2, 0.6}, {0.1, 0.2}};
    auto ens = sample_ensemble(prior, quick_base(), 3, 1);
    for (const auto& m : ens.members) EXPECT_FALSE(m.trajectory);
}

TEST(Ensemble, SeedDeterminismIndependentOfWorkers) {
    ParamPrior prior{{0.2, 0.6}, {0.1, 0.3}};
    auto a = sample_ensemble(prior, quick_base(), 64, 9);
    auto b = sample_ensemble(prior, quick_base(), 64, 9, {.workers = 4});
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_EQ(a.members[i].params.beta, b.members[i].params.beta);
        EXPECT_EQ(a.members[i].summary.peak_infected, b.members[i].summary.peak_infected);
        EXPECT_EQ(a.members[i].summary.peak_time, b.members[i].summary.peak_time);
    }
}

TEST(Ensemble, UniformBetaMean) {
    ParamPrior prior{{0.2, 0.6}, UniformRange::point(0.1)};
    SirParams base = quick_base();
    base.horizon = 1; // draws only matter here
    auto ens = sample_ensemble(prior, base, 10000, 2024);
    double sum = 0.0;
    for (const auto& m : ens.members) {
        EXPECT_GE(m.params.beta, 0.2);
        EXPECT_LE(m.params.beta, 0.6);
        sum += m.params.beta;
    }
    const double sigma = (0.4 / std::sqrt(12.0)) / std::sqrt(10000.0);
    EXPECT_LE(std::abs(sum / 10000.0 - 0.4), 3.0 * sigma);
}

TEST(Ensemble, DiscretizationMatchesHistogramOracle) {
    ParamPrior prior{{0.1, 0.7}, {0.08, 0.3}};
    auto ens = sample_ensemble(prior, quick_base(), 2000, 5, {.workers = 2});
    const std::vector<double> th{1e3, 5e4, 1.5e5};
    auto row = discretize_to_cpt(ens, Statistic::PeakInfected, th);
    auto expect = histogram(statistic_values(ens, Statistic::PeakInfected), th);
    double sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        EXPECT_NEAR(row[k], expect[k], 1e-12);
        sum += row[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);

    bayes::CausalNetwork net;
    net.add_variable("Peak", {"b0", "b1", "b2", "b3"}).set_prior("Peak", row);
    EXPECT_TRUE(bayes::is_valid(net));
}

TEST(Ensemble, BinEdgesAreLeftClosed) {
    EXPECT_EQ(bin_of(99.9, {100, 1000}), 0u);
    EXPECT_EQ(bin_of(100, {100, 1000}), 1u);
    EXPECT_EQ(bin_of(1000, {100, 1000}), 2u);
    EXPECT_EQ(bin_of(1e12, {100, 1000}), 2u);
}

TEST(Ensemble, DiscretizeErrors) {
    ParamPrior prior{UniformRange::point(0.4), UniformRange::point(0.2)};
    auto ens = sample_ensemble(prior, quick_base(), 1, 1);
    EXPECT_THROW(discretize_to_cpt(ens, Statistic::AttackRate, {}), Error);
    EXPECT_THROW(discretize_to_cpt(ens, Statistic::AttackRate, {0.5, 0.5}), Error);
    EXPECT_THROW(sample_ensemble(prior, quick_base(), 0, 1), Error);
    EXPECT_THROW(sample_ensemble(ParamPrior{{0.5, 0.1}, {0.1, 0.1}}, quick_base(), 1, 1), Error);
}

TEST(Ensemble, CsvExportRoundTrip) {
    ParamPrior prior{{0.2, 0.6}, {0.1, 0.3}};
    auto ens = sample_ensemble(prior, quick_base(), 50, 77);
    auto records = parse_ensemble_csv(export_ensemble_csv(ens));
    ASSERT_EQ(records.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) {
        EXPECT_EQ(records[i].beta, ens.members[i].params.beta);
        EXPECT_EQ(records[i].gamma, ens.members[i].params.gamma);
        EXPECT_EQ(records[i].summary.peak_infected, ens.members[i].summary.peak_infected);
        EXPECT_EQ(records[i].summary.attack_rate, ens.members[i].summary.attack_rate);
        EXPECT_EQ(records[i].summary.peak_time, ens.members[i].summary.peak_time);
    }
    EXPECT_THROW(parse_ensemble_csv("a,b\n"), Error);
    EXPECT_EQ(parse_statistic("attack_rate"), Statistic::AttackRate);
    EXPECT_THROW(parse_statistic("median"), Error);
}
