#include <gtest/gtest.h>

#include "pmfusion/decision_maker.hpp"
#include "pmfusion/rng.hpp"

using namespace pmfusion;

namespace {

DecisionModel example_model() {
    DecisionModel m;
    m.p_table = {{0.8, 0.2}, {0.6, 0.4}};
    m.utilities = {10.0, 0.0};
    return m;
}

std::vector<DecisionSpec> two_decisions() { return {{0, {1, 0, 0}, "a"}, {1, {0, 1, 0}, "b"}}; }

}  // namespace

TEST(ExpectedUtility, Examples) {
    const auto model = example_model();
    const auto d = two_decisions();
    EXPECT_NEAR(expected_utility(d[0], TypeDistribution{0.5, 0.5}, model), 0.8 * 10.0 * 0.5, 1e-12);
    EXPECT_NEAR(expected_utility(d[1], TypeDistribution{0.5, 0.5}, model), 3.0, 1e-12);
    EXPECT_NEAR(expected_utility(d[0], TypeDistribution{1.0, 0.0}, model), 0.8 * 10.0, 1e-12);
    DecisionModel zero = model;
    zero.utilities = {0.0, 0.0};
    for (const auto& spec : d) EXPECT_EQ(expected_utility(spec, TypeDistribution{0.3, 0.7}, zero), 0.0);
}

TEST(Decide, Examples) {
    const auto model = example_model();
    const auto d = two_decisions();
    const auto rec = decide(TypeDistribution{0.5, 0.5}, d, model, 3);
    EXPECT_EQ(rec.decision_id, 0);
    EXPECT_EQ(rec.time, 3);
    EXPECT_NEAR(rec.expected_utility, 4.0, 1e-12);

    DecisionModel tie = model;
    tie.p_table = {{0.5, 0.5}, {0.5, 0.5}};
    EXPECT_EQ(decide(TypeDistribution{0.5, 0.5}, d, tie).decision_id, 0);
    const std::vector<DecisionSpec> reversed{d[1], d[0]};
    EXPECT_EQ(decide(TypeDistribution{0.5, 0.5}, reversed, tie).decision_id, 0);

    const std::vector<DecisionSpec> only{d[1]};
    EXPECT_EQ(decide(TypeDistribution{0.5, 0.5}, only, model).decision_id, 1);
    EXPECT_THROW(decide(TypeDistribution{0.5, 0.5}, std::vector<DecisionSpec>{}, model), PreconditionError);
}

TEST(Decide, ScaleInvariantInUtilities) {
    const auto decisions = default_decision_set();
    Rng rng(51);
    for (int s = 0; s < 500; ++s) {
        DecisionModel model = default_decision_model();
        for (double& u : model.utilities) u = rng.uniform(0.1, 20.0);
        std::vector<double> b(3);
        for (double& x : b) x = rng.uniform(0.01, 1.0);
        const auto belief = normalize(b);
        DecisionModel scaled = model;
        const double c = rng.uniform(0.01, 100.0);
        for (double& u : scaled.utilities) u *= c;
        EXPECT_EQ(decide(belief, decisions, model).decision_id, decide(belief, decisions, scaled).decision_id);
    }
}

TEST(Decide, OneHotBeliefPicksColumnArgmax) {
    const auto decisions = default_decision_set();
    const auto model = default_decision_model();
    for (std::size_t j = 0; j < 3; ++j) {
        int best = 0;
        for (std::size_t i = 1; i < model.p_table.size(); ++i)
            if (model.p_table[i][j] * model.utilities[j] > model.p_table[static_cast<std::size_t>(best)][j] * model.utilities[j])
                best = static_cast<int>(i);
        EXPECT_EQ(decide(one_hot(j, 3), decisions, model).decision_id, best);
    }
}

TEST(ApplyDecision, Examples) {
    DecisionRecord one_gpr;
    one_gpr.requested = {0, 0, 1};
    const auto a = apply_decision(one_gpr, {5, 3, 2});
    EXPECT_EQ(a.record.deployed, (SensorCounts{0, 0, 1}));
    EXPECT_EQ(a.fleet, (SensorCounts{5, 3, 1}));

    DecisionRecord two_gpr;
    two_gpr.requested = {0, 0, 2};
    const auto b = apply_decision(two_gpr, {5, 3, 1});
    EXPECT_EQ(b.record.deployed, (SensorCounts{0, 0, 1}));
    EXPECT_EQ(b.record.shortfall, (SensorCounts{0, 0, 1}));
    EXPECT_EQ(b.fleet, (SensorCounts{5, 3, 0}));

    const auto c = apply_decision(DecisionRecord{}, {5, 3, 2});
    EXPECT_EQ(c.fleet, (SensorCounts{5, 3, 2}));
    EXPECT_THROW(apply_decision(DecisionRecord{}, {-1, 0, 0}), ArgumentError);
}

TEST(ApplyDecision, NeverExceedsFleet) {
    const auto decisions = default_decision_set();
    Rng rng(52);
    for (int s = 0; s < 200; ++s) {
        SensorCounts fleet{5, 3, 2};
        SensorCounts used{0, 0, 0};
        for (int t = 0; t < 10; ++t) {
            DecisionRecord r;
            r.requested = decisions[rng.below(decisions.size())].deployment;
            const auto dep = apply_decision(r, fleet);
            for (std::size_t k = 0; k < 3; ++k) used[k] += dep.record.deployed[k];
            fleet = dep.fleet;
        }
        EXPECT_LE(used[0], 5);
        EXPECT_LE(used[1], 3);
        EXPECT_LE(used[2], 2);
    }
}

TEST(DefaultDecisions, FourteenWithStochasticColumns) {
    const auto decisions = default_decision_set();
    const auto model = default_decision_model();
    ASSERT_EQ(decisions.size(), 14u);
    ASSERT_EQ(model.p_table.size(), 14u);
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        EXPECT_EQ(decisions[i].id, static_cast<int>(i));
        EXPECT_LE(decisions[i].total(), kMaxSensorsPerDecision);
    }
    for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (const auto& row : model.p_table) s += row[j];
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_NO_THROW(model.validate(3));
    EXPECT_THROW(model.probability(14, 0), ConfigError);
}
