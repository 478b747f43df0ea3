#include <gtest/gtest.h>

#include "pmfusion/signal_model.hpp"

using namespace pmfusion;

namespace {

ObjectInstance object_with(std::vector<int> features) {
    ObjectInstance o;
    o.true_type = 0;
    o.features = std::move(features);
    return o;
}

SensorTypeSpec sensor_with_noise(double noise, std::size_t features) {
    return {SensorKind::GPR, std::vector<double>(features, noise), 4.0, 2};
}

}  // namespace

TEST(SampleSignal, ZeroNoiseCopiesFeatures) {
    const auto obj = object_with({0, 2, 1, 1});
    const std::vector<int> levels{3, 3, 3, 3};
    const auto env = EnvironmentState::with_default_weights();
    Rng rng(1);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_signal(obj, sensor_with_noise(0.0, 4), levels, env, rng).values, obj.features);
}

TEST(SampleSignal, FullNoiseFlipsBinaryFeature) {
    const auto obj = object_with({0, 1});
    const std::vector<int> levels{2, 2};
    const auto env = EnvironmentState::with_default_weights();
    Rng rng(2);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_signal(obj, sensor_with_noise(1.0, 2), levels, env, rng).values, (std::vector<int>{1, 0}));
}

TEST(SampleSignal, ErrorRateMatchesNoiseLevel) {
    const auto obj = object_with({1, 0, 2, 1});
    const std::vector<int> levels{3, 3, 3, 3};
    const auto env = EnvironmentState::with_default_weights();
    Rng rng(3);
    std::vector<int> errors(4, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_signal(obj, sensor_with_noise(0.2, 4), levels, env, rng);
        for (std::size_t f = 0; f < 4; ++f) errors[f] += s.values[f] != obj.features[f];
    }
    for (int e : errors) EXPECT_NEAR(static_cast<double>(e) / n, 0.2, 0.01);
}

TEST(SampleSignal, SameSeedSameSequence) {
    const auto obj = object_with({1, 0, 2, 1});
    const std::vector<int> levels{3, 3, 3, 3};
    const auto env = EnvironmentState::with_default_weights();
    Rng a(99), b(99);
    for (int i = 0; i < 500; ++i)
        EXPECT_EQ(sample_signal(obj, sensor_with_noise(0.4, 4), levels, env, a).values,
                  sample_signal(obj, sensor_with_noise(0.4, 4), levels, env, b).values);
}

TEST(SampleSignal, LowWeightDegradesTowardUniform) {
    EXPECT_DOUBLE_EQ(effective_noise(0.2, 1.0, 3), 0.2);
    EXPECT_DOUBLE_EQ(effective_noise(0.2, 0.0, 3), 2.0 / 3.0);
    EXPECT_NEAR(effective_noise(0.2, 0.4, 3), 0.2 + 0.6 * (2.0 / 3.0 - 0.2), 1e-15);
}

TEST(ConditionalTable, BayesTwoTypesOneFeature) {
    // P(g=0|θ1)=0.7, P(g=0|θ2)=0.2
    const FeatureLikelihoods lk{{{0.7, 0.3}, {0.2, 0.8}}};
    const auto table = ConditionalTypeTable::from_likelihoods(TypeDistribution{0.5, 0.5}, {2}, lk);
    const std::vector<int> g{0};
    const auto& p = table.lookup(g);
    EXPECT_NEAR(p[0], 0.7 / 0.9, 1e-12);
    EXPECT_NEAR(p[0], 0.7778, 1e-4);
    EXPECT_NEAR(p[1], 0.2222, 1e-4);

    // brute force over the other reading and a skewed prior
    const TypeDistribution prior{0.3, 0.7};
    const auto skewed = ConditionalTypeTable::from_likelihoods(prior, {2}, lk);
    const std::vector<int> g1{1};
    const double a = 0.3 * 0.3, b = 0.7 * 0.8;
    EXPECT_NEAR(skewed.lookup(g1)[0], a / (a + b), 1e-12);
}

TEST(ConditionalTable, UninformativeSignalKeepsPrior) {
    const FeatureLikelihoods lk{{{0.4, 0.6}, {0.4, 0.6}, {0.4, 0.6}}};
    const TypeDistribution prior{0.2, 0.5, 0.3};
    const auto table = ConditionalTypeTable::from_likelihoods(prior, {2}, lk);
    for (int v = 0; v < 2; ++v) {
        const std::vector<int> g{v};
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(table.lookup(g)[j], prior[j], 1e-12);
    }
}

TEST(ConditionalTable, OneHotPriorIsAbsorbing) {
    const FeatureLikelihoods lk{{{0.1, 0.9}, {0.9, 0.1}}};
    const auto table = ConditionalTypeTable::from_likelihoods(TypeDistribution{1.0, 0.0}, {2}, lk);
    for (int v = 0; v < 2; ++v) {
        const std::vector<int> g{v};
        EXPECT_EQ(table.lookup(g), (TypeDistribution{1.0, 0.0}));
    }
}

TEST(ConditionalTable, EveryEntryIsADistribution) {
    const std::vector<int> levels{3, 2, 4};
    FeatureLikelihoods lk(3, std::vector<std::vector<double>>(3));
    Rng rng(4);
    for (std::size_t f = 0; f < 3; ++f)
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<double> row(static_cast<std::size_t>(levels[f]));
            for (double& x : row) x = rng.uniform(0.01, 1.0);
            const auto n = normalize(row);
            lk[f][j].assign(n.begin(), n.end());
        }
    const auto table = ConditionalTypeTable::from_likelihoods(TypeDistribution::uniform(3), levels, lk);
    EXPECT_EQ(table.size(), 24u);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 4; ++c) {
                const std::vector<int> g{a, b, c};
                const auto& p = table.lookup(g);
                double s = 0.0, joint[3];
                for (std::size_t j = 0; j < 3; ++j) {
                    s += p[j];
                    joint[j] = lk[0][j][a] * lk[1][j][b] * lk[2][j][c];
                }
                EXPECT_NEAR(s, 1.0, 1e-12);
                const double z = joint[0] + joint[1] + joint[2];
                for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p[j], joint[j] / z, 1e-12);
            }
}

TEST(ConditionalTable, RejectsUnknownCombination) {
    const FeatureLikelihoods lk{{{0.7, 0.3}, {0.2, 0.8}}};
    const auto table = ConditionalTypeTable::from_likelihoods(TypeDistribution{0.5, 0.5}, {2}, lk);
    const std::vector<int> bad{2};
    const std::vector<int> wrong_len{0, 1};
    EXPECT_THROW(table.lookup(bad), ConfigError);
    EXPECT_THROW(table.lookup(wrong_len), ConfigError);
}

TEST(ExpertWeight, DefaultTable) {
    auto env = EnvironmentState::with_default_weights(Condition::Rain);
    EXPECT_DOUBLE_EQ(expert_weight(SensorKind::IR, env, 0), 0.3);
    env.condition = Condition::HighMetalSoil;
    EXPECT_DOUBLE_EQ(expert_weight(SensorKind::MD, env, 0), 0.4);
    env.condition = Condition::Clear;
    EXPECT_DOUBLE_EQ(expert_weight(SensorKind::GPR, env, 0), 1.0);
}

TEST(ExpertWeight, MissingEntryIsConfigError) {
    EnvironmentState env;
    EXPECT_THROW(expert_weight(SensorKind::MD, env, 0), ConfigError);
    env.weights[{SensorKind::MD, Condition::Clear}] = 1.5;
    EXPECT_THROW(env.validate(), ConfigError);
}
