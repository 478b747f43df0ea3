#pragma once

// Generative sensor model, the signal -> type posterior table, and expert report weights.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pmfusion/core.hpp"
#include "pmfusion/rng.hpp"

namespace pmfusion {

struct Signal {
    std::vector<int> values;  // one categorical reading per feature
    SensorKind sensor_type = SensorKind::MD;
    int time = 0;
};

/// likelihood[feature][type][level] = P(g_feature = level | type).
using FeatureLikelihoods = std::vector<std::vector<std::vector<double>>>;

/// P(reading = observed | true level) for the per-feature confusion model used by
/// sample_signal: correct with probability 1 - noise, otherwise uniform over the other levels.
inline double confusion_probability(int observed, int truth, double noise, int levels) {
    if (levels <= 1) return 1.0;
    return observed == truth ? 1.0 - noise : noise / static_cast<double>(levels - 1);
}

/// Complete lookup table g -> P(Θ | g), one entry per combination of feature levels.
class ConditionalTypeTable {
public:
    ConditionalTypeTable() = default;

    /// Builds the table by Bayes' rule under a naive factorization across features:
    /// P(θ | g) ∝ prior(θ) · Π_i P(g_i | θ). Combinations with zero evidence under every
    /// type are unreachable and map to the prior.
    static ConditionalTypeTable from_likelihoods(TypeDistribution prior, std::vector<int> feature_levels,
                                                 const FeatureLikelihoods& likelihood) {
        const std::size_t m = prior.size();
        if (likelihood.size() != feature_levels.size())
            throw ConfigError("likelihood table: one block per feature required");
        for (std::size_t i = 0; i < likelihood.size(); ++i) {
            if (feature_levels[i] < 1) throw ConfigError("likelihood table: feature needs at least one level");
            if (likelihood[i].size() != m) throw ConfigError("likelihood table: one row per type required");
            for (const auto& row : likelihood[i]) {
                if (row.size() != static_cast<std::size_t>(feature_levels[i]))
                    throw ConfigError("likelihood table: one entry per feature level required");
                for (double p : row)
                    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("likelihood table: entry outside [0,1]");
            }
        }

        ConditionalTypeTable table;
        table.prior_ = prior;
        table.levels_ = std::move(feature_levels);
        std::size_t combos = 1;
        for (int l : table.levels_) combos *= static_cast<std::size_t>(l);
        table.entries_.reserve(combos);

        std::vector<int> g(table.levels_.size(), 0);
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<double> joint(prior.begin(), prior.end());
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = 0; j < m; ++j) joint[j] *= likelihood[i][j][static_cast<std::size_t>(g[i])];
            const bool reachable = std::any_of(joint.begin(), joint.end(), [](double x) { return x > 0.0; });
            table.entries_.push_back(reachable ? normalize(joint) : prior);
            // advance mixed-radix counter, first feature fastest
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (++g[i] < table.levels_[i]) break;
                g[i] = 0;
            }
        }
        return table;
    }

    const TypeDistribution& prior() const noexcept { return prior_; }
    const std::vector<int>& feature_levels() const noexcept { return levels_; }
    std::size_t size() const noexcept { return entries_.size(); }

    const TypeDistribution& lookup(std::span<const int> values) const {
        if (values.size() != levels_.size())
            throw ConfigError("signal has " + std::to_string(values.size()) + " features, table expects " +
                              std::to_string(levels_.size()));
        std::size_t code = 0, radix = 1;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0 || values[i] >= levels_[i])
                throw ConfigError("signal combination not present in conditional table");
            code += static_cast<std::size_t>(values[i]) * radix;
            radix *= static_cast<std::size_t>(levels_[i]);
        }
        return entries_[code];
    }

private:
    TypeDistribution prior_;
    std::vector<int> levels_;
    std::vector<TypeDistribution> entries_;
};

/// P(g | θ) seen by one sensor kind: each object type's feature-level distribution pushed
/// through that sensor's per-feature confusion channel.
///
/// feature_dist[type][feature][level] = P(φ_feature = level | type).
inline FeatureLikelihoods sensor_likelihoods(const std::vector<std::vector<std::vector<double>>>& feature_dist,
                                             std::span<const double> noise, std::span<const int> levels) {
    const std::size_t m = feature_dist.size();
    FeatureLikelihoods out(levels.size(), std::vector<std::vector<double>>(m));
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto& dist = feature_dist[j].at(i);
            std::vector<double> row(static_cast<std::size_t>(levels[i]), 0.0);
            for (int v = 0; v < levels[i]; ++v)
                for (int u = 0; u < levels[i]; ++u)
                    row[static_cast<std::size_t>(v)] +=
                        dist.at(static_cast<std::size_t>(u)) * confusion_probability(v, u, noise[i], levels[i]);
            out[i][j] = std::move(row);
        }
    }
    return out;
}

inline TypeDistribution posterior_given_signal(const Signal& signal, const ConditionalTypeTable& table) {
    return table.lookup(signal.values);
}

// ---------------------------------------------------------------------------
// Environment and expert weights
// ---------------------------------------------------------------------------

enum class Condition : int { Clear = 0, Rain = 1, HighMetalSoil = 2 };

inline std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::Clear: return "clear";
        case Condition::Rain: return "rain";
        case Condition::HighMetalSoil: return "high_metal_soil";
    }
    return "?";
}

inline Condition condition_from_string(std::string_view s) {
    for (Condition c : {Condition::Clear, Condition::Rain, Condition::HighMetalSoil})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown environment condition '" + std::string(s) + "'");
}

struct EnvironmentState {
    Condition condition = Condition::Clear;
    std::map<std::pair<SensorKind, Condition>, double> weights;

    /// Unit weight everywhere except IR in rain and MD over metal-rich soil.
    static EnvironmentState with_default_weights(Condition c = Condition::Clear) {
        EnvironmentState env;
        env.condition = c;
        for (SensorKind k : kAllSensorKinds)
            for (Condition cond : {Condition::Clear, Condition::Rain, Condition::HighMetalSoil})
                env.weights[{k, cond}] = 1.0;
        env.weights[{SensorKind::IR, Condition::Rain}] = 0.3;
        env.weights[{SensorKind::MD, Condition::HighMetalSoil}] = 0.4;
        return env;
    }

    void validate() const {
        for (const auto& [key, w] : weights)
            if (!(w > 0.0 && w <= 1.0))
                throw ConfigError("expert weight for " + std::string(to_string(key.first)) + "/" +
                                  std::string(to_string(key.second)) + " outside (0,1]");
    }
};

/// The environment is static over an episode, so `time` does not enter the lookup.
inline double expert_weight(SensorKind sensor, const EnvironmentState& env, int /*time*/) {
    const auto it = env.weights.find({sensor, env.condition});
    if (it == env.weights.end())
        throw ConfigError("no expert weight for " + std::string(to_string(sensor)) + " in " +
                          std::string(to_string(env.condition)));
    return it->second;
}

/// Per-feature error probability actually experienced in `env`. Conditions that lower a
/// sensor's expert weight push its readings toward uninformative (uniform) noise.
inline double effective_noise(double nominal, double weight, int levels) {
    if (levels <= 1) return 0.0;
    const double uninformative = static_cast<double>(levels - 1) / static_cast<double>(levels);
    return nominal + (1.0 - weight) * (uninformative - nominal);
}

inline Signal sample_signal(const ObjectInstance& object, const SensorTypeSpec& sensor,
                            std::span<const int> feature_levels, const EnvironmentState& env, Rng& rng,
                            int time = 0) {
    const double w = expert_weight(sensor.kind, env, time);
    Signal s;
    s.sensor_type = sensor.kind;
    s.time = time;
    s.values.resize(object.features.size());
    for (std::size_t i = 0; i < object.features.size(); ++i) {
        const int levels = feature_levels[i];
        const int truth = object.features[i];
        const double noise = effective_noise(sensor.noise_level.at(i), w, levels);
        if (levels > 1 && rng.uniform() < noise) {
            int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(levels - 1)));
            if (other >= truth) ++other;
            s.values[i] = other;
        } else {
            s.values[i] = truth;
        }
    }
    return s;
}

}  // namespace pmfusion
