#pragma once

// Probability-simplex primitives and the domain types shared by every module.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmfusion/errors.hpp"

namespace pmfusion {

inline constexpr double kSumTolerance = 1e-9;

/// Probability vector over the m object types.
///
/// Every instance is validated on construction: components lie in [0,1] and sum to one
/// within kSumTolerance. Operations that produce distributions build them through this
/// constructor, so an unnormalized vector never escapes a module boundary.
class TypeDistribution {
public:
    TypeDistribution() = default;

    explicit TypeDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw ArgumentError("TypeDistribution: empty probability vector");
        double sum = 0.0;
        for (double p : probs_) {
            if (!std::isfinite(p) || p < -1e-12 || p > 1.0 + 1e-12)
                throw ArgumentError("TypeDistribution: component outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw ArgumentError("TypeDistribution: components sum to " + std::to_string(sum));
        for (double& p : probs_) p = std::clamp(p, 0.0, 1.0);
    }

    TypeDistribution(std::initializer_list<double> probs)
        : TypeDistribution(std::vector<double>(probs)) {}

    static TypeDistribution uniform(std::size_t m) {
        if (m == 0) throw ArgumentError("TypeDistribution::uniform: m must be positive");
        return TypeDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t j) const { return probs_[j]; }
    std::span<const double> values() const noexcept { return probs_; }
    auto begin() const noexcept { return probs_.begin(); }
    auto end() const noexcept { return probs_.end(); }

    /// Index of the largest component (lowest index on ties).
    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
    }
    double max() const { return probs_[argmax()]; }

    friend bool operator==(const TypeDistribution&, const TypeDistribution&) = default;

private:
    std::vector<double> probs_;
};

/// One-hot vector with unit mass at `type_index` (1-based, as in the type set θ1..θm).
inline TypeDistribution vec_of_type(int type_index, int m) {
    if (m < 1 || type_index < 1 || type_index > m)
        throw ArgumentError("vec_of_type: index " + std::to_string(type_index) +
                            " outside 1.." + std::to_string(m));
    std::vector<double> v(static_cast<std::size_t>(m), 0.0);
    v[static_cast<std::size_t>(type_index - 1)] = 1.0;
    return TypeDistribution(std::move(v));
}

/// Zero-based convenience used internally.
inline TypeDistribution one_hot(std::size_t index, std::size_t m) {
    return vec_of_type(static_cast<int>(index) + 1, static_cast<int>(m));
}

inline TypeDistribution normalize(std::span<const double> raw) {
    if (raw.empty()) throw DegenerateInputError("normalize: empty vector");
    double sum = 0.0;
    for (double x : raw) {
        if (!std::isfinite(x) || x < 0.0) throw DegenerateInputError("normalize: negative or non-finite component");
        sum += x;
    }
    if (!(sum > 0.0)) throw DegenerateInputError("normalize: no strictly positive component");
    std::vector<double> out(raw.begin(), raw.end());
    for (double& x : out) x /= sum;
    return TypeDistribution(std::move(out));
}

inline TypeDistribution normalize(std::initializer_list<double> raw) {
    return normalize(std::span<const double>(raw.begin(), raw.size()));
}

/// Normalized exp(scores), shifted by the maximum for stability.
inline TypeDistribution softmax(std::span<const double> scores) {
    if (scores.empty()) throw DegenerateInputError("softmax: empty vector");
    const double peak = *std::max_element(scores.begin(), scores.end());
    std::vector<double> w(scores.size());
    std::transform(scores.begin(), scores.end(), w.begin(), [peak](double s) { return std::exp(s - peak); });
    return normalize(w);
}

// ---------------------------------------------------------------------------
// Sensors and objects
// ---------------------------------------------------------------------------

enum class SensorKind : int { MD = 0, IR = 1, GPR = 2 };

inline constexpr std::size_t kSensorKinds = 3;
inline constexpr std::array<SensorKind, kSensorKinds> kAllSensorKinds{SensorKind::MD, SensorKind::IR, SensorKind::GPR};

/// Per-sensor-kind counters (fleet availability, deployments, requests).
using SensorCounts = std::array<int, kSensorKinds>;

inline std::size_t index_of(SensorKind k) { return static_cast<std::size_t>(k); }

inline std::string_view to_string(SensorKind k) {
    switch (k) {
        case SensorKind::MD: return "MD";
        case SensorKind::IR: return "IR";
        case SensorKind::GPR: return "GPR";
    }
    return "?";
}

inline SensorKind sensor_kind_from_string(std::string_view s) {
    for (SensorKind k : kAllSensorKinds)
        if (to_string(k) == s) return k;
    throw ConfigError("unknown sensor type '" + std::string(s) + "'");
}

struct SensorTypeSpec {
    SensorKind kind = SensorKind::MD;
    std::vector<double> noise_level;  // per feature, each in [0,1]
    double report_cost = 0.0;
    int count_available = 0;

    void validate(std::size_t features) const {
        if (noise_level.size() != features)
            throw ConfigError(std::string(to_string(kind)) + ": noise_level needs one entry per feature");
        for (double n : noise_level)
            if (!(n >= 0.0 && n <= 1.0)) throw ConfigError(std::string(to_string(kind)) + ": noise_level outside [0,1]");
        if (!(report_cost >= 0.0)) throw ConfigError(std::string(to_string(kind)) + ": negative report_cost");
        if (count_available < 0) throw ConfigError(std::string(to_string(kind)) + ": negative count_available");
    }
};

struct ObjectInstance {
    int id = 0;
    std::size_t true_type = 0;       // zero-based index into the type set
    std::vector<int> features;       // categorical level per feature

    void validate(std::size_t m, std::span<const int> feature_levels) const {
        if (true_type >= m) throw ArgumentError("ObjectInstance: true_type out of range");
        if (features.size() != feature_levels.size())
            throw ArgumentError("ObjectInstance: feature vector length mismatch");
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i] < 0 || features[i] >= feature_levels[i])
                throw ArgumentError("ObjectInstance: feature level out of range");
    }
};

}  // namespace pmfusion
