#pragma once

#include <cmath>

#include "pmfusion/core.hpp"

namespace pmfusion {

inline constexpr double kKlEpsilon = 1e-6;
inline constexpr double kMseFloor = 1e-12;

inline double rmse(const TypeDistribution& est, const TypeDistribution& truth) {
    if (est.size() != truth.size()) throw ArgumentError("rmse: length mismatch");
    double ss = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) ss += (est[j] - truth[j]) * (est[j] - truth[j]);
    return std::sqrt(ss) / std::sqrt(static_cast<double>(est.size()));
}

/// 10·log10(MSE / var(truth)), MSE floored at kMseFloor.
inline double nmse_db(const TypeDistribution& est, const TypeDistribution& truth) {
    if (est.size() != truth.size()) throw ArgumentError("nmse_db: length mismatch");
    const double m = static_cast<double>(est.size());
    double mse = 0.0, sq = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) {
        mse += (est[j] - truth[j]) * (est[j] - truth[j]);
        sq += truth[j] * truth[j];
        mean += truth[j];
    }
    mse /= m;
    const double var = sq / m - (mean / m) * (mean / m);
    if (!(var > 0.0)) throw ArgumentError("nmse_db: truth vector has zero variance");
    return 10.0 * std::log10(std::max(mse, kMseFloor) / var);
}

/// D(est || truth) after adding epsilon to both and renormalizing.
inline double kl_divergence(const TypeDistribution& est, const TypeDistribution& truth, double epsilon = kKlEpsilon) {
    if (est.size() != truth.size()) throw ArgumentError("kl_divergence: length mismatch");
    if (!(epsilon > 0.0)) throw ArgumentError("kl_divergence: epsilon must be positive");
    const double z = 1.0 + epsilon * static_cast<double>(est.size());
    double d = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double p = (est[j] + epsilon) / z;
        const double q = (truth[j] + epsilon) / z;
        d += p * std::log(p / q);
    }
    return std::max(d, 0.0);
}

}  // namespace pmfusion
