#pragma once

// Scoring rule and payment function of the market maker. Kept separate from market.hpp so
// agents can evaluate candidate reports without depending on market state.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>

#include "pmfusion/errors.hpp"

namespace pmfusion {

/// Lower clip applied to every report component before it reaches the logarithm.
inline constexpr double kReportEpsilon = 1e-6;
/// Floor on the decision weight ϖ.
inline constexpr double kWeightEpsilon = 1e-9;

/// S = ϖ · ln(r_j). Non-positive, zero only for r_j = 1.
inline double score_report(double r_j, double varpi, double epsilon = kReportEpsilon) {
    // clipped-and-renormalized reports can land a rounding step under the floor
    if (!(r_j >= epsilon * (1.0 - 1e-9)))
        throw ArgumentError("score_report: r_j=" + std::to_string(r_j) + " below clip floor");
    if (r_j > 1.0 + 1e-12) throw ArgumentError("score_report: r_j above 1");
    if (!(varpi > 0.0) || !std::isfinite(varpi)) throw ArgumentError("score_report: varpi must be positive");
    return varpi * std::log(std::min(r_j, 1.0));
}

/// Ψ = Σ_k ρ^k + S.
inline double payment(std::span<const double> rewards, double final_score) {
    return std::accumulate(rewards.begin(), rewards.end(), 0.0) + final_score;
}

/// Scoring rule signature (r_j, ϖ) -> payoff, so tests can swap in non-proper rules.
using ScoreRule = std::function<double(double, double)>;

}  // namespace pmfusion
