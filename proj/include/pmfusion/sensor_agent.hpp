#pragma once

// Sensor-agent behaviour: belief update, report value/cost, report construction and
// strategy choice.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pmfusion/core.hpp"
#include "pmfusion/rng.hpp"
#include "pmfusion/scoring.hpp"

namespace pmfusion {

enum class Strategy : int { Truthful = 0, Malicious = 1 };

inline std::string_view to_string(Strategy s) { return s == Strategy::Truthful ? "truthful" : "malicious"; }

inline Strategy strategy_from_string(std::string_view s) {
    if (s == "truthful") return Strategy::Truthful;
    if (s == "malicious") return Strategy::Malicious;
    throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

struct AgentState {
    int id = 0;
    SensorKind sensor_type = SensorKind::MD;
    TypeDistribution belief;
    // Truthful agents are self-interested and pick their report through choose_strategy;
    // malicious agents always manipulate.
    Strategy disposition = Strategy::Truthful;
    int reports_made = 0;
    double cumulative_reward = 0.0;
    double w_bel = 0.5;
};

struct Report {
    int agent_id = 0;
    int time = 0;
    TypeDistribution values;
    double expert_weight = 1.0;
    Strategy strategy = Strategy::Truthful;
};

struct ValueFunctionParams {
    int nu = 5;
    int n_threshold = 5;
    int n_max = 20;

    void validate() const {
        if (nu <= 0) throw ConfigError("value function: nu must be a positive integer");
        if (!(0 < n_threshold && n_threshold < n_max))
            throw ConfigError("value function: need 0 < n_threshold < n_max");
    }
};

/// b = w_bel · P(Θ|g) + (1 - w_bel) · B.
inline TypeDistribution update_belief(const TypeDistribution& signal_posterior, const TypeDistribution& market_belief,
                                      double w_bel) {
    if (!(w_bel >= 0.0 && w_bel <= 1.0)) throw ArgumentError("update_belief: w_bel outside [0,1]");
    if (signal_posterior.size() != market_belief.size()) throw ArgumentError("update_belief: size mismatch");
    std::vector<double> b(signal_posterior.size());
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = w_bel * signal_posterior[j] + (1.0 - w_bel) * market_belief[j];
    return TypeDistribution(std::move(b));
}

/// Constant ν up to n_threshold reports, then linearly decreasing to zero at n_max.
inline double report_value(int n, const ValueFunctionParams& p) {
    if (n < 1) throw ArgumentError("report_value: n must be at least 1");
    if (n <= p.n_threshold) return static_cast<double>(p.nu);
    return static_cast<double>(p.nu) * static_cast<double>(n - p.n_max) / static_cast<double>(p.n_threshold - p.n_max);
}

/// C^a(r): a per-sensor-kind constant, independent of the report's content.
inline double report_cost(const AgentState& /*agent*/, const SensorTypeSpec& spec) { return spec.report_cost; }

/// ρ = V - C.
inline double instantaneous_reward(double value, double cost) { return value - cost; }

/// Raises every component to at least `epsilon` and rescales the rest so the vector still
/// sums to one. Clipped components end exactly at `epsilon`.
inline TypeDistribution clip_report(std::span<const double> r, double epsilon = kReportEpsilon) {
    const std::size_t m = r.size();
    if (m == 0) throw ArgumentError("clip_report: empty report");
    if (epsilon * static_cast<double>(m) >= 1.0) throw ArgumentError("clip_report: epsilon too large for m");
    std::vector<bool> fixed(m, false);
    std::vector<double> out(r.begin(), r.end());
    for (;;) {
        std::size_t n_fixed = 0;
        double free_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (fixed[j]) ++n_fixed;
            else free_sum += r[j];
        }
        const double free_mass = 1.0 - static_cast<double>(n_fixed) * epsilon;
        bool changed = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (fixed[j]) {
                out[j] = epsilon;
                continue;
            }
            out[j] = free_sum > 0.0 ? r[j] * free_mass / free_sum : free_mass / static_cast<double>(m - n_fixed);
            if (out[j] < epsilon) {
                fixed[j] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return TypeDistribution(std::move(out));
}

/// Report manipulation used by malicious agents. Receives the belief, returns a
/// (possibly unnormalized) report that make_report clips and renormalizes.
using Manipulation = std::function<std::vector<double>(std::span<const double>, Rng&)>;

/// Swaps the two largest components (lowest index wins ties).
inline std::vector<double> swap_top_two(std::span<const double> b, Rng& /*rng*/) {
    std::vector<double> r(b.begin(), b.end());
    if (r.size() < 2) return r;
    std::size_t first = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
        if (r[j] > r[first]) first = j;
    std::size_t second = first == 0 ? 1 : 0;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (j != first && r[j] > r[second]) second = j;
    std::swap(r[first], r[second]);
    return r;
}

inline TypeDistribution make_report(const TypeDistribution& belief, Strategy strategy, Rng& rng,
                                    const Manipulation& manipulate = swap_top_two,
                                    double epsilon = kReportEpsilon) {
    if (strategy == Strategy::Truthful) return clip_report(belief.values(), epsilon);
    const std::vector<double> raw = manipulate(belief.values(), rng);
    return clip_report(normalize(raw).values(), epsilon);
}

/// What an agent knows about the market when choosing how to report.
struct StrategyContext {
    std::vector<double> varpi;          // ϖ(d^{[1:t]}, θ_j) per type, floored
    std::vector<double> decision_mass;  // Σ_i P(d_i|θ_j) per type; empty means all ones
    std::vector<double> rewards_so_far; // ρ^{a,1..t}
    std::vector<double> future_rewards; // ρ the agent expects for the remaining steps up to T
    double epsilon = kReportEpsilon;
    ScoreRule score;                    // empty means score_report
};

/// Agent expected utility of submitting `report` as its final report:
/// Σ_j c_j · b_j · Ψ(rewards, S(r_j, ϖ_j)).
inline double agent_expected_utility(const TypeDistribution& belief, const TypeDistribution& report,
                                     const StrategyContext& ctx) {
    const std::size_t m = belief.size();
    if (report.size() != m || ctx.varpi.size() != m) throw ArgumentError("agent_expected_utility: size mismatch");
    std::vector<double> rewards = ctx.rewards_so_far;
    rewards.insert(rewards.end(), ctx.future_rewards.begin(), ctx.future_rewards.end());
    double eu = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double mass = ctx.decision_mass.empty() ? 1.0 : ctx.decision_mass[j];
        const double s = ctx.score ? ctx.score(report[j], ctx.varpi[j]) : score_report(report[j], ctx.varpi[j], ctx.epsilon);
        eu += mass * belief[j] * payment(rewards, s);
    }
    return eu;
}

/// Strategy that maximizes the agent's expected utility; ties go to truthful.
inline Strategy choose_strategy(const AgentState& agent, std::span<const Strategy> candidates,
                                const StrategyContext& ctx, Rng& rng, const Manipulation& manipulate = swap_top_two) {
    if (candidates.empty()) throw PreconditionError("choose_strategy: no candidate strategies");
    Strategy best = candidates.front();
    double best_eu = -std::numeric_limits<double>::infinity();
    for (Strategy s : candidates) {
        const double eu = agent_expected_utility(agent.belief, make_report(agent.belief, s, rng, manipulate, ctx.epsilon), ctx);
        if (eu > best_eu || (eu == best_eu && s == Strategy::Truthful)) {
            best = s;
            best_eu = eu;
        }
    }
    return best;
}

}  // namespace pmfusion
