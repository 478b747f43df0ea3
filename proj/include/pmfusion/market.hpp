#pragma once

// Market maker: decision weight ϖ, weighted-average payment, report aggregation and
// end-of-window settlement.

#include <map>
#include <vector>

#include "pmfusion/core.hpp"
#include "pmfusion/decision_maker.hpp"
#include "pmfusion/scoring.hpp"
#include "pmfusion/sensor_agent.hpp"

namespace pmfusion {

/// ϖ(d^{[1:t]}, θ_j) = Σ_i P(d_i|θ_j) · u_j, floored at kWeightEpsilon.
inline double decision_weight(std::span<const DecisionRecord> decisions, std::size_t type_index,
                              const DecisionModel& model) {
    double w = 0.0;
    for (const auto& d : decisions) w += model.probability(d.decision_id, type_index) * model.utilities.at(type_index);
    return std::max(w, kWeightEpsilon);
}

inline std::vector<double> decision_weights(std::span<const DecisionRecord> decisions, std::size_t m,
                                            const DecisionModel& model) {
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = decision_weight(decisions, j, model);
    return out;
}

/// One instantaneous reward ρ^{a,k} together with the expert weight w^{a,k} of the
/// report that earned it.
struct RewardEntry {
    int time = 0;
    double weight = 1.0;
    double reward = 0.0;
};

using RewardLedger = std::map<int, std::vector<RewardEntry>>;

/// Ψ^ave for type j: Σ_k Σ_a w^{a,k} ρ^{a,k} + ϖ Σ_a w^{a,t} ln r_j^{a,t}, over the agents
/// reporting at step t.
inline double average_payment(std::span<const Report> reports, const RewardLedger& ledgers, double varpi,
                              std::size_t type_index) {
    double rewards = 0.0, scores = 0.0;
    for (const auto& r : reports) {
        if (const auto it = ledgers.find(r.agent_id); it != ledgers.end())
            for (const auto& e : it->second) rewards += e.weight * e.reward;
        if (r.expert_weight != 0.0) scores += r.expert_weight * std::log(r.values[type_index]);
    }
    return rewards + varpi * scores;
}

/// Aggregate belief B^t from the reports of one step.
///
/// Inverting Ψ^ave for each type, the weighted reward sum cancels by subtraction and ϖ by
/// division, leaving B_j ∝ Π_a (r_j^a)^{w^a}: a logarithmic opinion pool with the expert
/// weights as exponents. Evaluated in log space.
inline TypeDistribution aggregate_beliefs(std::span<const Report> reports) {
    if (reports.empty()) throw PreconditionError("aggregate_beliefs: no reports");
    const std::size_t m = reports.front().values.size();
    std::vector<double> log_pool(m, 0.0);
    for (const auto& r : reports) {
        if (r.values.size() != m) throw ArgumentError("aggregate_beliefs: reports disagree on m");
        if (!(r.expert_weight >= 0.0)) throw ArgumentError("aggregate_beliefs: negative expert weight");
        for (std::size_t j = 0; j < m; ++j) {
            if (r.values[j] < kReportEpsilon * (1.0 - 1e-9))
                throw ArgumentError("aggregate_beliefs: report component below clip floor");
            log_pool[j] += r.expert_weight * std::log(r.values[j]);
        }
    }
    return softmax(log_pool);
}

/// Market-maker entry point with the full Ψ^ave inputs. The ledger and ϖ cancel, so the
/// result is exactly aggregate_beliefs(reports).
inline TypeDistribution aggregate_beliefs(std::span<const Report> reports, const RewardLedger& /*ledgers*/,
                                          std::span<const double> /*varpi*/) {
    return aggregate_beliefs(reports);
}

struct Settlement {
    int agent_id = 0;
    int reports = 0;
    double rewards_sum = 0.0;
    double varpi = 0.0;
    double final_report = 0.0;  // r_j of the last report at the true type
    double score = 0.0;
    double total = 0.0;
};

/// Per-object market ledger over the object's time window.
class MarketState {
public:
    MarketState(int object_id, std::size_t m) : object_id_(object_id), m_(m) {}

    int object_id() const noexcept { return object_id_; }
    std::size_t types() const noexcept { return m_; }

    /// B^{t-1}: the latest aggregate, uniform before the first report.
    TypeDistribution current_belief() const {
        return trajectory_.empty() ? TypeDistribution::uniform(m_) : trajectory_.back();
    }

    /// Records one step's reports and their instantaneous rewards (aligned by position),
    /// aggregates them and returns B^t. With no reports B^t = B^{t-1}.
    const TypeDistribution& clear_step(int time, std::vector<Report> reports, std::span<const double> rewards) {
        if (closed_) throw StateError("market for object " + std::to_string(object_id_) + " already closed");
        if (reports.size() != rewards.size()) throw ArgumentError("clear_step: one reward per report required");
        for (std::size_t i = 0; i < reports.size(); ++i)
            ledger_[reports[i].agent_id].push_back({time, reports[i].expert_weight, rewards[i]});
        // a step without reports carries the previous aggregate forward
        trajectory_.push_back(reports.empty() ? current_belief() : aggregate_beliefs(reports));
        reports_by_step_.push_back(std::move(reports));
        return trajectory_.back();
    }

    void record_decision(const DecisionRecord& d) { decisions_.push_back(d); }
    void close() { closed_ = true; }
    bool closed() const noexcept { return closed_; }

    const std::vector<std::vector<Report>>& reports_by_step() const noexcept { return reports_by_step_; }
    const std::vector<TypeDistribution>& aggregate_trajectory() const noexcept { return trajectory_; }
    const std::vector<DecisionRecord>& decisions() const noexcept { return decisions_; }
    const RewardLedger& rewards_ledger() const noexcept { return ledger_; }

    /// Rewards earned so far by one agent.
    std::vector<double> rewards_of(int agent_id) const {
        std::vector<double> out;
        if (const auto it = ledger_.find(agent_id); it != ledger_.end())
            for (const auto& e : it->second) out.push_back(e.reward);
        return out;
    }

private:
    int object_id_;
    std::size_t m_;
    std::vector<std::vector<Report>> reports_by_step_;
    std::vector<TypeDistribution> trajectory_;
    std::vector<DecisionRecord> decisions_;
    RewardLedger ledger_;
    bool closed_ = false;
};

/// Final payments once the true type is revealed. Only an agent's last report is scored;
/// agents that never reported do not appear.
inline std::map<int, Settlement> settle_market(const MarketState& state, std::size_t true_type,
                                               const DecisionModel& model) {
    if (!state.closed()) throw StateError("settle_market: object time window still open");
    if (true_type >= state.types()) throw ArgumentError("settle_market: true type out of range");
    const double varpi = decision_weight(state.decisions(), true_type, model);

    std::map<int, const Report*> last;
    for (const auto& step : state.reports_by_step())
        for (const auto& r : step) last[r.agent_id] = &r;

    std::map<int, Settlement> out;
    for (const auto& [id, report] : last) {
        Settlement s;
        s.agent_id = id;
        const std::vector<double> rewards = state.rewards_of(id);
        s.reports = static_cast<int>(rewards.size());
        s.rewards_sum = payment(rewards, 0.0);
        s.varpi = varpi;
        s.final_report = report->values[true_type];
        s.score = score_report(s.final_report, varpi);
        s.total = payment(rewards, s.score);
        out.emplace(id, s);
    }
    return out;
}

}  // namespace pmfusion
