#pragma once

// Expected-utility deployment decisions and fleet bookkeeping.

#include <string>
#include <vector>

#include "pmfusion/core.hpp"

namespace pmfusion {

inline constexpr int kMaxSensorsPerDecision = 3;

struct DecisionSpec {
    int id = 0;
    SensorCounts deployment{0, 0, 0};  // requested sensors per kind
    std::string label;

    int total() const { return deployment[0] + deployment[1] + deployment[2]; }
};

/// p_table[decision id][type] = P(d_i | θ_j); utilities[type] = u^dec_j.
struct DecisionModel {
    std::vector<std::vector<double>> p_table;
    std::vector<double> utilities;

    double probability(int decision_id, std::size_t type) const {
        if (decision_id < 0 || static_cast<std::size_t>(decision_id) >= p_table.size())
            throw ConfigError("decision model has no row for decision " + std::to_string(decision_id));
        const auto& row = p_table[static_cast<std::size_t>(decision_id)];
        if (type >= row.size() || type >= utilities.size())
            throw ConfigError("decision model has no entry for type " + std::to_string(type));
        return row[type];
    }

    void validate(std::size_t m) const {
        if (utilities.size() != m) throw ConfigError("decision model: one utility per type required");
        for (double u : utilities)
            if (!std::isfinite(u)) throw ConfigError("decision model: non-finite utility");
        for (const auto& row : p_table) {
            if (row.size() != m) throw ConfigError("decision model: one probability per type required");
            for (double p : row)
                if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("decision model: probability outside [0,1]");
        }
    }
};

struct DecisionRecord {
    int time = 0;
    int decision_id = 0;
    double expected_utility = 0.0;
    SensorCounts requested{0, 0, 0};
    SensorCounts deployed{0, 0, 0};
    SensorCounts shortfall{0, 0, 0};
};

/// EU^dec(d, B) = Σ_j P(d|θ_j) · u_j · B_j.
inline double expected_utility(const DecisionSpec& decision, const TypeDistribution& belief,
                               const DecisionModel& model) {
    double eu = 0.0;
    for (std::size_t j = 0; j < belief.size(); ++j)
        eu += model.probability(decision.id, j) * model.utilities.at(j) * belief[j];
    return eu;
}

/// argmax_d EU^dec(d, B); ties go to the lowest decision id.
inline DecisionRecord decide(const TypeDistribution& belief, std::span<const DecisionSpec> decisions,
                             const DecisionModel& model, int time = 0) {
    if (decisions.empty()) throw PreconditionError("decide: empty decision set");
    const DecisionSpec* best = nullptr;
    double best_eu = 0.0;
    for (const auto& d : decisions) {
        const double eu = expected_utility(d, belief, model);
        if (!best || eu > best_eu || (eu == best_eu && d.id < best->id)) {
            best = &d;
            best_eu = eu;
        }
    }
    DecisionRecord rec;
    rec.time = time;
    rec.decision_id = best->id;
    rec.expected_utility = best_eu;
    rec.requested = best->deployment;
    return rec;
}

struct Deployment {
    DecisionRecord record;  // with deployed/shortfall filled in
    SensorCounts fleet;     // availability after deployment
};

/// Deploys min(requested, available) per kind. A shortfall is recorded, never fatal.
inline Deployment apply_decision(DecisionRecord record, SensorCounts fleet) {
    for (std::size_t k = 0; k < kSensorKinds; ++k) {
        if (fleet[k] < 0) throw ArgumentError("apply_decision: negative fleet count");
        const int n = std::min(record.requested[k], fleet[k]);
        record.deployed[k] = n;
        record.shortfall[k] = record.requested[k] - n;
        fleet[k] -= n;
    }
    return {record, fleet};
}

/// Deploy nothing; 1-3 of a single kind; the four mixed one-of-each combinations.
inline std::vector<DecisionSpec> default_decision_set() {
    std::vector<DecisionSpec> out;
    out.push_back({0, {0, 0, 0}, "none"});
    for (SensorKind k : kAllSensorKinds)
        for (int n = 1; n <= 3; ++n) {
            DecisionSpec d{static_cast<int>(out.size()), {0, 0, 0}, std::to_string(n) + std::string(to_string(k))};
            d.deployment[index_of(k)] = n;
            out.push_back(d);
        }
    out.push_back({static_cast<int>(out.size()), {1, 1, 0}, "1MD+1IR"});
    out.push_back({static_cast<int>(out.size()), {1, 0, 1}, "1MD+1GPR"});
    out.push_back({static_cast<int>(out.size()), {0, 1, 1}, "1IR+1GPR"});
    out.push_back({static_cast<int>(out.size()), {1, 1, 1}, "1MD+1IR+1GPR"});
    return out;
}

/// Columns are P(· | θ_j) over the 14 default decisions for (mine, metallic, non-metallic).
/// Mine mass favours a GPR deployment, metallic mass mixed MD/IR, non-metallic mass cheap MD.
inline DecisionModel default_decision_model() {
    DecisionModel m;
    m.p_table = {
        {0.01, 0.01, 0.01},  // none
        {0.10, 0.12, 0.18},  // 1MD
        {0.05, 0.06, 0.10},  // 2MD
        {0.02, 0.03, 0.05},  // 3MD
        {0.08, 0.12, 0.16},  // 1IR
        {0.03, 0.05, 0.06},  // 2IR
        {0.01, 0.02, 0.03},  // 3IR
        {0.20, 0.12, 0.08},  // 1GPR
        {0.06, 0.04, 0.02},  // 2GPR
        {0.01, 0.01, 0.01},  // 3GPR
        {0.12, 0.16, 0.14},  // 1MD+1IR
        {0.14, 0.10, 0.06},  // 1MD+1GPR
        {0.10, 0.10, 0.06},  // 1IR+1GPR
        {0.07, 0.06, 0.04},  // 1MD+1IR+1GPR
    };
    m.utilities = {10.0, 6.0, 6.0};
    return m;
}

}  // namespace pmfusion
