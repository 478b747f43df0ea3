#pragma once

// One classification episode: agents sense, report and get paid, the fusion method
// aggregates, the decision maker deploys more sensors, until the stopping rule fires.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmfusion/baselines.hpp"
#include "pmfusion/decision_maker.hpp"
#include "pmfusion/market.hpp"
#include "pmfusion/metrics.hpp"
#include "pmfusion/rng.hpp"
#include "pmfusion/scenario.hpp"
#include "pmfusion/sensor_agent.hpp"
#include "pmfusion/signal_model.hpp"

namespace pmfusion {

enum class Method : int { PM = 0, DS = 1, DDF = 2 };

inline constexpr std::array<Method, 3> kAllMethods{Method::PM, Method::DS, Method::DDF};

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::PM: return "pm";
        case Method::DS: return "ds";
        case Method::DDF: return "ddf";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    for (Method m : kAllMethods)
        if (to_string(m) == s) return m;
    throw ArgumentError("unknown method '" + std::string(s) + "'");
}

/// Conditional type tables for every sensor kind, built once per scenario.
class SignalModel {
public:
    explicit SignalModel(const ScenarioConfig& cfg) {
        for (SensorKind k : kAllSensorKinds)
            tables_[index_of(k)] = ConditionalTypeTable::from_likelihoods(
                cfg.prior, cfg.feature_levels,
                sensor_likelihoods(cfg.feature_distributions, cfg.sensor(k).noise_level, cfg.feature_levels));
    }

    const ConditionalTypeTable& table(SensorKind k) const { return tables_[index_of(k)]; }

private:
    std::array<ConditionalTypeTable, kSensorKinds> tables_;
};

/// Stream identifiers for derive_seed; every random draw in an episode comes from one of these.
enum class Stream : std::uint64_t { Object = 0, Signal = 1, Roster = 2, Report = 3 };

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::initializer_list<std::uint64_t> coords) {
    std::vector<std::uint64_t> all{static_cast<std::uint64_t>(s)};
    all.insert(all.end(), coords.begin(), coords.end());
    std::uint64_t h = seed;
    for (std::uint64_t c : all) h = derive_seed(h, {c});
    return h;
}

inline ObjectInstance sample_object(const ScenarioConfig& cfg, std::size_t true_type, std::uint64_t seed) {
    Rng rng(stream_seed(seed, Stream::Object, {true_type}));
    ObjectInstance obj;
    obj.id = 0;
    obj.true_type = true_type;
    for (std::size_t i = 0; i < cfg.features(); ++i) {
        const auto& dist = cfg.feature_distributions[true_type][i];
        double u = rng.uniform(), acc = 0.0;
        int level = static_cast<int>(dist.size()) - 1;
        for (std::size_t v = 0; v < dist.size(); ++v) {
            acc += dist[v];
            if (u < acc) {
                level = static_cast<int>(v);
                break;
            }
        }
        obj.features.push_back(level);
    }
    return obj;
}

struct RosterEntry {
    int id = 0;
    SensorKind kind = SensorKind::MD;
    Strategy disposition = Strategy::Truthful;
};

/// One agent per fleet sensor, ordered MD, IR, GPR. round(fraction · N) of them, picked by a
/// seeded shuffle, are malicious.
inline std::vector<RosterEntry> build_roster(const ScenarioConfig& cfg, std::uint64_t seed) {
    std::vector<RosterEntry> roster;
    for (SensorKind k : kAllSensorKinds)
        for (int i = 0; i < cfg.sensor(k).count_available; ++i)
            roster.push_back({static_cast<int>(roster.size()), k, Strategy::Truthful});
    std::vector<std::size_t> order(roster.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(stream_seed(seed, Stream::Roster, {}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const auto n_mal = static_cast<std::size_t>(std::lround(cfg.malicious_fraction * static_cast<double>(roster.size())));
    for (std::size_t i = 0; i < n_mal && i < order.size(); ++i) roster[order[i]].disposition = Strategy::Malicious;
    return roster;
}

/// The reading agent `agent_id` gets at step t. Depends only on (seed, object, agent, t), so
/// every fusion method sees the same signal sequence.
inline Signal signal_for(const ScenarioConfig& cfg, const ObjectInstance& obj, const RosterEntry& agent,
                         std::uint64_t seed, int t) {
    Rng rng(stream_seed(seed, Stream::Signal,
                        {obj.true_type, static_cast<std::uint64_t>(agent.id), static_cast<std::uint64_t>(t)}));
    return sample_signal(obj, cfg.sensor(agent.kind), cfg.feature_levels, cfg.environment, rng, t);
}

struct StepRecord {
    int time = 0;
    std::vector<int> reporting;  // A_rep^t
    std::vector<int> joined;     // agents reporting for the first time at t
    std::vector<Report> reports;
    std::vector<double> rewards;  // aligned with reports
    TypeDistribution estimate;
    std::optional<DecisionRecord> decision;
    double rmse = 0.0;
    double nmse_db = 0.0;
    double kl = 0.0;
};

struct EpisodeRecord {
    Method method = Method::PM;
    std::uint64_t seed = 0;
    ObjectInstance object;
    std::vector<RosterEntry> roster;
    std::vector<StepRecord> steps;
    int steps_used = 0;
    bool reached_confidence = false;
    std::size_t classified_type = 0;
    std::map<int, Settlement> settlement;  // PM only

    const StepRecord& final_step() const { return steps.back(); }
    bool correct() const { return classified_type == object.true_type; }
};

namespace detail {

/// P(metal level | metal reading) for one sensor, from the type-marginal level prior and the
/// sensor's confusion channel on the first feature.
inline TypeDistribution metal_level_posterior(const ScenarioConfig& cfg, SensorKind kind, int reading) {
    const int levels = cfg.feature_levels[0];
    std::vector<double> p(static_cast<std::size_t>(levels), 0.0);
    for (int l = 0; l < levels; ++l) {
        double prior = 0.0;
        for (std::size_t j = 0; j < cfg.types(); ++j)
            prior += cfg.prior[j] * cfg.feature_distributions[j][0][static_cast<std::size_t>(l)];
        p[static_cast<std::size_t>(l)] = prior * confusion_probability(reading, l, cfg.sensor(kind).noise_level[0], levels);
    }
    return normalize(p);
}

}  // namespace detail

inline EpisodeRecord run_episode(const ScenarioConfig& cfg, std::size_t true_type, std::uint64_t seed, Method method,
                                 const SignalModel& model) {
    const std::size_t m = cfg.types();
    const int T = cfg.stopping.window;
    const TypeDistribution truth = one_hot(true_type, m);

    EpisodeRecord rec;
    rec.method = method;
    rec.seed = seed;
    rec.object = sample_object(cfg, true_type, seed);
    rec.roster = build_roster(cfg, seed);

    std::vector<AgentState> agents;
    for (const auto& r : rec.roster) {
        AgentState a;
        a.id = r.id;
        a.sensor_type = r.kind;
        a.belief = cfg.prior;
        a.disposition = r.disposition;
        a.w_bel = cfg.w_bel;
        agents.push_back(a);
    }
    std::vector<int> start_step(agents.size(), 0);  // 0 = not deployed
    SensorCounts fleet = cfg.fleet();

    auto deploy = [&](SensorKind kind, int n, int at) {
        for (auto& a : agents) {
            if (n == 0) break;
            if (a.sensor_type == kind && start_step[static_cast<std::size_t>(a.id)] == 0) {
                start_step[static_cast<std::size_t>(a.id)] = at;
                --n;
            }
        }
    };
    // the object is detected by one sensor that reports at t = 1
    deploy(cfg.bootstrap_sensor, 1, 1);
    --fleet[index_of(cfg.bootstrap_sensor)];

    MarketState market(rec.object.id, m);
    FilterState filter{cfg.prior, 0};
    std::vector<MassFunction> metal_evidence;
    TypeDistribution belief = market.current_belief();
    const std::array<Strategy, 2> candidates{Strategy::Truthful, Strategy::Malicious};

    for (int t = 1; t <= T; ++t) {
        StepRecord step;
        step.time = t;
        std::vector<Report> reports;
        std::vector<double> rewards;
        std::vector<Signal> signals;

        for (auto& a : agents) {
            const int start = start_step[static_cast<std::size_t>(a.id)];
            if (start == 0 || start > t) continue;
            if (!cfg.report_every_step && start != t) continue;
            const auto& entry = rec.roster[static_cast<std::size_t>(a.id)];
            const Signal sig = signal_for(cfg, rec.object, entry, seed, t);
            a.belief = update_belief(posterior_given_signal(sig, model.table(a.sensor_type)), belief, a.w_bel);

            Rng report_rng(stream_seed(seed, Stream::Report, {true_type, static_cast<std::uint64_t>(a.id), static_cast<std::uint64_t>(t)}));
            Strategy strategy = Strategy::Malicious;
            const double cost = report_cost(a, cfg.sensor(a.sensor_type));
            if (a.disposition == Strategy::Truthful) {
                StrategyContext ctx;
                ctx.varpi = decision_weights(market.decisions(), m, cfg.decision_model);
                if (cfg.strategy_varpi == VarpiView::Scalar) {
                    double expected = 0.0;
                    for (std::size_t j = 0; j < m; ++j) expected += a.belief[j] * ctx.varpi[j];
                    ctx.varpi.assign(m, std::max(expected, kWeightEpsilon));
                }
                ctx.rewards_so_far = market.rewards_of(a.id);
                for (int k = a.reports_made + 1; k <= a.reports_made + (T - t + 1); ++k)
                    ctx.future_rewards.push_back(instantaneous_reward(report_value(k, cfg.value), cost));
                strategy = choose_strategy(a, candidates, ctx, report_rng);
            }

            Report r;
            r.agent_id = a.id;
            r.time = t;
            r.values = make_report(a.belief, strategy, report_rng);
            r.expert_weight = expert_weight(a.sensor_type, cfg.environment, t);
            r.strategy = strategy;

            ++a.reports_made;
            const double rho = instantaneous_reward(report_value(a.reports_made, cfg.value), cost);
            a.cumulative_reward += rho;

            step.reporting.push_back(a.id);
            if (start == t) step.joined.push_back(a.id);
            reports.push_back(r);
            rewards.push_back(rho);
            signals.push_back(sig);
        }

        // market bookkeeping (rewards, ledger, decisions) runs for every method; only the
        // aggregation step differs
        const TypeDistribution pooled = market.clear_step(t, reports, rewards);
        if (!reports.empty()) switch (method) {
            case Method::PM:
                belief = pooled;
                break;
            case Method::DDF:
                for (const auto& r : reports) filter = ddf_update(filter, r.values);
                belief = filter.posterior;
                break;
            case Method::DS: {
                const std::size_t levels = cfg.ds_frames.friendly_type_by_level.size();
                std::vector<std::vector<MassFunction>> level2(levels);
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    const auto& r = reports[i];
                    const SensorKind kind = rec.roster[static_cast<std::size_t>(r.agent_id)].kind;
                    TypeDistribution metal = detail::metal_level_posterior(cfg, kind, signals[i].values[0]);
                    if (r.strategy == Strategy::Malicious) {
                        Rng unused(0);
                        metal = normalize(swap_top_two(metal.values(), unused));
                    }
                    metal_evidence.push_back(MassFunction::discounted(metal, r.expert_weight));
                    for (std::size_t l = 0; l < levels; ++l) {
                        const double mine = r.values[cfg.ds_frames.mine_type];
                        const double friendly = r.values[cfg.ds_frames.friendly_type_by_level[l]];
                        level2[l].push_back(MassFunction::discounted(normalize({mine, friendly}), r.expert_weight));
                    }
                }
                belief = ds_classify(metal_evidence, level2, cfg.ds_frames).types;
                break;
            }
        }

        step.estimate = belief;
        step.rmse = rmse(belief, truth);
        step.nmse_db = nmse_db(belief, truth);
        step.kl = kl_divergence(belief, truth);
        step.reports = std::move(reports);
        step.rewards = std::move(rewards);

        const bool confident = belief.max() >= cfg.stopping.confidence;
        if (!confident && t < T) {
            std::vector<DecisionSpec> feasible;
            for (const auto& d : cfg.decisions) {
                bool ok = true;
                for (std::size_t k = 0; k < kSensorKinds; ++k) ok = ok && d.deployment[k] <= fleet[k];
                if (ok) feasible.push_back(d);
            }
            if (!feasible.empty()) {
                const Deployment dep = apply_decision(decide(belief, feasible, cfg.decision_model, t), fleet);
                fleet = dep.fleet;
                for (SensorKind k : kAllSensorKinds) deploy(k, dep.record.deployed[index_of(k)], t + 1);
                market.record_decision(dep.record);
                step.decision = dep.record;
            }
        }
        rec.steps.push_back(std::move(step));
        if (confident) {
            rec.reached_confidence = true;
            break;
        }
    }

    rec.steps_used = static_cast<int>(rec.steps.size());
    rec.classified_type = rec.steps.back().estimate.argmax();
    market.close();
    if (method == Method::PM) rec.settlement = settle_market(market, true_type, cfg.decision_model);
    return rec;
}

inline EpisodeRecord run_episode(const ScenarioConfig& cfg, std::size_t true_type, std::uint64_t seed, Method method) {
    cfg.validate();
    return run_episode(cfg, true_type, seed, method, SignalModel(cfg));
}

/// Canonical JSON rendering of an episode, used for determinism checks and debugging.
inline nlohmann::json episode_to_json(const EpisodeRecord& e) {
    using nlohmann::json;
    json doc;
    doc["method"] = std::string(to_string(e.method));
    doc["seed"] = e.seed;
    doc["true_type"] = e.object.true_type;
    doc["features"] = e.object.features;
    doc["steps_used"] = e.steps_used;
    doc["reached_confidence"] = e.reached_confidence;
    doc["classified_type"] = e.classified_type;
    for (const auto& r : e.roster)
        doc["roster"].push_back({{"id", r.id}, {"sensor", std::string(to_string(r.kind))}, {"disposition", std::string(to_string(r.disposition))}});
    for (const auto& s : e.steps) {
        json js;
        js["t"] = s.time;
        js["reporting"] = s.reporting;
        js["estimate"] = std::vector<double>(s.estimate.begin(), s.estimate.end());
        js["rewards"] = s.rewards;
        for (const auto& r : s.reports)
            js["reports"].push_back({{"agent", r.agent_id}, {"w", r.expert_weight}, {"strategy", std::string(to_string(r.strategy))},
                                     {"r", std::vector<double>(r.values.begin(), r.values.end())}});
        if (s.decision)
            js["decision"] = {{"id", s.decision->decision_id}, {"eu", s.decision->expected_utility}, {"deployed", s.decision->deployed}};
        js["rmse"] = s.rmse;
        js["nmse_db"] = s.nmse_db;
        js["kl"] = s.kl;
        doc["steps"].push_back(js);
    }
    for (const auto& [id, s] : e.settlement)
        doc["settlement"].push_back({{"agent", id}, {"rewards", s.rewards_sum}, {"varpi", s.varpi}, {"score", s.score}, {"total", s.total}});
    return doc;
}

}  // namespace pmfusion
