#pragma once

// Replicated episodes, per-step summary statistics and CSV export.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "pmfusion/simulation.hpp"

namespace pmfusion {

struct MeanStd {
    double mean = 0.0;
    double stdev = 0.0;  // sample standard deviation; 0 for a single sample
};

inline MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    if (xs.empty()) return out;
    double s = 0.0;
    for (double x : xs) s += x;
    out.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

enum class Metric : int { Rmse = 0, NmseDb = 1, Kl = 2 };
inline constexpr std::array<Metric, 3> kAllMetrics{Metric::Rmse, Metric::NmseDb, Metric::Kl};

inline std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::Rmse: return "rmse";
        case Metric::NmseDb: return "nmse_db";
        case Metric::Kl: return "kl";
    }
    return "?";
}

inline double metric_of(const StepRecord& s, Metric m) {
    switch (m) {
        case Metric::Rmse: return s.rmse;
        case Metric::NmseDb: return s.nmse_db;
        case Metric::Kl: return s.kl;
    }
    return 0.0;
}

/// Metric at step t. Once an episode has stopped its estimate is frozen, so later steps
/// repeat the final value.
inline double metric_at(const EpisodeRecord& e, int t, Metric m) {
    const std::size_t idx = std::min(static_cast<std::size_t>(t - 1), e.steps.size() - 1);
    return metric_of(e.steps[idx], m);
}

struct StepStat {
    int time = 0;
    Method method = Method::PM;
    Metric metric = Metric::Rmse;
    MeanStd value;
};

struct GroupStat {
    Method method = Method::PM;
    std::size_t object_type = 0;
    int runs = 0;
    MeanStd steps;
    MeanStd final_rmse;
    MeanStd final_nmse_db;
    MeanStd final_kl;
    MeanStd sensors_used;
    double accuracy = 0.0;  // share of runs whose final argmax is the true type
};

struct ExperimentResult {
    std::vector<Method> methods;
    std::vector<EpisodeRecord> episodes;
    std::vector<StepStat> per_step;    // mean over object types, spread over runs
    std::vector<GroupStat> per_group;  // per (method, object type)
    int window = 0;
};

inline std::vector<const EpisodeRecord*> select(const ExperimentResult& r, Method m) {
    std::vector<const EpisodeRecord*> out;
    for (const auto& e : r.episodes)
        if (e.method == m) out.push_back(&e);
    return out;
}

/// Mean final RMSE of one method over all episodes.
inline double mean_final_rmse(const ExperimentResult& r, Method m) {
    std::vector<double> xs;
    for (const auto* e : select(r, m)) xs.push_back(e->final_step().rmse);
    return mean_std(xs).mean;
}

inline void summarize(ExperimentResult& res, std::size_t m_types) {
    res.per_step.clear();
    res.per_group.clear();
    for (Method method : res.methods) {
        const auto eps = select(res, method);
        // spread is over runs: each run's value is first averaged over the object types
        for (int t = 1; t <= res.window; ++t)
            for (Metric metric : kAllMetrics) {
                std::map<std::uint64_t, std::pair<double, int>> by_run;
                for (const auto* e : eps) {
                    auto& [sum, n] = by_run[e->seed];
                    sum += metric_at(*e, t, metric);
                    ++n;
                }
                std::vector<double> xs;
                for (const auto& [seed, acc] : by_run) xs.push_back(acc.first / acc.second);
                res.per_step.push_back({t, method, metric, mean_std(xs)});
            }
        for (std::size_t type = 0; type < m_types; ++type) {
            std::vector<double> steps, rm, nm, kl, sensors;
            int correct = 0;
            for (const auto* e : eps) {
                if (e->object.true_type != type) continue;
                steps.push_back(e->steps_used);
                rm.push_back(e->final_step().rmse);
                nm.push_back(e->final_step().nmse_db);
                kl.push_back(e->final_step().kl);
                sensors.push_back(static_cast<double>(e->final_step().reporting.size()));
                correct += e->correct() ? 1 : 0;
            }
            if (steps.empty()) continue;
            GroupStat g;
            g.method = method;
            g.object_type = type;
            g.runs = static_cast<int>(steps.size());
            g.steps = mean_std(steps);
            g.final_rmse = mean_std(rm);
            g.final_nmse_db = mean_std(nm);
            g.final_kl = mean_std(kl);
            g.sensors_used = mean_std(sensors);
            g.accuracy = static_cast<double>(correct) / static_cast<double>(steps.size());
            res.per_group.push_back(g);
        }
    }
}

/// Runs cfg.runs replications per configured object type and method. Replication r uses
/// seed cfg.seed + r.
inline ExperimentResult run_experiment(const ScenarioConfig& cfg, std::span<const Method> methods) {
    cfg.validate();
    const SignalModel model(cfg);
    ExperimentResult res;
    res.methods.assign(methods.begin(), methods.end());
    res.window = cfg.stopping.window;
    for (Method method : methods)
        for (std::size_t type : cfg.objects)
            for (int r = 0; r < cfg.runs; ++r)
                res.episodes.push_back(run_episode(cfg, type, cfg.seed + static_cast<std::uint64_t>(r), method, model));
    summarize(res, cfg.types());
    return res;
}

inline ExperimentResult run_experiment(const ScenarioConfig& cfg) {
    return run_experiment(cfg, kAllMethods);
}

namespace detail {

inline std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

inline std::string counts_label(const std::vector<int>& ids, const std::vector<RosterEntry>& roster) {
    SensorCounts c{0, 0, 0};
    for (int id : ids) ++c[index_of(roster[static_cast<std::size_t>(id)].kind)];
    std::string s;
    for (SensorKind k : kAllSensorKinds) {
        if (c[index_of(k)] == 0) continue;
        if (!s.empty()) s += ' ';
        s += std::to_string(c[index_of(k)]) + std::string(to_string(k));
    }
    return s;
}

}  // namespace detail

/// Writes metrics.csv, summary.csv, deployments.csv and settlement.csv into `dir`.
inline void emit_results(const ExperimentResult& res, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
    using detail::num;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    {
        auto out = detail::open_out(dir / "metrics.csv");
        out << "time,method,metric,mean,stdev\n";
        for (const auto& s : res.per_step)
            out << s.time << ',' << to_string(s.method) << ',' << to_string(s.metric) << ',' << num(s.value.mean) << ','
                << num(s.value.stdev) << '\n';
    }
    {
        auto out = detail::open_out(dir / "summary.csv");
        out << "method,object_type,runs,steps_mean,steps_stdev,final_rmse_mean,final_rmse_stdev,"
               "final_nmse_db_mean,final_kl_mean,sensors_mean,accuracy\n";
        for (const auto& g : res.per_group)
            out << to_string(g.method) << ',' << cfg.type_names[g.object_type] << ',' << g.runs << ','
                << num(g.steps.mean) << ',' << num(g.steps.stdev) << ',' << num(g.final_rmse.mean) << ','
                << num(g.final_rmse.stdev) << ',' << num(g.final_nmse_db.mean) << ',' << num(g.final_kl.mean) << ','
                << num(g.sensors_used.mean) << ',' << num(g.accuracy) << '\n';
    }
    {
        // one row per step: sensors reporting so far and the ones that joined at that step
        auto out = detail::open_out(dir / "deployments.csv");
        out << "object_type,method,seed,step,cumulative_sensors,joined\n";
        for (const auto& e : res.episodes)
            for (const auto& s : e.steps)
                out << cfg.type_names[e.object.true_type] << ',' << to_string(e.method) << ',' << e.seed << ','
                    << s.time << ',' << s.reporting.size() << ',' << detail::counts_label(s.joined, e.roster) << '\n';
    }
    {
        auto out = detail::open_out(dir / "settlement.csv");
        out << "object_type,seed,agent_id,sensor_type,disposition,reports,rewards_sum,varpi,final_report,score,total\n";
        for (const auto& e : res.episodes)
            for (const auto& [id, s] : e.settlement) {
                const auto& r = e.roster[static_cast<std::size_t>(id)];
                out << cfg.type_names[e.object.true_type] << ',' << e.seed << ',' << id << ',' << to_string(r.kind) << ','
                    << to_string(r.disposition) << ',' << s.reports << ',' << num(s.rewards_sum) << ',' << num(s.varpi)
                    << ',' << num(s.final_report) << ',' << num(s.score) << ',' << num(s.total) << '\n';
            }
    }
}

}  // namespace pmfusion
