// pmfusion: command-line front end for the prediction-market sensor fusion simulator.
//
//   pmfusion simulate --scenario scenarios/default.jsonc --method all --runs 10 --seed 1 --out results/
//   pmfusion verify-incentives --samples 1000 --seed 7
//   pmfusion oracle-check --samples 1000

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmfusion/experiment.hpp"
#include "pmfusion/scenario.hpp"
#include "pmfusion/verification.hpp"

namespace {

using namespace pmfusion;

int cmd_simulate(const std::string& scenario_path, const std::string& method, std::optional<int> runs,
                 std::optional<std::uint64_t> seed, const std::string& out_dir) {
    ScenarioConfig cfg = scenario_path.empty() ? ScenarioConfig::defaults() : load_scenario(scenario_path);
    if (runs) cfg.runs = *runs;
    if (seed) cfg.seed = *seed;
    cfg.validate();

    std::vector<Method> methods;
    if (method == "all") methods.assign(kAllMethods.begin(), kAllMethods.end());
    else methods.push_back(method_from_string(method));

    const ExperimentResult res = run_experiment(cfg, methods);
    emit_results(res, cfg, out_dir);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "scenario.json", std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + out_dir + "/scenario.json");
        out << scenario_to_json(cfg).dump(2) << '\n';
    }

    std::printf("%-4s %-13s %5s %11s %11s %9s\n", "meth", "object", "runs", "steps", "final_rmse", "accuracy");
    for (const auto& g : res.per_group)
        std::printf("%-4s %-13s %5d %5.2f±%4.2f %11.4f %9.3f\n", std::string(to_string(g.method)).c_str(),
                    cfg.type_names[g.object_type].c_str(), g.runs, g.steps.mean, g.steps.stdev, g.final_rmse.mean,
                    g.accuracy);
    for (Method m : methods)
        std::printf("mean final RMSE %-3s %.4f\n", std::string(to_string(m)).c_str(), mean_final_rmse(res, m));
    std::printf("results written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_verify_incentives(int samples, std::uint64_t seed) {
    const auto rep = verify::check_incentives(samples, 100, seed);
    const bool ok = rep.max_optimum_error <= 1e-3 && rep.properness_violations == 0;
    std::printf("instances            %d\n", rep.instances);
    std::printf("max |r* - b|_inf     %.3e  (limit 1e-3)\n", rep.max_optimum_error);
    std::printf("comparisons          %d\n", rep.comparisons);
    std::printf("max EU(b,r)-EU(b,b)  %.3e  (slack 1e-9)\n", rep.max_properness_gap);
    std::printf("violations           %d\n", rep.properness_violations);
    std::printf("elapsed              %.2fs\n", rep.seconds);
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_oracle_check(int samples, std::uint64_t seed) {
    const auto rep = verify::check_aggregation_oracle(samples, seed);
    const bool ok = rep.max_oracle_diff <= 1e-9 && rep.max_invariance_diff <= 1e-12;
    std::printf("samples                   %d\n", rep.samples);
    std::printf("max |pool - literal|      %.3e  (limit 1e-9)\n", rep.max_oracle_diff);
    std::printf("max change rewards/varpi  %.3e  (limit 1e-12)\n", rep.max_invariance_diff);
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-market belief aggregation for multi-sensor object classification"};
    app.require_subcommand(1);

    std::string scenario, method = "all", out_dir = "results";
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    auto* sim = app.add_subcommand("simulate", "Run replicated episodes and write CSV results");
    sim->add_option("--scenario", scenario, "Scenario file (JSON, comments allowed); built-in defaults if omitted")
        ->check(CLI::ExistingFile);
    sim->add_option("--method", method, "Fusion method")->check(CLI::IsMember({"pm", "ds", "ddf", "all"}));
    sim->add_option("--runs", runs, "Runs per object type (overrides scenario)")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Base seed (overrides scenario)");
    sim->add_option("--out", out_dir, "Output directory");

    int samples = 1000;
    std::uint64_t check_seed = 1;
    auto* inc = app.add_subcommand("verify-incentives", "Numerical properness and truthful-optimum checks");
    inc->add_option("--samples", samples, "Random instances")->check(CLI::PositiveNumber);
    inc->add_option("--seed", check_seed, "Seed");

    auto* orc = app.add_subcommand("oracle-check", "Compare log-pool aggregation with a literal evaluation");
    orc->add_option("--samples", samples, "Random report sets")->check(CLI::PositiveNumber);
    orc->add_option("--seed", check_seed, "Seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(scenario, method, runs, seed, out_dir);
        if (*inc) return cmd_verify_incentives(samples, check_seed);
        if (*orc) return cmd_oracle_check(samples, check_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pmfusion: %s\n", e.what());
        return 2;
    }
    return 0;
}
