// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "pmfusion/experiment.hpp"
#include "pmfusion/scenario.hpp"
#include "pmfusion/verification.hpp"

using namespace pmfusion;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome ac1_incentives() {
    const auto rep = verify::check_incentives(1000, 100, 2024);
    const bool ok = rep.max_optimum_error <= 1e-3 && rep.properness_violations == 0 && rep.seconds < 120.0;
    return {ok, fmt("max|r*-b|=%.2e, violations=%d/%d, max gap=%.2e, %.1fs", rep.max_optimum_error,
                    rep.properness_violations, rep.comparisons, rep.max_properness_gap, rep.seconds)};
}

Outcome ac2_oracle() {
    const auto rep = verify::check_aggregation_oracle(1000, 2025);
    const bool ok = rep.max_oracle_diff <= 1e-9 && rep.max_invariance_diff <= 1e-12;
    return {ok, fmt("max|pool-literal|=%.2e, invariance=%.2e", rep.max_oracle_diff, rep.max_invariance_diff)};
}

ScenarioConfig acceptance_config() {
    auto cfg = ScenarioConfig::defaults();
    cfg.w_bel = 0.5;
    cfg.runs = 30;
    cfg.seed = 1;
    return cfg;
}

Outcome ac3_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = acceptance_config();
    const std::array<Method, 1> pm{Method::PM};
    const auto res = run_experiment(cfg, pm);
    const double secs = seconds_since(t0);
    double all = 0.0;
    std::array<double, 3> by_type{};
    for (const auto& g : res.per_group) {
        by_type[g.object_type] = g.steps.mean;
        all += g.steps.mean / static_cast<double>(res.per_group.size());
    }
    const bool ok = all >= 4.0 && all <= 10.0 && by_type[0] >= 5.0 && by_type[0] <= 9.0 && by_type[1] >= 5.0 &&
                    by_type[1] <= 9.0 && secs < 60.0;
    return {ok, fmt("mean steps all=%.2f mine=%.2f metallic=%.2f non_metallic=%.2f, %.2fs", all, by_type[0],
                    by_type[1], by_type[2], secs)};
}

Outcome ac4_comparison(const ExperimentResult& res) {
    const double pm = mean_final_rmse(res, Method::PM);
    const double ddf = mean_final_rmse(res, Method::DDF);
    const double ds = mean_final_rmse(res, Method::DS);
    // "≤-or-≈" between DDF and D-S: within 5%
    const bool ok = pm <= ddf && ddf <= 1.05 * ds && pm <= 0.98 * ds;
    return {ok, fmt("final RMSE pm=%.4f ddf=%.4f ds=%.4f; pm vs ds -%.1f%%, pm vs ddf -%.1f%%", pm, ddf, ds,
                    100.0 * (1.0 - pm / ds), 100.0 * (1.0 - pm / ddf))};
}

Outcome ac5_trajectory(const ExperimentResult& res) {
    std::array<double, 7> rm{};
    for (const auto& s : res.per_step)
        if (s.method == Method::PM && s.metric == Metric::Rmse && s.time <= 6) rm[static_cast<std::size_t>(s.time)] = s.value.mean;
    bool ok = true;
    std::string detail = "pm rmse t1..t6:";
    for (int t = 1; t <= 6; ++t) detail += fmt(" %.4f", rm[static_cast<std::size_t>(t)]);
    for (int t = 1; t <= 4; ++t) ok = ok && rm[static_cast<std::size_t>(t + 2)] < rm[static_cast<std::size_t>(t)];
    return {ok, detail};
}

Outcome ac6_deterrence() {
    auto cfg = load_scenario(std::filesystem::path(PMFUSION_SCENARIO_DIR) / "malicious30.jsonc");
    cfg.runs = 30;
    const std::array<Method, 1> pm{Method::PM};
    const auto res = run_experiment(cfg, pm);
    double sum[2] = {0, 0};
    int n[2] = {0, 0};
    for (const auto& e : res.episodes)
        for (const auto& [id, s] : e.settlement) {
            const int k = e.roster[static_cast<std::size_t>(id)].disposition == Strategy::Malicious;
            sum[k] += s.total;
            ++n[k];
        }
    if (n[0] == 0 || n[1] == 0) return {false, "no settled agents of one disposition"};
    const double t = sum[0] / n[0], m = sum[1] / n[1];
    return {t > m, fmt("mean settled payment truthful=%.3f (n=%d) malicious=%.3f (n=%d)", t, n[0], m, n[1])};
}

MassFunction random_mass(Rng& rng, std::size_t n) {
    const auto full = MassFunction::full_of(n);
    std::map<MassFunction::Subset, double> raw;
    raw[full] = rng.uniform(0.05, 1.0);
    for (std::size_t k = 0, focal = 1 + rng.below(4); k < focal; ++k)
        raw[static_cast<MassFunction::Subset>(1 + rng.below(full))] += rng.uniform(0.0, 1.0);
    double s = 0.0;
    for (auto& [set, m] : raw) s += m;
    for (auto& [set, m] : raw) m /= s;
    return MassFunction(n, raw);
}

double mass_gap(const MassFunction& a, const MassFunction& b) {
    double g = 0.0;
    for (MassFunction::Subset s = 1; s <= a.full(); ++s) g = std::max(g, std::abs(a.mass(s) - b.mass(s)));
    return g;
}

Outcome ac7_metrics() {
    const auto e1 = vec_of_type(1, 3);
    const auto u3 = TypeDistribution::uniform(3);
    const double eps = 1e-6, z = 1.0 + 2.0 * eps, p = (0.5 + eps) / z;
    const double kl_hand = p * std::log(p / ((1.0 + eps) / z)) + p * std::log(p / (eps / z));
    double worst = 0.0;
    auto check = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    check(rmse(e1, e1), 0.0);
    check(rmse(vec_of_type(2, 3), e1), std::sqrt(2.0) / std::sqrt(3.0));
    check(rmse(u3, e1), std::sqrt(2.0 / 3.0) / std::sqrt(3.0));
    check(nmse_db(u3, e1), 0.0);
    check(nmse_db(vec_of_type(2, 3), e1), 10.0 * std::log10((2.0 / 3.0) / (2.0 / 9.0)));
    check(nmse_db(e1, e1), 10.0 * std::log10(1e-12 / (2.0 / 9.0)));
    check(kl_divergence(vec_of_type(1, 2), vec_of_type(1, 2)), 0.0);
    check(kl_divergence(TypeDistribution{0.5, 0.5}, vec_of_type(1, 2)), kl_hand);
    // the rounded figures quoted alongside
    const bool rounded_ok = std::abs(rmse(vec_of_type(2, 3), e1) - 0.8165) < 5e-5 && std::abs(rmse(u3, e1) - 0.4714) < 5e-5 &&
                            std::abs(nmse_db(vec_of_type(2, 3), e1) - 4.771) < 5e-4 &&
                            std::abs(kl_divergence(TypeDistribution{0.5, 0.5}, vec_of_type(1, 2)) - 6.2146) < 5e-5;

    Rng rng(7);
    double comm = 0.0, assoc = 0.0, order = 0.0;
    for (int s = 0; s < 500; ++s) {
        const std::size_t n = 2 + rng.below(3);
        const auto x = random_mass(rng, n), y = random_mass(rng, n), z = random_mass(rng, n);
        comm = std::max(comm, mass_gap(ds_combine(x, y), ds_combine(y, x)));
        assoc = std::max(assoc, mass_gap(ds_combine(ds_combine(x, y), z), ds_combine(x, ds_combine(y, z))));

        const std::size_t m = 2 + rng.below(4), k = 2 + rng.below(8);
        std::vector<TypeDistribution> lk;
        for (std::size_t i = 0; i < k; ++i) lk.push_back(clip_report(verify::random_simplex(rng, m)));
        FilterState a{TypeDistribution::uniform(m), 0}, b = a;
        for (const auto& l : lk) a = ddf_update(a, l);
        for (auto it = lk.rbegin(); it != lk.rend(); ++it) b = ddf_update(b, *it);
        for (std::size_t j = 0; j < m; ++j) order = std::max(order, std::abs(a.posterior[j] - b.posterior[j]));
    }
    const bool ok = worst <= 1e-6 && rounded_ok && comm <= 1e-12 && assoc <= 1e-12 && order <= 1e-12;
    return {ok, fmt("example err=%.1e, ds comm=%.1e assoc=%.1e, ddf order=%.1e", worst, comm, assoc, order)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome ac8_determinism() {
    const auto base = std::filesystem::temp_directory_path() / "pmfusion_acceptance_determinism";
    std::filesystem::remove_all(base);
    const std::string scenario = std::string(PMFUSION_SCENARIO_DIR) + "/default.jsonc";
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string("\"") + PMFUSION_CLI + "\" simulate --scenario \"" + scenario +
                                "\" --method all --runs 10 --seed 3 --out \"" + (base / run).string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "simulate exited nonzero"};
    }
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(base / "a")) {
        const auto name = entry.path().filename();
        if (!std::filesystem::exists(base / "b" / name) || slurp(entry.path()) != slurp(base / "b" / name))
            return {false, "differs: " + name.string()};
        ++files;
    }
    return {files >= 4, fmt("%d output files byte-identical", files)};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](const char* id, const char* name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %-4s %-26s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    };

    report("AC1", "incentive compatibility", ac1_incentives);
    report("AC2", "aggregation oracle", ac2_oracle);
    report("AC3", "convergence", ac3_convergence);
    std::optional<ExperimentResult> comparison;
    auto compared = [&]() -> const ExperimentResult& {
        if (!comparison) comparison = run_experiment(acceptance_config());
        return *comparison;
    };
    report("AC4", "comparative performance", [&] { return ac4_comparison(compared()); });
    report("AC5", "rmse trajectory", [&] { return ac5_trajectory(compared()); });
    report("AC6", "malicious deterrence", ac6_deterrence);
    report("AC7", "metric unit values", ac7_metrics);
    report("AC8", "determinism", ac8_determinism);
    std::printf("%d/8 criteria passed\n", 8 - failed);
    return failed == 0 ? 0 : 1;
}
