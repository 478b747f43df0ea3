#pragma once

// Scenario configuration: built-in defaults plus a JSON (comments allowed) loader in which
// every key is optional and overrides the default.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmfusion/baselines.hpp"
#include "pmfusion/core.hpp"
#include "pmfusion/decision_maker.hpp"
#include "pmfusion/sensor_agent.hpp"
#include "pmfusion/signal_model.hpp"

namespace pmfusion {

/// How a self-interested agent values ϖ when comparing candidate reports.
///  Scalar:  one belief-weighted weight Σ_j b_j ϖ_j for every outcome (ϖ treated as
///           outcome-independent, under which truthful reporting is optimal).
///  PerType: ϖ(d, θ_j) per outcome, literally; the optimum then tilts toward high-ϖ types.
enum class VarpiView : int { Scalar = 0, PerType = 1 };

inline std::string_view to_string(VarpiView v) { return v == VarpiView::Scalar ? "scalar" : "per_type"; }

inline VarpiView varpi_view_from_string(std::string_view s) {
    if (s == "scalar") return VarpiView::Scalar;
    if (s == "per_type") return VarpiView::PerType;
    throw ConfigError("unknown strategy_varpi '" + std::string(s) + "'");
}

struct StoppingRule {
    double confidence = 0.95;
    int window = 10;  // T
};

struct ScenarioConfig {
    std::vector<std::string> type_names{"mine", "metallic", "non_metallic"};
    std::vector<std::string> feature_names{"metallic_content", "area", "depth", "sensor_position"};
    std::vector<int> feature_levels{3, 3, 3, 3};
    TypeDistribution prior = TypeDistribution::uniform(3);
    /// feature_distributions[type][feature][level] = P(φ_feature = level | type).
    std::vector<std::vector<std::vector<double>>> feature_distributions;

    std::array<SensorTypeSpec, kSensorKinds> sensors;
    EnvironmentState environment = EnvironmentState::with_default_weights();
    std::vector<DecisionSpec> decisions = default_decision_set();
    DecisionModel decision_model = default_decision_model();
    ValueFunctionParams value{};
    StoppingRule stopping{};
    DsFrames ds_frames{};

    double w_bel = 0.5;
    double malicious_fraction = 0.0;
    SensorKind bootstrap_sensor = SensorKind::MD;
    bool report_every_step = true;
    VarpiView strategy_varpi = VarpiView::Scalar;
    std::vector<std::size_t> objects{0, 1, 2};  // true types simulated by an experiment
    std::uint64_t seed = 1;
    int runs = 10;

    std::size_t types() const { return type_names.size(); }
    std::size_t features() const { return feature_levels.size(); }
    const SensorTypeSpec& sensor(SensorKind k) const { return sensors[index_of(k)]; }

    SensorCounts fleet() const {
        return {sensors[0].count_available, sensors[1].count_available, sensors[2].count_available};
    }

    static ScenarioConfig defaults() {
        ScenarioConfig c;
        const std::vector<double> uniform3{1.0 / 3, 1.0 / 3, 1.0 / 3};
        c.feature_distributions = {
            // mine: small, mostly shallow, medium metal content
            {{0.016, 0.696, 0.288}, {0.860, 0.130, 0.010}, {0.781, 0.104, 0.115}, uniform3},
            // metallic clutter: small, mostly deep, high metal content
            {{0.063, 0.189, 0.748}, {0.895, 0.060, 0.045}, {0.231, 0.076, 0.693}, uniform3},
            // non-metallic clutter: large, deep, little metal
            {{0.912, 0.020, 0.068}, {0.009, 0.091, 0.900}, {0.105, 0.083, 0.812}, uniform3},
        };
        c.sensors[0] = {SensorKind::MD, {0.546, 0.600, 0.600, 0.600}, 1.0, 5};
        c.sensors[1] = {SensorKind::IR, {0.542, 0.600, 0.375, 0.330}, 2.0, 3};
        c.sensors[2] = {SensorKind::GPR, {0.509, 0.390, 0.512, 0.560}, 4.0, 2};
        return c;
    }

    void validate() const {
        const std::size_t m = types();
        if (m < 2) throw ConfigError("scenario: at least two object types required");
        if (prior.size() != m) throw ConfigError("scenario: prior length must equal the number of types");
        if (feature_names.size() != features()) throw ConfigError("scenario: one name per feature required");
        if (feature_distributions.size() != m) throw ConfigError("scenario: feature distribution per type required");
        for (const auto& per_type : feature_distributions) {
            if (per_type.size() != features()) throw ConfigError("scenario: feature distribution per feature required");
            for (std::size_t i = 0; i < features(); ++i) {
                if (per_type[i].size() != static_cast<std::size_t>(feature_levels[i]))
                    throw ConfigError("scenario: feature distribution needs one entry per level");
                double s = 0.0;
                for (double p : per_type[i]) {
                    if (!(p >= 0.0)) throw ConfigError("scenario: negative feature probability");
                    s += p;
                }
                if (std::abs(s - 1.0) > 1e-6) throw ConfigError("scenario: feature distribution does not sum to 1");
            }
        }
        for (const auto& s : sensors) s.validate(features());
        for (std::size_t k = 0; k < kSensorKinds; ++k)
            if (sensors[k].kind != kAllSensorKinds[k]) throw ConfigError("scenario: sensors out of order");
        environment.validate();
        for (SensorKind k : kAllSensorKinds) (void)expert_weight(k, environment, 0);
        if (decisions.empty()) throw ConfigError("scenario: empty decision set");
        decision_model.validate(m);
        for (const auto& d : decisions) {
            if (d.id < 0 || static_cast<std::size_t>(d.id) >= decision_model.p_table.size())
                throw ConfigError("scenario: decision " + d.label + " has no probability row");
            if (d.total() > kMaxSensorsPerDecision) throw ConfigError("scenario: decision " + d.label + " requests more than 3 sensors");
            for (int n : d.deployment)
                if (n < 0) throw ConfigError("scenario: negative deployment in decision " + d.label);
        }
        value.validate();
        if (stopping.window < 1) throw ConfigError("scenario: time window T must be at least 1");
        if (!(stopping.confidence > 0.0 && stopping.confidence <= 1.0))
            throw ConfigError("scenario: confidence must lie in (0,1]");
        if (ds_frames.types != m || ds_frames.mine_type >= m) throw ConfigError("scenario: D-S frames do not match types");
        if (ds_frames.friendly_type_by_level.size() != static_cast<std::size_t>(feature_levels.at(0)))
            throw ConfigError("scenario: D-S needs a friendly type for every metal-content level");
        for (std::size_t t : ds_frames.friendly_type_by_level)
            if (t >= m) throw ConfigError("scenario: D-S friendly type out of range");
        if (!(w_bel >= 0.0 && w_bel <= 1.0)) throw ConfigError("scenario: w_bel outside [0,1]");
        if (!(malicious_fraction >= 0.0 && malicious_fraction <= 1.0))
            throw ConfigError("scenario: malicious_fraction outside [0,1]");
        if (fleet()[index_of(bootstrap_sensor)] < 1) throw ConfigError("scenario: no sensor available for detection");
        if (objects.empty()) throw ConfigError("scenario: no objects to simulate");
        for (std::size_t o : objects)
            if (o >= m) throw ConfigError("scenario: object type out of range");
        if (runs < 1) throw ConfigError("scenario: runs must be at least 1");
    }
};

namespace detail {

using nlohmann::json;

inline std::size_t type_index(const ScenarioConfig& c, const json& v) {
    if (v.is_number_integer()) return v.get<std::size_t>();
    const auto name = v.get<std::string>();
    for (std::size_t j = 0; j < c.type_names.size(); ++j)
        if (c.type_names[j] == name) return j;
    throw ConfigError("unknown object type '" + name + "'");
}

inline void known_keys(const json& j, std::initializer_list<std::string_view> keys, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string("scenario: ") + where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError("scenario: unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
    using detail::read;
    using nlohmann::json;
    ScenarioConfig c = ScenarioConfig::defaults();
    try {
        detail::known_keys(doc,
                           {"types", "features", "prior", "feature_distributions", "sensors", "environment", "decisions",
                            "mechanism", "stopping", "dempster_shafer", "objects", "seed", "runs"},
                           "top level");
        read(doc, "types", c.type_names);
        if (doc.contains("features")) {
            c.feature_names.clear();
            c.feature_levels.clear();
            for (const auto& f : doc.at("features")) {
                c.feature_names.push_back(f.at("name").get<std::string>());
                c.feature_levels.push_back(f.at("levels").get<int>());
            }
        }
        if (doc.contains("prior")) c.prior = TypeDistribution(doc.at("prior").get<std::vector<double>>());
        else if (c.prior.size() != c.types()) c.prior = TypeDistribution::uniform(c.types());

        if (doc.contains("feature_distributions")) {
            const auto& fd = doc.at("feature_distributions");
            c.feature_distributions.assign(c.types(), {});
            for (std::size_t j = 0; j < c.types(); ++j) {
                if (!fd.contains(c.type_names[j])) throw ConfigError("feature_distributions missing type " + c.type_names[j]);
                const auto& per_type = fd.at(c.type_names[j]);
                for (const auto& name : c.feature_names)
                    c.feature_distributions[j].push_back(per_type.at(name).get<std::vector<double>>());
            }
        }

        if (doc.contains("sensors")) {
            for (const auto& [name, s] : doc.at("sensors").items()) {
                auto& spec = c.sensors[index_of(sensor_kind_from_string(name))];
                detail::known_keys(s, {"noise", "cost", "count"}, "sensors");
                read(s, "noise", spec.noise_level);
                read(s, "cost", spec.report_cost);
                read(s, "count", spec.count_available);
            }
        }

        if (doc.contains("environment")) {
            const auto& env = doc.at("environment");
            detail::known_keys(env, {"condition", "expert_weights"}, "environment");
            if (env.contains("condition")) c.environment.condition = condition_from_string(env.at("condition").get<std::string>());
            if (env.contains("expert_weights"))
                for (const auto& [sensor, row] : env.at("expert_weights").items())
                    for (const auto& [cond, w] : row.items())
                        c.environment.weights[{sensor_kind_from_string(sensor), condition_from_string(cond)}] = w.get<double>();
        }

        if (doc.contains("decisions")) {
            const auto& dm = doc.at("decisions");
            detail::known_keys(dm, {"set", "utilities"}, "decisions");
            if (dm.contains("set")) {
                c.decisions.clear();
                c.decision_model.p_table.clear();
                for (const auto& d : dm.at("set")) {
                    DecisionSpec spec;
                    spec.id = static_cast<int>(c.decisions.size());
                    spec.label = d.at("label").get<std::string>();
                    for (const auto& [sensor, n] : d.at("deploy").items())
                        spec.deployment[index_of(sensor_kind_from_string(sensor))] = n.get<int>();
                    c.decisions.push_back(spec);
                    c.decision_model.p_table.push_back(d.at("p_given_type").get<std::vector<double>>());
                }
            }
            read(dm, "utilities", c.decision_model.utilities);
        }

        if (doc.contains("mechanism")) {
            const auto& mech = doc.at("mechanism");
            detail::known_keys(mech,
                               {"nu", "n_threshold", "n_max", "w_bel", "malicious_fraction", "report_every_step",
                                "strategy_varpi", "bootstrap_sensor"},
                               "mechanism");
            read(mech, "nu", c.value.nu);
            read(mech, "n_threshold", c.value.n_threshold);
            read(mech, "n_max", c.value.n_max);
            read(mech, "w_bel", c.w_bel);
            read(mech, "malicious_fraction", c.malicious_fraction);
            read(mech, "report_every_step", c.report_every_step);
            if (mech.contains("strategy_varpi"))
                c.strategy_varpi = varpi_view_from_string(mech.at("strategy_varpi").get<std::string>());
            if (mech.contains("bootstrap_sensor"))
                c.bootstrap_sensor = sensor_kind_from_string(mech.at("bootstrap_sensor").get<std::string>());
        }

        if (doc.contains("stopping")) {
            detail::known_keys(doc.at("stopping"), {"confidence", "window"}, "stopping");
            read(doc.at("stopping"), "confidence", c.stopping.confidence);
            read(doc.at("stopping"), "window", c.stopping.window);
        }

        c.ds_frames.types = c.types();
        if (doc.contains("dempster_shafer")) {
            const auto& ds = doc.at("dempster_shafer");
            detail::known_keys(ds, {"mine_type", "friendly_type_by_metal_level"}, "dempster_shafer");
            if (ds.contains("mine_type")) c.ds_frames.mine_type = detail::type_index(c, ds.at("mine_type"));
            if (ds.contains("friendly_type_by_metal_level")) {
                c.ds_frames.friendly_type_by_level.clear();
                for (const auto& t : ds.at("friendly_type_by_metal_level"))
                    c.ds_frames.friendly_type_by_level.push_back(detail::type_index(c, t));
            }
        }

        if (doc.contains("objects")) {
            c.objects.clear();
            for (const auto& o : doc.at("objects")) c.objects.push_back(detail::type_index(c, o));
        }
        read(doc, "seed", c.seed);
        read(doc, "runs", c.runs);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    c.validate();
    return c;
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& c) {
    using nlohmann::json;
    json doc;
    doc["types"] = c.type_names;
    doc["features"] = json::array();
    for (std::size_t i = 0; i < c.features(); ++i)
        doc["features"].push_back({{"name", c.feature_names[i]}, {"levels", c.feature_levels[i]}});
    doc["prior"] = std::vector<double>(c.prior.begin(), c.prior.end());
    for (std::size_t j = 0; j < c.types(); ++j)
        for (std::size_t i = 0; i < c.features(); ++i)
            doc["feature_distributions"][c.type_names[j]][c.feature_names[i]] = c.feature_distributions[j][i];
    for (const auto& s : c.sensors)
        doc["sensors"][std::string(to_string(s.kind))] = {{"noise", s.noise_level}, {"cost", s.report_cost}, {"count", s.count_available}};
    doc["environment"]["condition"] = std::string(to_string(c.environment.condition));
    for (const auto& [key, w] : c.environment.weights)
        doc["environment"]["expert_weights"][std::string(to_string(key.first))][std::string(to_string(key.second))] = w;
    doc["decisions"]["utilities"] = c.decision_model.utilities;
    doc["decisions"]["set"] = json::array();
    for (const auto& d : c.decisions) {
        json deploy = json::object();
        for (SensorKind k : kAllSensorKinds)
            if (d.deployment[index_of(k)] > 0) deploy[std::string(to_string(k))] = d.deployment[index_of(k)];
        doc["decisions"]["set"].push_back(
            {{"label", d.label}, {"deploy", deploy}, {"p_given_type", c.decision_model.p_table.at(static_cast<std::size_t>(d.id))}});
    }
    doc["mechanism"] = {{"nu", c.value.nu},
                        {"n_threshold", c.value.n_threshold},
                        {"n_max", c.value.n_max},
                        {"w_bel", c.w_bel},
                        {"malicious_fraction", c.malicious_fraction},
                        {"report_every_step", c.report_every_step},
                        {"strategy_varpi", std::string(to_string(c.strategy_varpi))},
                        {"bootstrap_sensor", std::string(to_string(c.bootstrap_sensor))}};
    doc["stopping"] = {{"confidence", c.stopping.confidence}, {"window", c.stopping.window}};
    doc["dempster_shafer"]["mine_type"] = c.type_names[c.ds_frames.mine_type];
    doc["dempster_shafer"]["friendly_type_by_metal_level"] = json::array();
    for (std::size_t t : c.ds_frames.friendly_type_by_level)
        doc["dempster_shafer"]["friendly_type_by_metal_level"].push_back(c.type_names[t]);
    doc["objects"] = json::array();
    for (std::size_t o : c.objects) doc["objects"].push_back(c.type_names[o]);
    doc["seed"] = c.seed;
    doc["runs"] = c.runs;
    return doc;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str(), nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

}  // namespace pmfusion
