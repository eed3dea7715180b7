#ifndef PARKCP_CONFIG_HPP
#define PARKCP_CONFIG_HPP

#include "parkcp/error.hpp"
#include "parkcp/harness.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

namespace parkcp {

/// Everything an experiment manifest can set: the base run, the sweep, the
/// reported modes and the coverage raster resolution.
struct ExperimentConfig
{
    RunConfig run;
    SweepPlan plan;
    std::vector<Mode> modes{Mode::Traditional, Mode::Proposed};
    double cell_size = 1.0;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json &obj, std::string_view where, std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto &[key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown config key '" + std::string(where) + "." + key + "'");
    }
}

template <class T>
void read_into(const json &obj, const char *key, T &dst)
{
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

/// A number or a list of numbers.
inline std::vector<double> number_list(const json &v, const char *key)
{
    try {
        if (v.is_array()) return v.get<std::vector<double>>();
        return {v.get<double>()};
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace detail

inline std::vector<Algorithm> parse_algorithms(std::string_view s)
{
    if (s == "gcpso") return {Algorithm::Gcpso};
    if (s == "ekf") return {Algorithm::Ekf};
    if (s == "both") return {Algorithm::Gcpso, Algorithm::Ekf};
    throw ConfigError("algorithm must be gcpso, ekf or both");
}

inline std::vector<Mode> parse_modes(std::string_view s)
{
    if (s == "traditional") return {Mode::Traditional};
    if (s == "proposed") return {Mode::Proposed};
    if (s == "both") return {Mode::Traditional, Mode::Proposed};
    throw ConfigError("mode must be traditional, proposed or both");
}

inline ScenarioKind parse_scenario_kind(std::string_view s)
{
    if (s == "circuit") return ScenarioKind::Circuit;
    if (s == "town") return ScenarioKind::Town;
    throw ConfigError("scenario kind must be circuit or town");
}

/// Builds an experiment from a JSON document on top of the defaults. Unknown
/// keys at any level are errors.
inline ExperimentConfig experiment_from_json(const nlohmann::json &doc)
{
    using detail::read_into;
    ExperimentConfig cfg;
    detail::reject_unknown(doc, "config",
                           {"scenario", "zone", "noise", "algorithm", "mode", "policy", "gcpso", "ekf", "n_runs", "seed",
                            "tracked", "paired_seeds", "coverage"});
    auto &run = cfg.run;
    if (doc.contains("scenario")) {
        const auto &s = doc.at("scenario");
        detail::reject_unknown(s, "scenario",
                               {"kind", "seed", "duration", "T_s", "area", "n_moving", "n_parked", "n_entering",
                                "entry_interval", "parked_spacing", "circuit", "speed", "block_size", "parked_offset",
                                "n_choke_points", "max_queue_steps"});
        auto &sc = run.scenario;
        if (s.contains("kind")) sc.kind = parse_scenario_kind(s.at("kind").get<std::string>());
        read_into(s, "seed", sc.seed);
        read_into(s, "duration", sc.duration);
        read_into(s, "T_s", sc.sample_time);
        if (s.contains("area")) {
            auto a = detail::number_list(s.at("area"), "area");
            if (a.size() != 4) throw ConfigError("area must be [x_min, y_min, x_max, y_max]");
            sc.area = {a[0], a[1], a[2], a[3]};
        }
        read_into(s, "n_moving", sc.n_moving);
        read_into(s, "n_parked", sc.n_parked);
        read_into(s, "n_entering", sc.n_entering);
        read_into(s, "entry_interval", sc.entry_interval);
        read_into(s, "parked_spacing", sc.parked_spacing);
        if (s.contains("circuit")) {
            std::vector<std::vector<double>> pts;
            read_into(s, "circuit", pts);
            sc.circuit.clear();
            for (const auto &p : pts) {
                if (p.size() != 2) throw ConfigError("circuit waypoints must be [x, y]");
                sc.circuit.push_back({p[0], p[1]});
            }
        }
        read_into(s, "speed", sc.speed);
        read_into(s, "block_size", sc.block_size);
        read_into(s, "parked_offset", sc.parked_offset);
        read_into(s, "n_choke_points", sc.n_choke_points);
        read_into(s, "max_queue_steps", sc.max_queue_steps);
    }
    if (doc.contains("zone")) cfg.plan.zones = detail::number_list(doc.at("zone"), "zone");
    if (doc.contains("noise")) {
        const auto &n = doc.at("noise");
        detail::reject_unknown(n, "noise", {"sigma_r", "sigma_gps", "sigma_velocity", "drop_probability"});
        if (n.contains("sigma_r")) cfg.plan.sigma_ranges = detail::number_list(n.at("sigma_r"), "sigma_r");
        read_into(n, "sigma_gps", run.noise.sigma_gps);
        read_into(n, "sigma_velocity", run.noise.sigma_velocity);
        read_into(n, "drop_probability", run.noise.drop_probability);
    }
    if (doc.contains("algorithm")) cfg.plan.algorithms = parse_algorithms(doc.at("algorithm").get<std::string>());
    if (doc.contains("mode")) cfg.modes = parse_modes(doc.at("mode").get<std::string>());
    if (doc.contains("policy")) {
        const auto &p = doc.at("policy");
        detail::reject_unknown(p, "policy",
                               {"anchor_accuracy_threshold", "gnss_window", "gps_reset_interval", "anchors_preloaded"});
        read_into(p, "anchor_accuracy_threshold", run.policy.anchor_accuracy_threshold);
        read_into(p, "gnss_window", run.policy.gnss_window);
        read_into(p, "gps_reset_interval", run.policy.gps_reset_interval);
        read_into(p, "anchors_preloaded", run.policy.anchors_preloaded);
    }
    if (doc.contains("gcpso")) {
        const auto &g = doc.at("gcpso");
        detail::reject_unknown(g, "gcpso",
                               {"n_particles", "n_iterations", "s_c", "f_c", "rho0", "c1", "c2", "w_start", "w_end",
                                "fitness_stop"});
        auto &gp = run.gcpso;
        read_into(g, "n_particles", gp.n_particles);
        read_into(g, "n_iterations", gp.n_iterations);
        read_into(g, "s_c", gp.success_threshold);
        read_into(g, "f_c", gp.failure_threshold);
        read_into(g, "rho0", gp.rho0);
        read_into(g, "c1", gp.c1);
        read_into(g, "c2", gp.c2);
        read_into(g, "w_start", gp.w_start);
        read_into(g, "w_end", gp.w_end);
        read_into(g, "fitness_stop", gp.fitness_stop);
    }
    if (doc.contains("ekf")) {
        const auto &e = doc.at("ekf");
        detail::reject_unknown(e, "ekf", {"sigma_Q", "sigma_Gamma"});
        read_into(e, "sigma_Q", run.ekf.sigma_q);
        read_into(e, "sigma_Gamma", run.ekf.sigma_gamma);
    }
    read_into(doc, "n_runs", run.n_runs);
    read_into(doc, "seed", run.seed);
    read_into(doc, "tracked", run.tracked);
    read_into(doc, "paired_seeds", run.paired_seeds);
    if (doc.contains("coverage")) {
        const auto &c = doc.at("coverage");
        detail::reject_unknown(c, "coverage", {"cell_size"});
        read_into(c, "cell_size", cfg.cell_size);
    }
    if (cfg.plan.sigma_ranges.empty() || cfg.plan.zones.empty()) throw ConfigError("sigma_r and zone lists must be non-empty");
    run.noise.sigma_range = cfg.plan.sigma_ranges.front();
    run.zone.radius = cfg.plan.zones.front();
    run.validate();
    if (!(cfg.cell_size > 0.0)) throw ConfigError("coverage cell_size must be positive");
    return cfg;
}

inline ExperimentConfig load_experiment(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return experiment_from_json(doc);
}

/// The default experiment written out as a complete manifest.
inline nlohmann::json experiment_to_json(const ExperimentConfig &cfg)
{
    const auto &r = cfg.run;
    const auto &s = r.scenario;
    nlohmann::json circuit = nlohmann::json::array();
    for (const auto &p : s.circuit) circuit.push_back({p.x, p.y});
    std::string algorithm = cfg.plan.algorithms.size() == 2 ? "both" : std::string(to_string(cfg.plan.algorithms.front()));
    std::string mode = cfg.modes.size() == 2 ? "both" : std::string(to_string(cfg.modes.front()));
    return {
        {"scenario",
         {{"kind", s.kind == ScenarioKind::Circuit ? "circuit" : "town"},
          {"seed", s.seed},
          {"duration", s.duration},
          {"T_s", s.sample_time},
          {"area", {s.area.x_min, s.area.y_min, s.area.x_max, s.area.y_max}},
          {"n_moving", s.n_moving},
          {"n_parked", s.n_parked},
          {"n_entering", s.n_entering},
          {"entry_interval", s.entry_interval},
          {"parked_spacing", s.parked_spacing},
          {"circuit", circuit},
          {"speed", s.speed},
          {"block_size", s.block_size},
          {"parked_offset", s.parked_offset},
          {"n_choke_points", s.n_choke_points},
          {"max_queue_steps", s.max_queue_steps}}},
        {"zone", cfg.plan.zones},
        {"noise",
         {{"sigma_r", cfg.plan.sigma_ranges},
          {"sigma_gps", r.noise.sigma_gps},
          {"sigma_velocity", r.noise.sigma_velocity},
          {"drop_probability", r.noise.drop_probability}}},
        {"algorithm", algorithm},
        {"mode", mode},
        {"policy",
         {{"anchor_accuracy_threshold", r.policy.anchor_accuracy_threshold},
          {"gnss_window", r.policy.gnss_window},
          {"gps_reset_interval", r.policy.gps_reset_interval},
          {"anchors_preloaded", r.policy.anchors_preloaded}}},
        {"gcpso",
         {{"n_particles", r.gcpso.n_particles},
          {"n_iterations", r.gcpso.n_iterations},
          {"s_c", r.gcpso.success_threshold},
          {"f_c", r.gcpso.failure_threshold},
          {"rho0", r.gcpso.rho0},
          {"c1", r.gcpso.c1},
          {"c2", r.gcpso.c2},
          {"w_start", r.gcpso.w_start},
          {"w_end", r.gcpso.w_end},
          {"fitness_stop", r.gcpso.fitness_stop}}},
        {"ekf", {{"sigma_Q", r.ekf.sigma_q}, {"sigma_Gamma", r.ekf.sigma_gamma}}},
        {"n_runs", r.n_runs},
        {"seed", r.seed},
        {"tracked", r.tracked},
        {"paired_seeds", r.paired_seeds},
        {"coverage", {{"cell_size", cfg.cell_size}}},
    };
}

} // namespace parkcp

#endif
