#ifndef PARKCP_HARNESS_HPP
#define PARKCP_HARNESS_HPP

#include "parkcp/channel.hpp"
#include "parkcp/error.hpp"
#include "parkcp/localize.hpp"
#include "parkcp/model.hpp"
#include "parkcp/policy.hpp"
#include "parkcp/rng.hpp"
#include "parkcp/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace parkcp {

enum class Algorithm { Gcpso, Ekf };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::Gcpso ? "gcpso" : "ekf"; }
inline std::string_view to_string(Mode m) { return m == Mode::Traditional ? "traditional" : "proposed"; }

/// One episode's worth of settings.
struct RunConfig
{
    ScenarioConfig scenario;
    CommZone zone;
    NoiseModel noise;
    Algorithm algorithm = Algorithm::Gcpso;
    PolicyConfig policy;
    GcpsoParams gcpso;
    EkfParams ekf;
    int n_runs = 40;
    std::uint64_t seed = 1;
    int tracked = 5;          // longest-travelled vehicles reported by ensembles
    bool paired_seeds = true; // Traditional and Proposed share noise streams

    void validate() const
    {
        scenario.validate();
        zone.validate();
        noise.validate();
        policy.validate();
        gcpso.validate();
        if (!(ekf.sigma_q > 0.0 && ekf.sigma_gamma > 0.0)) throw ConfigError("EKF sigmas must be positive");
        if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
        if (tracked < 1) throw ConfigError("tracked must be at least 1");
    }
};

/// Estimation history of one non-parked vehicle over an episode.
struct VehicleSeries
{
    int id = 0;
    std::vector<std::int64_t> steps;
    std::vector<double> errors;       // |estimate - truth| per active step
    std::vector<int> anchors_used;    // anchors among the selected neighbours per step
    int parked_encountered = 0;       // distinct parked cars that ever entered the zone
    double travelled_km = 0.0;
};

struct EpisodeResult
{
    std::vector<VehicleSeries> vehicles; // ascending id

    const VehicleSeries &vehicle(int id) const
    {
        for (const auto &v : vehicles)
            if (v.id == id) return v;
        throw std::out_of_range("vehicle " + std::to_string(id) + " not in episode result");
    }

    friend bool operator==(const EpisodeResult &a, const EpisodeResult &b)
    {
        if (a.vehicles.size() != b.vehicles.size()) return false;
        for (std::size_t k = 0; k < a.vehicles.size(); ++k) {
            const auto &x = a.vehicles[k], &y = b.vehicles[k];
            if (x.id != y.id || x.steps != y.steps || x.errors != y.errors || x.anchors_used != y.anchors_used ||
                x.parked_encountered != y.parked_encountered || x.travelled_km != y.travelled_km)
                return false;
        }
        return true;
    }
};

// -- metrics ------------------------------------------------------------------

inline double rmse(std::span<const double> errors)
{
    if (errors.empty()) throw std::domain_error("rmse of an empty series");
    double ss = 0.0;
    for (double e : errors) ss += e * e;
    return std::sqrt(ss / static_cast<double>(errors.size()));
}

/// Relative RMSE reduction of the proposed scheme, percent.
inline double improvement(double trad_rmse, double prop_rmse)
{
    if (!(trad_rmse > 0.0)) throw std::domain_error("improvement needs a positive traditional RMSE");
    return 100.0 * (trad_rmse - prop_rmse) / trad_rmse;
}

inline double mean(std::span<const double> xs)
{
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation; 0 for fewer than two values.
inline double stddev(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double travelled_km(const VehicleRecord &rec)
{
    double m = 0.0;
    for (std::size_t k = 1; k < rec.trajectory.size(); ++k)
        m += distance(rec.trajectory[k - 1].position, rec.trajectory[k].position);
    return m / 1000.0;
}

/// Ids of the `n` non-parked vehicles with the longest travelled path, longest
/// first (ties by id).
inline std::vector<int> longest_routes(const std::vector<VehicleRecord> &trace, int n)
{
    std::vector<std::pair<double, int>> lengths;
    for (const auto &r : trace)
        if (r.kind != MotionKind::Parked) lengths.push_back({-travelled_km(r), r.id});
    std::sort(lengths.begin(), lengths.end());
    std::vector<int> out;
    for (std::size_t k = 0; k < lengths.size() && static_cast<int>(k) < n; ++k) out.push_back(lengths[k].second);
    return out;
}

/// Rejects traces that do not integrate at the configured sample time.
inline void check_trace(const std::vector<VehicleRecord> &trace, double sample_time, double tolerance = 0.5)
{
    for (const auto &rec : trace) {
        const double err = max_integration_error(rec, sample_time);
        if (err > tolerance)
            throw ConfigError("trace for vehicle " + std::to_string(rec.id) + " is inconsistent with T_s=" +
                              std::to_string(sample_time) + " (off by " + std::to_string(err) + " m)");
    }
}

// -- episode ------------------------------------------------------------------

namespace detail {

struct Track
{
    bool started = false;
    Position2D estimate;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    NodeClass node_class = NodeClass::Blind;
    int isolated_steps = 0;
    int gnss_steps = 0;
    Offset2D gnss_sum;
    Velocity2D measured_velocity;
    std::set<int> parked_seen;
};

/// Range-only fix from the anchors among `candidates` (sorted best first) and
/// its expected error: trilateration with three or more anchors, prior-aided
/// bilateration with two.
inline std::optional<std::pair<Position2D, double>> stationary_fix(const std::vector<Candidate> &candidates,
                                                                   const Position2D &prior, double sigma_r)
{
    std::vector<Position2D> anchors;
    std::vector<double> ranges;
    for (const auto &c : candidates)
        if (c.node_class == NodeClass::Anchor) {
            anchors.push_back(c.shared_position);
            ranges.push_back(c.range.measured_distance);
        }
    try {
        Position2D fix;
        if (anchors.size() >= 3) {
            fix = trilaterate(std::span<const Position2D>(anchors.data(), 3), std::span<const double>(ranges.data(), 3))
                      .position;
        } else if (anchors.size() == 2) {
            fix = bilaterate_with_prior(anchors[0], ranges[0], anchors[1], ranges[1], prior,
                                        std::max(2.0 * sigma_r, 1e-6));
        } else {
            return std::nullopt;
        }
        const auto used = std::span<const Position2D>(anchors.data(), std::min<std::size_t>(anchors.size(), 3));
        return std::pair{fix, sigma_r * range_dop(used, fix)};
    } catch (const GeometryError &) {
        return std::nullopt;
    }
}

} // namespace detail

/// Runs one synchronous episode over `trace`. Every step: vehicles dead-reckon
/// a prior, everyone broadcasts (anchors their true position, others the
/// prior), then each non-parked vehicle ranges its neighbours, selects at most
/// three, runs the configured localiser, applies the isolation GPS reset and is
/// reclassified. Updates read only this step's broadcasts, so the per-vehicle
/// order does not matter. All noise comes from substreams keyed on
/// (run_seed, purpose, vehicle, neighbour/step).
inline EpisodeResult run_episode(const RunConfig &cfg, const std::vector<VehicleRecord> &trace, std::uint64_t run_seed)
{
    cfg.validate();
    const double dt = cfg.scenario.sample_time;
    check_trace(trace, dt);
    EkfParams ekf = cfg.ekf;
    ekf.sigma_r = std::max(cfg.noise.sigma_range, 1e-3);
    ekf.sample_time = dt;
    const bool proposed = cfg.policy.mode == Mode::Proposed;
    const double gps_var = std::max(cfg.noise.sigma_gps * cfg.noise.sigma_gps, 1e-6);

    std::vector<const VehicleRecord *> recs;
    for (const auto &r : trace)
        if (!r.trajectory.empty()) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](auto *a, auto *b) { return a->id < b->id; });
    std::vector<detail::Track> tracks(recs.size());
    std::unordered_map<int, std::size_t> index_of;
    for (std::size_t k = 0; k < recs.size(); ++k) index_of[recs[k]->id] = k;

    EpisodeResult result;
    std::vector<std::size_t> series_of(recs.size(), SIZE_MAX);
    for (std::size_t k = 0; k < recs.size(); ++k)
        if (recs[k]->kind != MotionKind::Parked) {
            series_of[k] = result.vehicles.size();
            result.vehicles.push_back({recs[k]->id, {}, {}, {}, 0, travelled_km(*recs[k])});
        }
    if (recs.empty()) return result;

    std::int64_t t_begin = recs.front()->first_step, t_end = recs.front()->last_step();
    for (auto *r : recs) {
        t_begin = std::min(t_begin, r->first_step);
        t_end = std::max(t_end, r->last_step());
    }

    const auto gps_fix = [&](int id, std::int64_t t, std::uint64_t variant, const Position2D &truth) {
        auto g = substream(run_seed, Purpose::Gps, static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(t), variant);
        return measure_gps(truth, cfg.noise, g, id, t).position;
    };

    struct Broadcast
    {
        NodeClass node_class;
        Position2D shared;
        double variance;
        Position2D truth;
        bool parked;
    };
    std::vector<Broadcast> board(recs.size());
    std::vector<char> on_air(recs.size(), 0);
    std::vector<char> fresh(recs.size(), 0);
    std::vector<Position2D> priors(recs.size());
    NeighborGrid grid(cfg.zone.radius);
    NeighborGrid parked_grid(cfg.zone.radius);

    for (std::int64_t t = t_begin; t <= t_end; ++t) {
        grid.clear();
        parked_grid.clear();
        std::fill(on_air.begin(), on_air.end(), 0);
        std::fill(fresh.begin(), fresh.end(), 0);

        // phase 1: priors and broadcasts
        for (std::size_t k = 0; k < recs.size(); ++k) {
            const auto &rec = *recs[k];
            if (!rec.active_at(t)) continue;
            auto &tr = tracks[k];
            const auto &sample = rec.at(t);
            if (rec.kind == MotionKind::Parked) {
                parked_grid.insert(rec.id, sample.position);
                if (!proposed) continue; // parked cars are off the network in traditional CP
                if (!tr.started) {
                    tr.started = true;
                    tr.node_class = cfg.policy.anchors_preloaded ? NodeClass::Anchor : NodeClass::Inactive;
                    tr.estimate = cfg.policy.anchors_preloaded ? sample.position : gps_fix(rec.id, t, 0, sample.position);
                }
                priors[k] = tr.estimate;
            } else if (!tr.started) {
                tr.started = true;
                tr.estimate = gps_fix(rec.id, t, 0, sample.position);
                tr.covariance = gps_var * Eigen::Matrix2d::Identity();
                tr.node_class = NodeClass::Blind;
                priors[k] = tr.estimate;
                fresh[k] = 1;
            } else {
                priors[k] = dead_reckon(tr.estimate, tr.measured_velocity, dt);
            }
            const bool anchor = tr.node_class == NodeClass::Anchor;
            double variance = 0.0;
            if (!anchor) variance = 0.5 * (tr.covariance.trace() + (fresh[k] ? 0.0 : 2.0 * ekf.process_variance()));
            board[k] = {tr.node_class, anchor ? sample.position : priors[k], variance, sample.position,
                        rec.kind == MotionKind::Parked};
            if (tr.node_class != NodeClass::Inactive) {
                on_air[k] = 1;
                grid.insert(rec.id, sample.position);
            }
        }

        // phase 2: localisation
        std::vector<NodeClass> next_class(recs.size());
        for (std::size_t k = 0; k < recs.size(); ++k) {
            const auto &rec = *recs[k];
            auto &tr = tracks[k];
            next_class[k] = tr.node_class;
            if (!rec.active_at(t) || !tr.started) continue;
            const auto &sample = rec.at(t);
            const bool parked = rec.kind == MotionKind::Parked;
            if (parked && tr.node_class == NodeClass::Anchor) continue;

            std::vector<Candidate> candidates;
            for (int j : grid.query(sample.position, cfg.zone.radius, rec.id)) {
                const std::size_t jk = index_of.at(j);
                auto drop = substream(run_seed, Purpose::LinkDrop, static_cast<std::uint64_t>(rec.id),
                                      static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(t));
                if (link_dropped(cfg.noise, drop)) continue;
                auto rr = substream(run_seed, Purpose::Range, static_cast<std::uint64_t>(rec.id),
                                    static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(t));
                const double d = measure_range(distance(sample.position, board[jk].truth), cfg.noise, rr);
                candidates.push_back({j, board[jk].node_class, board[jk].shared, {rec.id, j, d, t}, board[jk].variance});
            }

            if (!parked)
                for (int j : parked_grid.query(sample.position, cfg.zone.radius, rec.id)) tr.parked_seen.insert(j);

            auto &series_slot = series_of[k];
            const auto record_error = [&](int anchors) {
                if (series_slot == SIZE_MAX) return;
                auto &s = result.vehicles[series_slot];
                s.steps.push_back(t);
                s.errors.push_back(distance(tr.estimate, sample.position));
                s.anchors_used.push_back(anchors);
                s.parked_encountered = static_cast<int>(tr.parked_seen.size());
            };

            // stationary vehicles: bootstrap towards anchor status (proposed only)
            if (proposed && sample.kind != MotionKind::Moving) {
                if (tr.node_class == NodeClass::Anchor) {
                    record_error(0);
                    continue;
                }
                ++tr.gnss_steps;
                const auto g = gps_fix(rec.id, t, 1, sample.position);
                tr.gnss_sum = tr.gnss_sum + Offset2D{g.x, g.y};
                int anchors_in_range = 0;
                for (const auto &c : candidates) anchors_in_range += c.node_class == NodeClass::Anchor;
                auto sorted = select_neighbors(candidates, candidates.size());
                auto fix = detail::stationary_fix(sorted, priors[k], cfg.noise.sigma_range);
                const NodeClass cls = classify_stationary(sample.kind, anchors_in_range, tr.gnss_steps,
                                                          fix ? std::optional<double>(fix->second) : std::nullopt,
                                                          cfg.noise.sigma_gps, cfg.policy);
                if (cls == NodeClass::Anchor) {
                    const double gnss_err = gnss_average_error(cfg.noise.sigma_gps, tr.gnss_steps);
                    if (fix && fix->second <= gnss_err) {
                        tr.estimate = fix->first;
                    } else {
                        const double n = tr.gnss_steps;
                        tr.estimate = {tr.gnss_sum.dx / n, tr.gnss_sum.dy / n};
                    }
                    tr.covariance = std::pow(cfg.policy.anchor_accuracy_threshold, 2) * Eigen::Matrix2d::Identity();
                    next_class[k] = NodeClass::Anchor;
                    tr.measured_velocity = {};
                    record_error(0);
                    continue;
                }
                next_class[k] = cls;
                if (parked) continue; // inactive: waits for a better fix
            } else if (sample.kind == MotionKind::Moving) {
                tr.gnss_steps = 0;
                tr.gnss_sum = {};
            }

            const auto selected = select_neighbors(std::move(candidates), 3);
            int anchors_used = 0;
            for (const auto &c : selected) anchors_used += c.node_class == NodeClass::Anchor;

            if (!fresh[k]) {
                if (cfg.algorithm == Algorithm::Gcpso) {
                    LocalizationProblem prob{selected, priors[k], tr.measured_velocity, dt};
                    auto swarm = substream(run_seed, Purpose::Swarm, static_cast<std::uint64_t>(rec.id),
                                           static_cast<std::uint64_t>(t));
                    tr.estimate = gcpso_localize(prob, cfg.gcpso, swarm).estimate;
                } else {
                    auto predicted = ekf_predict(tr.estimate, tr.covariance, tr.measured_velocity, ekf);
                    auto updated = ekf_update(predicted.state, predicted.covariance, selected, ekf);
                    tr.estimate = updated.state;
                    tr.covariance = updated.covariance;
                }
                if (selected.empty()) {
                    if (++tr.isolated_steps >= cfg.policy.gps_reset_interval) {
                        tr.estimate = gps_fix(rec.id, t, 0, sample.position);
                        tr.covariance = gps_var * Eigen::Matrix2d::Identity();
                        tr.isolated_steps = 0;
                    }
                } else {
                    tr.isolated_steps = 0;
                }
            }

            if (sample.kind == MotionKind::Moving || !proposed)
                next_class[k] = proposed ? classify_moving(anchors_used) : NodeClass::Blind;

            auto vr = substream(run_seed, Purpose::Velocity, static_cast<std::uint64_t>(rec.id),
                                static_cast<std::uint64_t>(t));
            tr.measured_velocity = measure_velocity(sample.velocity, cfg.noise, vr);
            record_error(anchors_used);
        }
        for (std::size_t k = 0; k < recs.size(); ++k) tracks[k].node_class = next_class[k];
    }
    return result;
}

inline EpisodeResult run_episode(const RunConfig &cfg, std::uint64_t run_seed)
{
    return run_episode(cfg, generate(cfg.scenario), run_seed);
}

// -- ensembles ------------------------------------------------------------------

/// Seed of run k in an ensemble seeded with `seed`.
inline std::uint64_t run_seed_for(std::uint64_t seed, int k)
{
    return mix_key({seed, static_cast<std::uint64_t>(Purpose::RunSeed), static_cast<std::uint64_t>(k)});
}

/// Settings swept by an ensemble on top of a base RunConfig.
struct SweepPlan
{
    std::vector<Algorithm> algorithms{Algorithm::Gcpso, Algorithm::Ekf};
    std::vector<double> sigma_ranges{0.2, 4.0};
    std::vector<double> zones{15.0};
    bool keep_steps = false;
};

struct StepRow
{
    int run;
    int vehicle;
    std::int64_t t;
    double error;
};

/// Ensemble result for one (vehicle, algorithm, sigma_r, zone) cell.
struct CellSummary
{
    int vehicle = 0;
    Algorithm algorithm = Algorithm::Gcpso;
    double sigma_range = 0.0;
    double zone = 0.0;
    std::vector<double> trad_rmse;   // per run
    std::vector<double> prop_rmse;   // per run
    std::vector<double> improvements; // per run, percent
    int parked_experienced = 0;
    double travelled_km = 0.0;
    std::vector<StepRow> trad_steps; // only with SweepPlan::keep_steps
    std::vector<StepRow> prop_steps;

    double trad_mean() const { return mean(trad_rmse); }
    double prop_mean() const { return mean(prop_rmse); }
    double trad_std() const { return stddev(trad_rmse); }
    double prop_std() const { return stddev(prop_rmse); }
    double mean_improvement() const { return mean(improvements); }
    int improved_runs() const
    {
        return static_cast<int>(std::count_if(improvements.begin(), improvements.end(), [](double x) { return x > 0.0; }));
    }
};

struct EnsembleSummary
{
    std::vector<CellSummary> cells; // plan order, then tracked-vehicle order

    /// Mean improvement of a vehicle over every cell it appears in.
    double overall_improvement(int vehicle) const
    {
        std::vector<double> xs;
        for (const auto &c : cells)
            if (c.vehicle == vehicle) xs.push_back(c.mean_improvement());
        return mean(xs);
    }
};

/// Paired Traditional/Proposed ensembles over every cell of `plan`. Episodes
/// run on `jobs` worker threads; results are reduced in (cell, run) order so the
/// summary does not depend on `jobs`.
inline EnsembleSummary ensemble(const RunConfig &base, const std::vector<VehicleRecord> &trace, const SweepPlan &plan,
                                int jobs = 1)
{
    base.validate();
    check_trace(trace, base.scenario.sample_time);
    const auto tracked = longest_routes(trace, base.tracked);

    struct Task
    {
        RunConfig cfg;
        std::size_t cell;
        int run;
        Mode mode;
    };
    std::vector<Task> tasks;
    std::vector<RunConfig> cell_cfgs;
    for (auto alg : plan.algorithms)
        for (double sr : plan.sigma_ranges)
            for (double zone : plan.zones) {
                RunConfig c = base;
                c.algorithm = alg;
                c.noise.sigma_range = sr;
                c.zone.radius = zone;
                c.validate();
                cell_cfgs.push_back(c);
            }
    for (std::size_t ci = 0; ci < cell_cfgs.size(); ++ci)
        for (int k = 0; k < base.n_runs; ++k)
            for (Mode m : {Mode::Traditional, Mode::Proposed}) {
                RunConfig c = cell_cfgs[ci];
                c.policy.mode = m;
                tasks.push_back({c, ci, k, m});
            }

    std::vector<EpisodeResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto &task = tasks[i];
            std::uint64_t seed = run_seed_for(base.seed, task.run);
            if (task.mode == Mode::Proposed && !base.paired_seeds) seed = mix_key({seed, 0x70726f70ULL});
            results[i] = run_episode(task.cfg, trace, seed);
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    }

    EnsembleSummary out;
    for (std::size_t ci = 0; ci < cell_cfgs.size(); ++ci)
        for (int vid : tracked) {
            CellSummary cell;
            cell.vehicle = vid;
            cell.algorithm = cell_cfgs[ci].algorithm;
            cell.sigma_range = cell_cfgs[ci].noise.sigma_range;
            cell.zone = cell_cfgs[ci].zone.radius;
            for (std::size_t i = 0; i < tasks.size(); i += 2) {
                if (tasks[i].cell != ci) continue;
                const auto &trad = results[i].vehicle(vid);
                const auto &prop = results[i + 1].vehicle(vid);
                const double tr = rmse(trad.errors), pr = rmse(prop.errors);
                cell.trad_rmse.push_back(tr);
                cell.prop_rmse.push_back(pr);
                cell.improvements.push_back(improvement(tr, pr));
                cell.parked_experienced = prop.parked_encountered;
                cell.travelled_km = prop.travelled_km;
                if (plan.keep_steps)
                    for (std::size_t s = 0; s < trad.steps.size(); ++s) {
                        cell.trad_steps.push_back({tasks[i].run, vid, trad.steps[s], trad.errors[s]});
                        cell.prop_steps.push_back({tasks[i].run, vid, prop.steps[s], prop.errors[s]});
                    }
            }
            out.cells.push_back(std::move(cell));
        }
    return out;
}

inline EnsembleSummary ensemble(const RunConfig &base, const SweepPlan &plan, int jobs = 1)
{
    return ensemble(base, generate(base.scenario), plan, jobs);
}

// -- reporting ------------------------------------------------------------------

inline constexpr std::string_view results_header =
    "vehicle,algorithm,mode,sigma_r,zone,runs,rmse_mean,rmse_std,improvement_mean,improved_runs,parked_experienced,"
    "travelled_km";

inline constexpr Mode both_modes[] = {Mode::Traditional, Mode::Proposed};

inline bool has_mode(std::span<const Mode> modes, Mode m) { return std::find(modes.begin(), modes.end(), m) != modes.end(); }

/// Up to two rows per cell: traditional (no improvement columns) then proposed.
inline void write_results_csv(std::ostream &out, const EnsembleSummary &summary, std::span<const Mode> modes = both_modes)
{
    using detail::format_double;
    out << results_header << '\n';
    for (const auto &c : summary.cells) {
        const auto prefix = [&](Mode m) {
            out << c.vehicle << ',' << to_string(c.algorithm) << ',' << to_string(m) << ','
                << format_double(c.sigma_range) << ',' << format_double(c.zone) << ',' << c.trad_rmse.size() << ',';
        };
        if (has_mode(modes, Mode::Traditional)) {
            prefix(Mode::Traditional);
            out << format_double(c.trad_mean()) << ',' << format_double(c.trad_std()) << ",,," << c.parked_experienced
                << ',' << format_double(c.travelled_km) << '\n';
        }
        if (!has_mode(modes, Mode::Proposed)) continue;
        prefix(Mode::Proposed);
        out << format_double(c.prop_mean()) << ',' << format_double(c.prop_std()) << ','
            << format_double(c.mean_improvement()) << ',' << c.improved_runs() << ',' << c.parked_experienced << ','
            << format_double(c.travelled_km) << '\n';
    }
}

inline void write_steps_csv(std::ostream &out, const EnsembleSummary &summary, std::span<const Mode> modes = both_modes)
{
    using detail::format_double;
    out << "run,vehicle,algorithm,mode,sigma_r,zone,t,error\n";
    for (const auto &c : summary.cells)
        for (Mode m : modes)
            for (const auto &row : m == Mode::Traditional ? c.trad_steps : c.prop_steps)
                out << row.run << ',' << row.vehicle << ',' << to_string(c.algorithm) << ',' << to_string(m) << ','
                    << format_double(c.sigma_range) << ',' << format_double(c.zone) << ',' << row.t << ','
                    << format_double(row.error) << '\n';
}

/// Human-readable table: one line per cell with both modes side by side.
inline void print_summary(std::ostream &out, const EnsembleSummary &summary)
{
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-6s %7s %6s | %8s %7s | %8s %7s | %9s %7s\n", "vehicle", "alg", "sigma_r",
                  "zone", "trad", "sd", "prop", "sd", "improve%", "better");
    out << line;
    for (const auto &c : summary.cells) {
        std::snprintf(line, sizeof line, "%-8d %-6s %7.2f %6.0f | %8.2f %7.2f | %8.2f %7.2f | %8.2f%% %3d/%-3zu\n",
                      c.vehicle, std::string(to_string(c.algorithm)).c_str(), c.sigma_range, c.zone, c.trad_mean(),
                      c.trad_std(), c.prop_mean(), c.prop_std(), c.mean_improvement(), c.improved_runs(),
                      c.improvements.size());
        out << line;
    }
}

} // namespace parkcp

#endif
