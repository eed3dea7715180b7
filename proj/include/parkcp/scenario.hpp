#ifndef PARKCP_SCENARIO_HPP
#define PARKCP_SCENARIO_HPP

#include "parkcp/error.hpp"
#include "parkcp/model.hpp"
#include "parkcp/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace parkcp {

struct Rect
{
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

enum class ScenarioKind { Circuit, Town };

struct ScenarioConfig
{
    ScenarioKind kind = ScenarioKind::Circuit;
    std::uint64_t seed = 1;
    std::int64_t duration = 600;      // steps
    double sample_time = 1.0;         // T_s, seconds
    Rect area{0.0, 0.0, 1000.0, 1000.0};
    int n_moving = 200;
    int n_parked = 20;
    int n_entering = 95;
    std::int64_t entry_interval = 4;  // steps
    double parked_spacing = 30.0;     // meters
    std::vector<Position2D> circuit{{0.0, 0.0}, {200.0, 0.0}, {200.0, 100.0}, {0.0, 100.0}};
    double speed = 10.0;              // m/s, moving vehicles
    double block_size = 100.0;        // town street grid pitch, meters
    double parked_offset = 3.0;       // kerb offset from the street centre line, meters
    int n_choke_points = 6;
    std::int64_t max_queue_steps = 30;

    void validate() const
    {
        if (!(sample_time > 0.0)) throw ConfigError("T_s must be positive");
        if (duration < 1) throw ConfigError("duration must be at least one step");
        if (n_moving < 0 || n_parked < 0 || n_entering < 0 || n_choke_points < 0)
            throw ConfigError("vehicle counts must be non-negative");
        if (!(parked_spacing > 0.0)) throw ConfigError("parked_spacing must be positive");
        if (!(speed > 0.0)) throw ConfigError("speed must be positive");
        if (entry_interval < 1) throw ConfigError("entry_interval must be at least one step");
        if (max_queue_steps < 1) throw ConfigError("max_queue_steps must be at least one step");
        if (!(parked_offset >= 0.0 && parked_offset <= 15.0))
            throw ConfigError("parked_offset must lie within 15 m of the road");
    }
};

// -- polyline -----------------------------------------------------------------

/// Arc-length parameterised polyline. A closed polyline wraps its last vertex
/// back to the first.
class Polyline
{
public:
    Polyline(std::vector<Position2D> vertices, bool closed) : vertices_(std::move(vertices)), closed_(closed)
    {
        if (vertices_.size() < 2) throw ConfigError("polyline needs at least two vertices");
        if (closed_) vertices_.push_back(vertices_.front());
        cumulative_.push_back(0.0);
        for (std::size_t k = 1; k < vertices_.size(); ++k) {
            double len = distance(vertices_[k - 1], vertices_[k]);
            if (!(len > 0.0)) throw ConfigError("polyline has a zero-length segment");
            cumulative_.push_back(cumulative_.back() + len);
        }
    }

    double length() const { return cumulative_.back(); }
    bool closed() const { return closed_; }
    const std::vector<Position2D> &vertices() const { return vertices_; }

    /// Point at arc length s. Closed polylines wrap s; open ones clamp it.
    Position2D point_at(double s) const
    {
        auto [seg, local] = locate(s);
        const auto &a = vertices_[seg];
        const auto &b = vertices_[seg + 1];
        double t = local / (cumulative_[seg + 1] - cumulative_[seg]);
        return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    }

    /// Unit tangent of the segment containing s.
    Offset2D tangent_at(double s) const
    {
        auto seg = locate(s).first;
        auto d = vertices_[seg + 1] - vertices_[seg];
        double n = d.norm();
        return {d.dx / n, d.dy / n};
    }

private:
    std::pair<std::size_t, double> locate(double s) const
    {
        const double len = length();
        if (closed_) {
            s = std::fmod(s, len);
            if (s < 0.0) s += len;
        } else {
            s = std::clamp(s, 0.0, len);
        }
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
        std::size_t seg = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        seg = std::min(seg, vertices_.size() - 2);
        return {seg, s - cumulative_[seg]};
    }

    std::vector<Position2D> vertices_;
    bool closed_;
    std::vector<double> cumulative_;
};

// -- trace file ---------------------------------------------------------------

inline constexpr std::string_view trace_header = "t,id,x,y,vx,vy,kind";

struct TraceData
{
    std::vector<VehicleRecord> vehicles;
    std::optional<double> sample_time; // from a `# T_s=<seconds>` comment, when present
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    T value{};
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) return std::nullopt;
    }
    return value;
}

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Reads a trace. Rows must be sorted by (t, id) with unique pairs, each
/// vehicle's rows gap-free, and parked rows at zero velocity.
inline TraceData read_trace(std::istream &in)
{
    TraceData data;
    std::map<int, VehicleRecord> by_id;
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    std::optional<std::pair<std::int64_t, int>> last_key;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = detail::trim(line.substr(1));
            if (body.starts_with("T_s=")) {
                auto v = detail::parse_number<double>(detail::trim(body.substr(4)));
                if (!v || !(*v > 0.0)) throw ParseError(line_no, "bad T_s comment");
                data.sample_time = *v;
            }
            continue;
        }
        if (!have_header) {
            if (line != trace_header) throw ParseError(line_no, "expected header '" + std::string(trace_header) + "'");
            have_header = true;
            continue;
        }
        auto fields = detail::split_csv(line);
        if (fields.size() != 7) throw ParseError(line_no, "expected 7 fields, got " + std::to_string(fields.size()));
        auto t = detail::parse_number<std::int64_t>(fields[0]);
        auto id = detail::parse_number<int>(fields[1]);
        auto x = detail::parse_number<double>(fields[2]);
        auto y = detail::parse_number<double>(fields[3]);
        auto vx = detail::parse_number<double>(fields[4]);
        auto vy = detail::parse_number<double>(fields[5]);
        auto kind = motion_kind_from_string(fields[6]);
        if (!t || *t < 0) throw ParseError(line_no, "bad step '" + std::string(fields[0]) + "'");
        if (!id) throw ParseError(line_no, "bad id '" + std::string(fields[1]) + "'");
        if (!x || !y || !vx || !vy) throw ParseError(line_no, "bad numeric field");
        if (!kind) throw ParseError(line_no, "bad kind '" + std::string(fields[6]) + "'");

        auto where = " (line " + std::to_string(line_no) + ")";
        if (*kind == MotionKind::Parked && (*vx != 0.0 || *vy != 0.0))
            throw ValidationError("parked vehicle " + std::to_string(*id) + " has non-zero velocity" + where);
        std::pair key{*t, *id};
        if (last_key && key == *last_key)
            throw ValidationError("duplicate row for t=" + std::to_string(*t) + " id=" + std::to_string(*id) + where);
        if (last_key && key < *last_key) throw ValidationError("rows not sorted by (t, id)" + where);
        last_key = key;

        TrajectorySample sample{{*x, *y}, {*vx, *vy}, *kind};
        auto [it, inserted] = by_id.try_emplace(*id);
        auto &rec = it->second;
        if (inserted) {
            rec.id = *id;
            rec.first_step = *t;
            rec.kind = *kind == MotionKind::Parked ? MotionKind::Parked : MotionKind::Moving;
        } else {
            if (*t != rec.last_step() + 1)
                throw ValidationError("vehicle " + std::to_string(*id) + " has a gap in its trajectory" + where);
            if ((*kind == MotionKind::Parked) != (rec.kind == MotionKind::Parked))
                throw ValidationError("vehicle " + std::to_string(*id) + " mixes parked and non-parked rows" + where);
        }
        rec.trajectory.push_back(sample);
    }
    data.vehicles.reserve(by_id.size());
    for (auto &[id, rec] : by_id) data.vehicles.push_back(std::move(rec));
    return data;
}

inline std::vector<VehicleRecord> parse_trace(std::istream &in) { return read_trace(in).vehicles; }

inline std::vector<VehicleRecord> parse_trace(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_trace(in);
}

/// Writes records as a trace, rows sorted by (t, id). Numbers use the shortest
/// round-trip form, so reading the output back is bit-exact.
inline void write_trace(std::ostream &out, const std::vector<VehicleRecord> &records,
                        std::optional<double> sample_time = std::nullopt)
{
    if (sample_time) out << "# T_s=" << detail::format_double(*sample_time) << '\n';
    out << trace_header << '\n';
    std::vector<const VehicleRecord *> order;
    for (const auto &r : records) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](auto *a, auto *b) { return a->id < b->id; });
    std::int64_t t_min = 0, t_max = -1;
    bool first = true;
    for (auto *r : order) {
        if (r->trajectory.empty()) continue;
        t_min = first ? r->first_step : std::min(t_min, r->first_step);
        t_max = first ? r->last_step() : std::max(t_max, r->last_step());
        first = false;
    }
    for (std::int64_t t = t_min; t <= t_max; ++t) {
        for (auto *r : order) {
            if (!r->active_at(t)) continue;
            const auto &s = r->at(t);
            out << t << ',' << r->id << ',' << detail::format_double(s.position.x) << ','
                << detail::format_double(s.position.y) << ',' << detail::format_double(s.velocity.vx) << ','
                << detail::format_double(s.velocity.vy) << ',' << to_string(s.kind) << '\n';
        }
    }
}

inline std::string serialize_trace(const std::vector<VehicleRecord> &records,
                                   std::optional<double> sample_time = std::nullopt)
{
    std::ostringstream out;
    write_trace(out, records, sample_time);
    return out.str();
}

// -- synthetic generators -------------------------------------------------------

namespace detail {

inline VehicleRecord make_parked(int id, Position2D where, std::int64_t duration)
{
    VehicleRecord rec;
    rec.id = id;
    rec.kind = MotionKind::Parked;
    rec.first_step = 0;
    rec.trajectory.assign(static_cast<std::size_t>(duration), TrajectorySample{where, {}, MotionKind::Parked});
    return rec;
}

/// Drives along `path` from arc length `start_s` at constant speed, halting at
/// each stop in `stops` (arc length, queue steps). Positions are integrated from
/// the emitted velocities so the trajectory is exactly self-consistent.
/// Open paths end the trajectory on arrival; closed ones loop until `max_steps`.
struct Stop
{
    double s;
    std::int64_t steps;
};

inline std::vector<TrajectorySample> drive(const Polyline &path, double start_s, double speed, double dt,
                                           std::int64_t max_steps, std::vector<Stop> stops = {})
{
    std::sort(stops.begin(), stops.end(), [](const Stop &a, const Stop &b) { return a.s < b.s; });
    std::vector<TrajectorySample> out;
    out.reserve(static_cast<std::size_t>(max_steps));
    double s = start_s;
    Position2D pos = path.point_at(s);
    std::size_t next_stop = 0;
    std::int64_t queue_left = 0;
    const double end_s = path.closed() ? std::numeric_limits<double>::infinity() : path.length();

    for (std::int64_t k = 0; k < max_steps; ++k) {
        if (queue_left > 0) {
            out.push_back({pos, {}, MotionKind::QueuedStationary});
            --queue_left;
            continue;
        }
        if (s >= end_s) {
            // arrived; the final sample stands still
            out.push_back({pos, {}, MotionKind::Moving});
            break;
        }
        double next_s = std::min(s + speed * dt, end_s);
        if (next_stop < stops.size() && stops[next_stop].s <= next_s) {
            next_s = std::max(stops[next_stop].s, s);
            queue_left = stops[next_stop].steps;
            ++next_stop;
        }
        Position2D target = path.point_at(next_s);
        Velocity2D vel{(target.x - pos.x) / dt, (target.y - pos.y) / dt};
        if (vel.vx == 0.0 && vel.vy == 0.0 && queue_left > 0) {
            out.push_back({pos, {}, MotionKind::QueuedStationary});
            --queue_left;
            s = next_s;
            continue;
        }
        out.push_back({pos, vel, MotionKind::Moving});
        pos = pos + dt * vel;
        s = next_s;
    }
    return out;
}

} // namespace detail

/// Circuit archetype: vehicle 0 laps the closed `circuit` polyline; parked
/// vehicles 1..n_parked sit at stations spaced `parked_spacing` apart in arc
/// length, offset to the right of the direction of travel.
inline std::vector<VehicleRecord> gen_circuit(const ScenarioConfig &cfg)
{
    cfg.validate();
    if (cfg.circuit.size() < 2) throw ConfigError("circuit needs at least two waypoints");
    Polyline loop(cfg.circuit, true);
    if (cfg.n_parked > 0 && cfg.parked_spacing * cfg.n_parked > loop.length() + 1e-9)
        throw ConfigError("parked stations do not fit on the circuit");

    auto rng = substream(cfg.seed, Purpose::Scenario, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<VehicleRecord> out;
    VehicleRecord target;
    target.id = 0;
    target.kind = MotionKind::Moving;
    target.first_step = 0;
    double start_s = unit(rng) * loop.length();
    target.trajectory = detail::drive(loop, start_s, cfg.speed, cfg.sample_time, cfg.duration);
    out.push_back(std::move(target));

    for (int k = 0; k < cfg.n_parked; ++k) {
        double s = (k + 0.5) * cfg.parked_spacing;
        Position2D on_road = loop.point_at(s);
        Offset2D tan = loop.tangent_at(s);
        Offset2D right{tan.dy, -tan.dx};
        out.push_back(detail::make_parked(k + 1, on_road + cfg.parked_offset * right, cfg.duration));
    }
    return out;
}

/// Town archetype on a Manhattan street grid of pitch `block_size` covering
/// `area`. Vehicles 0..n_moving-1 chain random routes for the whole duration;
/// the next n_entering vehicles enter one every `entry_interval` steps on a
/// single random route and leave on arrival; parked vehicles fill random kerb
/// slots. Vehicles halt for a random number of steps at choke-point
/// intersections.
inline std::vector<VehicleRecord> gen_town(const ScenarioConfig &cfg)
{
    cfg.validate();
    const auto &area = cfg.area;
    if (!(area.width() > 0.0 && area.height() > 0.0)) throw ConfigError("town area is degenerate");
    if (!(cfg.block_size > 0.0)) throw ConfigError("block_size must be positive");
    const int nx = static_cast<int>(std::floor(area.width() / cfg.block_size + 1e-9));
    const int ny = static_cast<int>(std::floor(area.height() / cfg.block_size + 1e-9));
    if (nx < 1 || ny < 1) throw ConfigError("town area smaller than one block");
    if (cfg.parked_spacing < 1.0) throw ConfigError("parked_spacing below 1 m makes parked cars overlap");
    if (cfg.n_entering > 0 && (cfg.n_entering - 1) * cfg.entry_interval >= cfg.duration)
        throw ConfigError("entry schedule runs past the scenario duration");

    auto node_pos = [&](int i, int j) {
        return Position2D{area.x_min + i * cfg.block_size, area.y_min + j * cfg.block_size};
    };
    const int n_nodes = (nx + 1) * (ny + 1);
    auto node_of = [&](int idx) { return std::pair{idx % (nx + 1), idx / (nx + 1)}; };

    auto rng = substream(cfg.seed, Purpose::Scenario, 1);
    std::uniform_int_distribution<int> pick_node(0, n_nodes - 1);
    std::uniform_int_distribution<std::int64_t> pick_wait(1, cfg.max_queue_steps);
    std::bernoulli_distribution coin(0.5);

    // choke points at distinct intersections
    std::vector<char> choke(static_cast<std::size_t>(n_nodes), 0);
    {
        std::vector<int> nodes(static_cast<std::size_t>(n_nodes));
        for (int k = 0; k < n_nodes; ++k) nodes[static_cast<std::size_t>(k)] = k;
        std::shuffle(nodes.begin(), nodes.end(), rng);
        for (int k = 0; k < std::min(cfg.n_choke_points, n_nodes); ++k) choke[static_cast<std::size_t>(nodes[static_cast<std::size_t>(k)])] = 1;
    }

    // Manhattan leg between two intersections, x-first or y-first at random;
    // appends intersections after `from`.
    auto append_leg = [&](std::vector<int> &route, int from, int to) {
        auto [i0, j0] = node_of(from);
        auto [i1, j1] = node_of(to);
        bool x_first = coin(rng);
        auto step_x = [&](int &i, int j) {
            while (i != i1) {
                i += i1 > i ? 1 : -1;
                route.push_back(j * (nx + 1) + i);
            }
        };
        auto step_y = [&](int i, int &j) {
            while (j != j1) {
                j += j1 > j ? 1 : -1;
                route.push_back(j * (nx + 1) + i);
            }
        };
        int i = i0, j = j0;
        if (x_first) {
            step_x(i, j);
            step_y(i, j);
        } else {
            step_y(i, j);
            step_x(i, j);
        }
    };
    auto pick_other = [&](int from) {
        int to = pick_node(rng);
        while (to == from) to = pick_node(rng);
        return to;
    };
    auto build_path = [&](const std::vector<int> &route, std::vector<detail::Stop> &stops) {
        std::vector<Position2D> pts;
        for (int n : route) {
            auto [i, j] = node_of(n);
            pts.push_back(node_pos(i, j));
        }
        Polyline path(pts, false);
        double s = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
            s += distance(pts[k - 1], pts[k]);
            if (k + 1 < pts.size() && choke[static_cast<std::size_t>(route[k])]) stops.push_back({s, pick_wait(rng)});
        }
        return path;
    };

    std::vector<VehicleRecord> out;
    const double reach = cfg.speed * cfg.sample_time * static_cast<double>(cfg.duration);
    for (int v = 0; v < cfg.n_moving; ++v) {
        std::vector<int> route{pick_node(rng)};
        double len = 0.0;
        while (len <= reach) {
            int from = route.back();
            int to = pick_other(from);
            auto [i0, j0] = node_of(from);
            auto [i1, j1] = node_of(to);
            len += cfg.block_size * (std::abs(i1 - i0) + std::abs(j1 - j0));
            append_leg(route, from, to);
        }
        std::vector<detail::Stop> stops;
        Polyline path = build_path(route, stops);
        // start somewhere along the first block so initial positions spread along streets
        double start = std::uniform_real_distribution<double>(0.0, cfg.block_size)(rng);
        stops.erase(std::remove_if(stops.begin(), stops.end(), [&](const auto &st) { return st.s <= start; }),
                    stops.end());
        VehicleRecord rec;
        rec.id = v;
        rec.kind = MotionKind::Moving;
        rec.first_step = 0;
        rec.trajectory = detail::drive(path, start, cfg.speed, cfg.sample_time, cfg.duration, stops);
        out.push_back(std::move(rec));
    }
    for (int e = 0; e < cfg.n_entering; ++e) {
        int from = pick_node(rng);
        int to = pick_other(from);
        std::vector<int> route{from};
        append_leg(route, from, to);
        std::vector<detail::Stop> stops;
        Polyline path = build_path(route, stops);
        VehicleRecord rec;
        rec.id = cfg.n_moving + e;
        rec.kind = MotionKind::Moving;
        rec.first_step = e * cfg.entry_interval;
        rec.trajectory = detail::drive(path, 0.0, cfg.speed, cfg.sample_time, cfg.duration - rec.first_step, stops);
        out.push_back(std::move(rec));
    }

    // kerb slots on both sides of every street segment, clear of intersections
    std::vector<Position2D> slots;
    const double margin = cfg.parked_offset + 1.0;
    auto add_street = [&](Position2D a, Position2D b) {
        Offset2D d = b - a;
        double len = d.norm();
        Offset2D tan{d.dx / len, d.dy / len};
        Offset2D left{-tan.dy, tan.dx};
        for (double s = margin; s <= len - margin + 1e-9; s += cfg.parked_spacing) {
            Position2D c = a + s * tan;
            slots.push_back(c + cfg.parked_offset * left);
            slots.push_back(c - cfg.parked_offset * left);
        }
    };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) add_street(node_pos(i, j), node_pos(i + 1, j));
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) add_street(node_pos(i, j), node_pos(i, j + 1));
    if (static_cast<std::size_t>(cfg.n_parked) > slots.size())
        throw ConfigError("infeasible parking density: " + std::to_string(cfg.n_parked) + " cars for " +
                          std::to_string(slots.size()) + " kerb slots");
    std::shuffle(slots.begin(), slots.end(), rng);
    for (int p = 0; p < cfg.n_parked; ++p)
        out.push_back(detail::make_parked(cfg.n_moving + cfg.n_entering + p, slots[static_cast<std::size_t>(p)],
                                          cfg.duration));
    return out;
}

inline std::vector<VehicleRecord> generate(const ScenarioConfig &cfg)
{
    return cfg.kind == ScenarioKind::Circuit ? gen_circuit(cfg) : gen_town(cfg);
}

} // namespace parkcp

#endif
