#ifndef PARKCP_MODEL_HPP
#define PARKCP_MODEL_HPP

#include "parkcp/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parkcp {

/// Planar position in a local tangent frame, meters.
struct Position2D
{
    double x = 0.0;
    double y = 0.0;

    bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }

    friend bool operator==(const Position2D &, const Position2D &) = default;
};

/// Planar velocity, meters/second.
struct Velocity2D
{
    double vx = 0.0;
    double vy = 0.0;

    double speed() const { return std::hypot(vx, vy); }
    bool is_finite() const { return std::isfinite(vx) && std::isfinite(vy); }

    friend bool operator==(const Velocity2D &, const Velocity2D &) = default;
};

/// Displacement between two positions.
struct Offset2D
{
    double dx = 0.0;
    double dy = 0.0;

    double norm() const { return std::hypot(dx, dy); }
};

inline Offset2D operator-(const Position2D &a, const Position2D &b) { return {a.x - b.x, a.y - b.y}; }
inline Position2D operator+(const Position2D &p, const Offset2D &d) { return {p.x + d.dx, p.y + d.dy}; }
inline Position2D operator-(const Position2D &p, const Offset2D &d) { return {p.x - d.dx, p.y - d.dy}; }
inline Offset2D operator*(double s, const Offset2D &d) { return {s * d.dx, s * d.dy}; }
inline Offset2D operator+(const Offset2D &a, const Offset2D &b) { return {a.dx + b.dx, a.dy + b.dy}; }
inline Offset2D operator*(double dt, const Velocity2D &v) { return {dt * v.vx, dt * v.vy}; }

inline double distance(const Position2D &a, const Position2D &b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline Eigen::Vector2d to_eigen(const Position2D &p) { return {p.x, p.y}; }
inline Position2D from_eigen(const Eigen::Vector2d &v) { return {v.x(), v.y()}; }

enum class NodeClass : std::uint8_t { Anchor, PseudoAnchor, Blind, Inactive };

enum class MotionKind : std::uint8_t { Moving, QueuedStationary, Parked };

inline std::string_view to_string(NodeClass c)
{
    switch (c) {
    case NodeClass::Anchor: return "anchor";
    case NodeClass::PseudoAnchor: return "pseudo-anchor";
    case NodeClass::Blind: return "blind";
    case NodeClass::Inactive: return "inactive";
    }
    return "?";
}

/// Trace spelling of a motion kind: `moving`, `queued`, `parked`.
inline std::string_view to_string(MotionKind k)
{
    switch (k) {
    case MotionKind::Moving: return "moving";
    case MotionKind::QueuedStationary: return "queued";
    case MotionKind::Parked: return "parked";
    }
    return "?";
}

inline std::optional<MotionKind> motion_kind_from_string(std::string_view s)
{
    if (s == "moving") return MotionKind::Moving;
    if (s == "queued") return MotionKind::QueuedStationary;
    if (s == "parked") return MotionKind::Parked;
    return std::nullopt;
}

/// One trajectory sample. The motion kind is per sample because a moving
/// vehicle can spend a stretch of its life queued.
struct TrajectorySample
{
    Position2D position;
    Velocity2D velocity;
    MotionKind kind = MotionKind::Moving;

    friend bool operator==(const TrajectorySample &, const TrajectorySample &) = default;
};

/// A vehicle and its ground-truth trajectory over a contiguous window of steps
/// starting at `first_step`.
struct VehicleRecord
{
    int id = 0;
    MotionKind kind = MotionKind::Moving; // Parked, or Moving for anything that ever moves or queues
    std::int64_t first_step = 0;
    std::vector<TrajectorySample> trajectory;

    std::int64_t last_step() const { return first_step + static_cast<std::int64_t>(trajectory.size()) - 1; }
    bool active_at(std::int64_t t) const { return t >= first_step && t <= last_step(); }
    const TrajectorySample &at(std::int64_t t) const { return trajectory.at(static_cast<std::size_t>(t - first_step)); }

    friend bool operator==(const VehicleRecord &, const VehicleRecord &) = default;
};

/// Largest violation of p(t+1) = p(t) + T_s * v(t) along the trajectory.
inline double max_integration_error(const VehicleRecord &rec, double sample_time)
{
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < rec.trajectory.size(); ++k) {
        const auto &cur = rec.trajectory[k];
        const auto predicted = cur.position + sample_time * cur.velocity;
        worst = std::max(worst, distance(predicted, rec.trajectory[k + 1].position));
    }
    return worst;
}

struct VehicleState
{
    Position2D truth;
    Velocity2D velocity;
    NodeClass node_class = NodeClass::Blind;
    Position2D estimate;
    std::optional<Eigen::Matrix2d> covariance;
};

/// Snapshot of every active vehicle at one step.
struct WorldState
{
    std::int64_t time = 0;
    std::map<int, VehicleState> vehicles;

    const VehicleState &at(int id) const
    {
        auto it = vehicles.find(id);
        if (it == vehicles.end()) throw std::out_of_range("unknown vehicle id " + std::to_string(id));
        return it->second;
    }
};

/// Symmetric with all eigenvalues above -tol.
inline bool is_symmetric_psd(const Eigen::Matrix2d &m, double tol = 1e-9)
{
    if (!m.allFinite()) return false;
    if (std::abs(m(0, 1) - m(1, 0)) > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    return es.eigenvalues().minCoeff() >= -tol;
}

} // namespace parkcp

#endif
