#ifndef PARKCP_POLICY_HPP
#define PARKCP_POLICY_HPP

#include "parkcp/channel.hpp"
#include "parkcp/error.hpp"
#include "parkcp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace parkcp {

/// Traditional: no stationary anchors; parked cars are off the network and
/// nobody ever reaches anchor or pseudo-anchor status. Proposed: stationary
/// vehicles serve as prioritised anchors.
enum class Mode { Traditional, Proposed };

struct PolicyConfig
{
    double anchor_accuracy_threshold = 1.0; // meters
    int gnss_window = 60;                   // steps of GNSS averaging before a stationary car trusts itself
    int gps_reset_interval = 10;            // isolated steps before a fresh GPS fix replaces the estimate
    Mode mode = Mode::Proposed;
    bool anchors_preloaded = true;          // parked cars start as anchors (Proposed mode)

    void validate() const
    {
        if (!(anchor_accuracy_threshold > 0.0)) throw ConfigError("anchor_accuracy_threshold must be positive");
        if (gnss_window < 1) throw ConfigError("gnss_window must be positive");
        if (gps_reset_interval < 1) throw ConfigError("gps_reset_interval must be positive");
    }
};

/// A neighbour as seen by the vehicle being localised.
struct Candidate
{
    int id = 0;
    NodeClass node_class = NodeClass::Blind;
    Position2D shared_position; // truth for anchors, broadcast estimate otherwise
    RangeMeasurement range;
    double shared_variance = 0.0; // per-axis variance of shared_position; 0 for anchors
};

/// 1 = anchor (highest), 2 = pseudo-anchor, 3 = blind.
inline int priority(NodeClass c)
{
    switch (c) {
    case NodeClass::Anchor: return 1;
    case NodeClass::PseudoAnchor: return 2;
    case NodeClass::Blind: return 3;
    case NodeClass::Inactive: break;
    }
    throw std::domain_error("inactive nodes have no priority");
}

/// The k best candidates under (priority, measured distance, id), in that order.
inline std::vector<Candidate> select_neighbors(std::vector<Candidate> candidates, std::size_t k = 3)
{
    auto key = [](const Candidate &c) { return std::tuple(priority(c.node_class), c.range.measured_distance, c.id); };
    auto less = [&](const Candidate &a, const Candidate &b) { return key(a) < key(b); };
    if (candidates.size() > k) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                          less);
        candidates.resize(k);
    } else {
        std::sort(candidates.begin(), candidates.end(), less);
    }
    return candidates;
}

/// Per-axis standard deviation of the mean of n independent GPS fixes.
inline double gnss_average_error(double sigma_gps, int n)
{
    return n > 0 ? sigma_gps / std::sqrt(static_cast<double>(n)) : std::numeric_limits<double>::infinity();
}

/// Class of a stationary vehicle given what it currently knows about its own
/// accuracy. `cp_error` is the error estimate of a range-based fix and only
/// counts with at least two anchors in range (two anchors need the prior to
/// break the mirror ambiguity). GNSS averaging counts once `gnss_steps` reaches
/// the window. Until precise, parked cars stay Inactive and queued cars Blind.
inline NodeClass classify_stationary(MotionKind kind, int anchors_in_range, int gnss_steps,
                                     std::optional<double> cp_error, double sigma_gps, const PolicyConfig &cfg)
{
    if (kind == MotionKind::Moving) throw std::domain_error("classify_stationary called on a moving vehicle");
    double best = std::numeric_limits<double>::infinity();
    if (cp_error && anchors_in_range >= 2) best = *cp_error;
    if (gnss_steps >= cfg.gnss_window) best = std::min(best, gnss_average_error(sigma_gps, gnss_steps));
    if (best <= cfg.anchor_accuracy_threshold) return NodeClass::Anchor;
    return kind == MotionKind::Parked ? NodeClass::Inactive : NodeClass::Blind;
}

/// Moving vehicles are never anchors; three anchors in the latest update make a
/// pseudo-anchor.
inline NodeClass classify_moving(int used_anchor_count)
{
    return used_anchor_count >= 3 ? NodeClass::PseudoAnchor : NodeClass::Blind;
}

inline Position2D dead_reckon(const Position2D &prev_estimate, const Velocity2D &v, double sample_time)
{
    return prev_estimate + sample_time * v;
}

} // namespace parkcp

#endif
