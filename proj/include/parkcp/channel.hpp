#ifndef PARKCP_CHANNEL_HPP
#define PARKCP_CHANNEL_HPP

#include "parkcp/error.hpp"
#include "parkcp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace parkcp {

/// Zero-mean Gaussian noise levels. `sigma_velocity` perturbs the per-axis
/// speed readings used for dead reckoning; `drop_probability` is a per-link
/// Bernoulli loss hook, off by default.
struct NoiseModel
{
    double sigma_range = 0.2;
    double sigma_gps = 6.0;
    double sigma_velocity = 0.5;
    double drop_probability = 0.0;

    void validate() const
    {
        if (!(sigma_range >= 0.0) || !(sigma_gps >= 0.0) || !(sigma_velocity >= 0.0))
            throw ConfigError("noise standard deviations must be non-negative");
        if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
            throw ConfigError("drop_probability must lie in [0, 1]");
    }
};

/// Disk of V2V reachability around a vehicle.
struct CommZone
{
    double radius = 15.0;

    void validate() const
    {
        if (!(radius > 0.0)) throw ConfigError("communication radius must be positive");
    }
};

struct RangeMeasurement
{
    int from_id = 0;
    int to_id = 0;
    double measured_distance = 0.0;
    std::int64_t timestep = 0;
};

struct GpsMeasurement
{
    int id = 0;
    Position2D position;
    std::int64_t timestep = 0;
};

/// Ids j != id whose true position lies within the zone radius, Inactive nodes
/// excluded, ascending.
inline std::vector<int> neighbors(const WorldState &world, int id, const CommZone &zone)
{
    const auto &self = world.at(id);
    std::vector<int> out;
    for (const auto &[other, st] : world.vehicles) {
        if (other == id || st.node_class == NodeClass::Inactive) continue;
        if (distance(self.truth, st.truth) <= zone.radius) out.push_back(other);
    }
    return out;
}

/// max(0, d + e) with e ~ N(0, sigma_range^2).
template <class URBG>
double measure_range(double true_distance, const NoiseModel &noise, URBG &rng)
{
    if (noise.sigma_range == 0.0) return true_distance;
    std::normal_distribution<double> eps(0.0, noise.sigma_range);
    return std::max(0.0, true_distance + eps(rng));
}

template <class URBG>
GpsMeasurement measure_gps(const Position2D &true_pos, const NoiseModel &noise, URBG &rng, int id = 0,
                           std::int64_t timestep = 0)
{
    GpsMeasurement m{id, true_pos, timestep};
    if (noise.sigma_gps > 0.0) {
        std::normal_distribution<double> eps(0.0, noise.sigma_gps);
        m.position.x += eps(rng);
        m.position.y += eps(rng);
    }
    return m;
}

/// Noisy speed reading; stationary vehicles read exactly zero.
template <class URBG>
Velocity2D measure_velocity(const Velocity2D &truth, const NoiseModel &noise, URBG &rng)
{
    if (noise.sigma_velocity == 0.0 || (truth.vx == 0.0 && truth.vy == 0.0)) return truth;
    std::normal_distribution<double> eps(0.0, noise.sigma_velocity);
    double ex = eps(rng);
    double ey = eps(rng);
    return {truth.vx + ex, truth.vy + ey};
}

template <class URBG>
bool link_dropped(const NoiseModel &noise, URBG &rng)
{
    if (noise.drop_probability <= 0.0) return false;
    return std::bernoulli_distribution(noise.drop_probability)(rng);
}

/// Uniform bucket grid with cell size equal to the query radius, so a disk
/// query only scans the 3x3 block around the query point.
class NeighborGrid
{
public:
    explicit NeighborGrid(double radius) : cell_(radius)
    {
        if (!(radius > 0.0)) throw ConfigError("grid cell must be positive");
    }

    void clear() { buckets_.clear(); }

    void insert(int id, const Position2D &p) { buckets_[key(cell_of(p.x), cell_of(p.y))].push_back({id, p}); }

    /// Ids within `radius` of p (excluding `self`), ascending.
    std::vector<int> query(const Position2D &p, double radius, int self) const
    {
        std::vector<int> out;
        const auto cx = cell_of(p.x), cy = cell_of(p.y);
        const std::int64_t reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
        for (std::int64_t dx = -reach; dx <= reach; ++dx)
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                auto it = buckets_.find(key(cx + dx, cy + dy));
                if (it == buckets_.end()) continue;
                for (const auto &e : it->second)
                    if (e.id != self && distance(p, e.pos) <= radius) out.push_back(e.id);
            }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Number of entries within `radius` of p, saturating at `cap`.
    int count_within(const Position2D &p, double radius, int cap) const
    {
        int n = 0;
        const auto cx = cell_of(p.x), cy = cell_of(p.y);
        const std::int64_t reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
        for (std::int64_t dx = -reach; dx <= reach; ++dx)
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                auto it = buckets_.find(key(cx + dx, cy + dy));
                if (it == buckets_.end()) continue;
                for (const auto &e : it->second)
                    if (distance(p, e.pos) <= radius && ++n >= cap) return cap;
            }
        return n;
    }

private:
    struct Entry
    {
        int id;
        Position2D pos;
    };

    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy)
    {
        return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
    }

    double cell_;
    std::unordered_map<std::uint64_t, std::vector<Entry>> buckets_;
};

} // namespace parkcp

#endif
