#ifndef PARKCP_LOCALIZE_HPP
#define PARKCP_LOCALIZE_HPP

#include "parkcp/model.hpp"
#include "parkcp/policy.hpp"

#include <vector>

namespace parkcp {

/// Everything one cooperative-positioning update sees for a single vehicle.
/// `prior` is the dead-reckoned position: previous estimate + T_s * velocity.
struct LocalizationProblem
{
    std::vector<Candidate> selected; // at most three, from select_neighbors
    Position2D prior;
    Velocity2D velocity;
    double sample_time = 1.0;
};

/// Range misfit to every selected neighbour plus squared distance from the
/// dead-reckoned prior.
inline double cost(const Position2D &candidate, const LocalizationProblem &prob)
{
    double sum = 0.0;
    for (const auto &c : prob.selected) {
        double r = c.range.measured_distance - distance(candidate, c.shared_position);
        sum += r * r;
    }
    auto d = candidate - prob.prior;
    return sum + d.dx * d.dx + d.dy * d.dy;
}

} // namespace parkcp

#include "parkcp/ekf.hpp"
#include "parkcp/gcpso.hpp"
#include "parkcp/multilateration.hpp"

#endif
