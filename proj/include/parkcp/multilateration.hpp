#ifndef PARKCP_MULTILATERATION_HPP
#define PARKCP_MULTILATERATION_HPP

#include "parkcp/error.hpp"
#include "parkcp/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace parkcp {

struct TrilaterationResult
{
    Position2D position;
    double residual = 0.0; // RMS of |x - a_k| - r_k over all anchors
};

/// Closed-form multilateration: subtract the first circle equation from the
/// others and solve the resulting linear system in the least-squares sense.
inline TrilaterationResult trilaterate(std::span<const Position2D> anchors, std::span<const double> ranges)
{
    if (anchors.size() != ranges.size()) throw std::invalid_argument("one range per anchor required");
    if (anchors.size() < 3) throw GeometryError("trilateration needs at least three anchors");

    const auto rows = static_cast<Eigen::Index>(anchors.size() - 1);
    Eigen::MatrixXd A(rows, 2);
    Eigen::VectorXd b(rows);
    const Position2D &a0 = anchors[0];
    const double k0 = a0.x * a0.x + a0.y * a0.y;
    for (Eigen::Index k = 0; k < rows; ++k) {
        const Position2D &ak = anchors[static_cast<std::size_t>(k + 1)];
        A(k, 0) = 2.0 * (ak.x - a0.x);
        A(k, 1) = 2.0 * (ak.y - a0.y);
        const double rk = ranges[static_cast<std::size_t>(k + 1)];
        b[k] = ranges[0] * ranges[0] - rk * rk + (ak.x * ak.x + ak.y * ak.y) - k0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    if (sv.size() < 2 || sv[1] <= 1e-9 * std::max(1.0, sv[0]))
        throw GeometryError("anchors are collinear; trilateration is rank deficient");
    const Eigen::Vector2d x = svd.solve(b);

    TrilaterationResult out{from_eigen(x), 0.0};
    double ss = 0.0;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        const double r = distance(out.position, anchors[k]) - ranges[k];
        ss += r * r;
    }
    out.residual = std::sqrt(ss / static_cast<double>(anchors.size()));
    return out;
}

inline TrilaterationResult trilaterate(const std::array<Position2D, 3> &anchors, const std::array<double, 3> &ranges)
{
    return trilaterate(std::span<const Position2D>(anchors), std::span<const double>(ranges));
}

/// Intersection of two range circles, picking the point closer to `prior`.
/// Circles that miss each other by at most `tolerance` (tangent or slightly
/// disjoint, as noisy ranges produce) yield the midpoint of their nearest
/// approach; a larger miss is an error.
inline Position2D bilaterate_with_prior(const Position2D &a1, double r1, const Position2D &a2, double r2,
                                        const Position2D &prior, double tolerance = 0.4)
{
    const Offset2D d = a2 - a1;
    const double D = d.norm();
    if (D < 1e-9) throw GeometryError("concentric circles have no unique intersection");
    const Offset2D u{d.dx / D, d.dy / D};
    const double along = (r1 * r1 - r2 * r2 + D * D) / (2.0 * D);
    const double h2 = r1 * r1 - along * along;
    if (h2 >= 0.0) {
        const double h = std::sqrt(h2);
        const Offset2D perp{-u.dy, u.dx};
        const Position2D foot = a1 + along * u;
        const Position2D p = foot + h * perp;
        const Position2D q = foot - h * perp;
        return distance(p, prior) <= distance(q, prior) ? p : q;
    }

    // Nearest approach along the centre line: circle 1 crosses it at s = +-r1,
    // circle 2 at s = D +- r2.
    double best_gap = std::numeric_limits<double>::infinity();
    double mid = 0.0;
    for (double s1 : {r1, -r1})
        for (double s2 : {D + r2, D - r2})
            if (std::abs(s1 - s2) < best_gap) {
                best_gap = std::abs(s1 - s2);
                mid = 0.5 * (s1 + s2);
            }
    if (best_gap > tolerance) throw GeometryError("range circles do not intersect");
    return a1 + mid * u;
}

/// Range-only dilution of precision sqrt(trace((H^T H)^-1)) at `at`, H rows
/// being unit vectors from each anchor. Infinite for degenerate geometry.
inline double range_dop(std::span<const Position2D> anchors, const Position2D &at)
{
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    for (const auto &a : anchors) {
        Eigen::Vector2d u = to_eigen(at) - to_eigen(a);
        const double n = u.norm();
        if (n < 1e-9) continue;
        u /= n;
        info += u * u.transpose();
    }
    const double det = info.determinant();
    if (!(det > 1e-12)) return std::numeric_limits<double>::infinity();
    return std::sqrt(info.inverse().trace());
}

} // namespace parkcp

#endif
