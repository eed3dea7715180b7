#ifndef PARKCP_EKF_HPP
#define PARKCP_EKF_HPP

#include "parkcp/error.hpp"
#include "parkcp/localize.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

namespace parkcp {

/// Position-only EKF driven by measured velocity. Q = sigma_q^2 I is additive
/// model noise, Gamma = sigma_gamma^2 I is velocity-input noise (scaled by T_s
/// through the motion model), R = sigma_r^2 I is ranging noise.
struct EkfParams
{
    double sigma_q = 2.0;
    double sigma_gamma = 0.5;
    double sigma_r = 0.2;
    double sample_time = 1.0;

    void validate() const
    {
        if (!(sigma_q > 0.0 && sigma_gamma > 0.0 && sigma_r > 0.0 && sample_time > 0.0))
            throw ConfigError("EKF parameters must be positive");
    }

    /// Per-axis variance added by one prediction.
    double process_variance() const
    {
        return sigma_q * sigma_q + sample_time * sample_time * sigma_gamma * sigma_gamma;
    }
};

struct EkfEstimate
{
    Position2D state;
    Eigen::Matrix2d covariance;
};

/// x' = x + T_s v, P' = P + (sigma_q^2 + T_s^2 sigma_gamma^2) I.
inline EkfEstimate ekf_predict(const Position2D &state, const Eigen::Matrix2d &P, const Velocity2D &v,
                               const EkfParams &params)
{
    if (!is_symmetric_psd(P)) throw std::domain_error("EKF covariance is not symmetric positive semidefinite");
    return {state + params.sample_time * v, P + params.process_variance() * Eigen::Matrix2d::Identity()};
}

/// Joint update over all selected ranges with h_j(x) = |x - x_j|. A neighbour
/// closer than 1e-6 m to the state has no usable Jacobian and is skipped.
/// R_jj = sigma_r^2 + shared_variance_j, so a neighbour's own uncertainty
/// weakens its range; with all shared variances zero R is sigma_r^2 I.
/// Uses the Joseph form and returns a symmetrised covariance.
inline EkfEstimate ekf_update(const Position2D &state, const Eigen::Matrix2d &P, const std::vector<Candidate> &selected,
                              const EkfParams &params)
{
    if (!is_symmetric_psd(P)) throw std::domain_error("EKF covariance is not symmetric positive semidefinite");
    const Eigen::Vector2d x = to_eigen(state);
    std::vector<const Candidate *> usable;
    for (const auto &c : selected)
        if (distance(state, c.shared_position) >= 1e-6) usable.push_back(&c);
    if (usable.empty()) return {state, P};

    const auto m = static_cast<Eigen::Index>(usable.size());
    Eigen::MatrixXd H(m, 2);
    Eigen::VectorXd innovation(m);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Vector2d d = x - to_eigen(usable[static_cast<std::size_t>(j)]->shared_position);
        const double predicted = d.norm();
        H.row(j) = d.transpose() / predicted;
        innovation[j] = usable[static_cast<std::size_t>(j)]->range.measured_distance - predicted;
        R(j, j) = params.sigma_r * params.sigma_r + usable[static_cast<std::size_t>(j)]->shared_variance;
    }
    const Eigen::MatrixXd S = H * P * H.transpose() + R;
    const Eigen::MatrixXd K = P * H.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::Vector2d x_new = x + K * innovation;
    const Eigen::Matrix2d IKH = Eigen::Matrix2d::Identity() - K * H;
    Eigen::Matrix2d P_new = IKH * P * IKH.transpose() + K * R * K.transpose();
    P_new = 0.5 * (P_new + P_new.transpose()).eval();
    return {from_eigen(x_new), P_new};
}

} // namespace parkcp

#endif
