#ifndef PARKCP_GCPSO_HPP
#define PARKCP_GCPSO_HPP

#include "parkcp/error.hpp"
#include "parkcp/localize.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace parkcp {

/// Guaranteed Convergence PSO settings. Defaults are the cooperative
/// positioning setup: 4 particles, 20 iterations, s_c = 15, f_c = 5, rho = 1,
/// c1 = c2 = 2, inertia 0.9 -> 0.2, stop at fitness 0.
struct GcpsoParams
{
    int n_particles = 4;
    int n_iterations = 20;
    int success_threshold = 15; // s_c
    int failure_threshold = 5;  // f_c
    double rho0 = 1.0;
    double c1 = 2.0;
    double c2 = 2.0;
    double w_start = 0.9;
    double w_end = 0.2;
    double fitness_stop = 0.0;

    void validate() const
    {
        if (n_particles < 1 || n_iterations < 1 || success_threshold < 1 || failure_threshold < 1)
            throw ConfigError("GCPSO counts must be at least 1");
        if (!(w_start >= w_end && w_end >= 0.0)) throw ConfigError("GCPSO inertia must satisfy w_start >= w_end >= 0");
        if (!(rho0 > 0.0)) throw ConfigError("GCPSO rho0 must be positive");
    }
};

/// Search radius of the global-best particle. Doubles after s_c consecutive
/// improvements of the global best, halves after f_c consecutive stalls; the
/// streak restarts after each adaptation.
class RhoController
{
public:
    RhoController(double rho0, int success_threshold, int failure_threshold)
        : rho_(rho0), success_threshold_(success_threshold), failure_threshold_(failure_threshold)
    {}

    void record(bool improved)
    {
        if (improved) {
            failures_ = 0;
            if (++successes_ >= success_threshold_) {
                rho_ *= 2.0;
                successes_ = 0;
            }
        } else {
            successes_ = 0;
            if (++failures_ >= failure_threshold_) {
                rho_ *= 0.5;
                failures_ = 0;
            }
        }
    }

    double rho() const { return rho_; }
    int successes() const { return successes_; }
    int failures() const { return failures_; }

private:
    double rho_;
    int success_threshold_;
    int failure_threshold_;
    int successes_ = 0;
    int failures_ = 0;
};

template <int Dim>
struct GcpsoResult
{
    Eigen::Matrix<double, Dim, 1> position;
    double fitness = 0.0;
    int iterations = 0;          // sweeps actually run
    std::vector<double> history; // global-best fitness: initial swarm, then after each sweep
    double final_rho = 0.0;
};

/// Minimises `f` with GCPSO from the given initial particle positions (zero
/// initial velocities). Non-best particles follow the inertia-weighted PSO
/// update; the global-best particle instead samples a box of half-width rho
/// around the global best, so the swarm cannot stagnate.
template <int Dim, class Objective, class URBG>
GcpsoResult<Dim> gcpso_minimize(Objective &&f, std::span<const Eigen::Matrix<double, Dim, 1>> initial,
                                const GcpsoParams &params, URBG &rng)
{
    using Vec = Eigen::Matrix<double, Dim, 1>;
    params.validate();
    if (initial.empty()) throw std::invalid_argument("GCPSO needs at least one particle");

    const std::size_t n = initial.size();
    std::vector<Vec> x(initial.begin(), initial.end());
    std::vector<Vec> v(n, Vec::Zero());
    std::vector<Vec> best_x = x;
    std::vector<double> best_f(n);
    std::size_t g = 0;
    for (std::size_t i = 0; i < n; ++i) {
        best_f[i] = f(x[i]);
        if (best_f[i] < best_f[g]) g = i;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RhoController rho(params.rho0, params.success_threshold, params.failure_threshold);
    GcpsoResult<Dim> out;
    out.history.push_back(best_f[g]);

    for (int k = 0; k < params.n_iterations && best_f[g] > params.fitness_stop; ++k) {
        const double w = params.n_iterations > 1
                             ? params.w_start - (params.w_start - params.w_end) * k / (params.n_iterations - 1)
                             : params.w_start;
        const Vec gbest = best_x[g];
        const double gbest_f = best_f[g];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == g) {
                Vec jitter;
                for (int d = 0; d < Dim; ++d) jitter[d] = rho.rho() * (1.0 - 2.0 * unit(rng));
                v[i] = -x[i] + gbest + w * v[i] + jitter;
            } else {
                Vec r1, r2;
                for (int d = 0; d < Dim; ++d) {
                    r1[d] = unit(rng);
                    r2[d] = unit(rng);
                }
                v[i] = w * v[i] + params.c1 * r1.cwiseProduct(best_x[i] - x[i]) +
                       params.c2 * r2.cwiseProduct(gbest - x[i]);
            }
            x[i] += v[i];
            double fi = f(x[i]);
            if (fi < best_f[i]) {
                best_f[i] = fi;
                best_x[i] = x[i];
            }
        }
        std::size_t new_g = g;
        for (std::size_t i = 0; i < n; ++i)
            if (best_f[i] < best_f[new_g]) new_g = i;
        g = new_g;
        rho.record(best_f[g] < gbest_f);
        out.history.push_back(best_f[g]);
        out.iterations = k + 1;
    }
    out.position = best_x[g];
    out.fitness = best_f[g];
    out.final_rho = rho.rho();
    return out;
}

struct LocalizationEstimate
{
    Position2D estimate;
    double fitness = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

/// Cooperative positioning by GCPSO on `cost`. Half the swarm starts on the
/// highest-priority selected neighbour, the rest on the dead-reckoned prior.
template <class URBG>
LocalizationEstimate gcpso_localize(const LocalizationProblem &prob, const GcpsoParams &params, URBG &rng)
{
    using Vec = Eigen::Vector2d;
    std::vector<Vec> init;
    const auto n = static_cast<std::size_t>(params.n_particles);
    const Vec at_prior = to_eigen(prob.prior);
    const Vec at_neighbour = prob.selected.empty() ? at_prior : to_eigen(prob.selected.front().shared_position);
    for (std::size_t i = 0; i < n; ++i) init.push_back(i < n / 2 ? at_neighbour : at_prior);

    auto objective = [&](const Vec &p) { return cost(from_eigen(p), prob); };
    auto res = gcpso_minimize<2>(objective, std::span<const Vec>(init), params, rng);
    return {from_eigen(res.position), res.fitness, res.iterations, std::move(res.history)};
}

} // namespace parkcp

#endif
