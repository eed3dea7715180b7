#include "parkcp/localize.hpp"
#include "parkcp/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace parkcp;

namespace {

std::vector<Candidate> noiseless(const std::vector<Position2D> &anchors, const Position2D &target)
{
    std::vector<Candidate> out;
    int id = 1;
    for (const auto &a : anchors) {
        out.push_back({id, NodeClass::Anchor, a, {0, id, distance(a, target), 0}});
        ++id;
    }
    return out;
}

} // namespace

TEST(Cost, ExactFitIsZero)
{
    LocalizationProblem p{noiseless({{0, 0}, {40, 0}, {0, 30}}, {10, 10}), {10, 10}, {}, 1.0};
    EXPECT_NEAR(cost({10, 10}, p), 0.0, 1e-24);
}

TEST(Cost, EmptySetIsPriorTerm)
{
    LocalizationProblem p{{}, {1, 2}, {}, 1.0};
    EXPECT_DOUBLE_EQ(cost({4, 6}, p), 25.0);
}

TEST(Cost, SingleNeighbourArithmetic)
{
    LocalizationProblem p{{{1, NodeClass::Blind, {0, 0}, {0, 1, 2.0, 0}}}, {1, 0}, {}, 1.0};
    EXPECT_DOUBLE_EQ(cost({1, 0}, p), 1.0);
}

TEST(Cost, PermutationInvariant)
{
    auto sel = noiseless({{0, 0}, {40, 0}, {0, 30}}, {10, 10});
    sel[0].range.measured_distance += 0.7;
    LocalizationProblem a{sel, {9, 11}, {}, 1.0};
    LocalizationProblem b{{sel[2], sel[0], sel[1]}, {9, 11}, {}, 1.0};
    EXPECT_DOUBLE_EQ(cost({8.5, 12.25}, a), cost({8.5, 12.25}, b));
}

TEST(Gcpso, LocalisesAgainstTrilaterationOracle)
{
    // trilaterate oracle gives exactly (10, 10), see tests/oracles/oracles.py
    LocalizationProblem p{noiseless({{0, 0}, {40, 0}, {0, 30}}, {10, 10}), {10, 10}, {}, 1.0};
    SplitMix64 rng(1);
    auto est = gcpso_localize(p, GcpsoParams{}, rng);
    EXPECT_LE(distance(est.estimate, {10, 10}), 0.5);
    EXPECT_EQ(est.fitness, 0.0);
    EXPECT_EQ(est.iterations, 0); // the prior particles already sit on the zero-cost point
}

TEST(Gcpso, NoNeighboursReturnsPrior)
{
    LocalizationProblem p{{}, {3.5, -2}, {}, 1.0};
    SplitMix64 rng(2);
    auto est = gcpso_localize(p, GcpsoParams{}, rng);
    EXPECT_EQ(est.estimate, (Position2D{3.5, -2}));
    EXPECT_EQ(est.fitness, 0.0);
}

TEST(Gcpso, ImprovesOnOffsetPrior)
{
    auto sel = noiseless({{0, 0}, {40, 0}, {0, 30}}, {10, 10});
    LocalizationProblem p{sel, {13, 7}, {}, 1.0};
    SplitMix64 rng(3);
    auto est = gcpso_localize(p, GcpsoParams{}, rng);
    EXPECT_LT(est.fitness, cost({13, 7}, p));
    EXPECT_LT(distance(est.estimate, {10, 10}), distance({13, 7}, {10, 10}));
}

TEST(Gcpso, HistoryMonotoneOnRandomSeeds)
{
    auto sel = noiseless({{0, 0}, {12, 3}, {4, 14}}, {6, 6});
    sel[1].range.measured_distance += 1.3;
    LocalizationProblem p{sel, {2, 9}, {}, 1.0};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed);
        auto est = gcpso_localize(p, GcpsoParams{}, rng);
        ASSERT_EQ(est.history.size(), static_cast<std::size_t>(est.iterations) + 1);
        for (std::size_t k = 1; k < est.history.size(); ++k) ASSERT_LE(est.history[k], est.history[k - 1]);
        EXPECT_DOUBLE_EQ(est.history.back(), est.fitness);
    }
}

TEST(Gcpso, SameSeedSameResult)
{
    auto sel = noiseless({{0, 0}, {12, 3}, {4, 14}}, {6, 6});
    LocalizationProblem p{sel, {2, 9}, {}, 1.0};
    SplitMix64 a(9), b(9);
    auto x = gcpso_localize(p, GcpsoParams{}, a);
    auto y = gcpso_localize(p, GcpsoParams{}, b);
    EXPECT_EQ(x.estimate, y.estimate);
    EXPECT_EQ(x.history, y.history);
}

TEST(Gcpso, MinimisesSphere)
{
    using V = Eigen::Matrix<double, 3, 1>;
    GcpsoParams params;
    params.n_particles = 10;
    params.n_iterations = 200;
    params.fitness_stop = 1e-12;
    std::vector<V> init;
    SplitMix64 rng(4);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 10; ++i) init.push_back(V(u(rng), u(rng), u(rng)));
    auto res = gcpso_minimize<3>([](const V &x) { return x.squaredNorm(); }, std::span<const V>(init), params, rng);
    EXPECT_LT(res.fitness, 1e-6);
}

TEST(RhoController, DoublesAfterSuccessThreshold)
{
    RhoController rho(1.0, 15, 5);
    for (int i = 0; i < 14; ++i) rho.record(true);
    EXPECT_EQ(rho.rho(), 1.0);
    rho.record(true);
    EXPECT_EQ(rho.rho(), 2.0);
    EXPECT_EQ(rho.successes(), 0);
}

TEST(RhoController, HalvesAfterFailureThreshold)
{
    RhoController rho(1.0, 15, 5);
    for (int i = 0; i < 4; ++i) rho.record(false);
    EXPECT_EQ(rho.rho(), 1.0);
    rho.record(false);
    EXPECT_EQ(rho.rho(), 0.5);
}

TEST(RhoController, MixedStreaksReset)
{
    RhoController rho(1.0, 15, 5);
    for (int i = 0; i < 4; ++i) rho.record(false);
    rho.record(true);
    EXPECT_EQ(rho.failures(), 0);
    for (int i = 0; i < 4; ++i) rho.record(false);
    EXPECT_EQ(rho.rho(), 1.0);
    for (int i = 0; i < 10; ++i) rho.record(false);
    EXPECT_EQ(rho.rho(), 0.25);
}

TEST(GcpsoParams, Validation)
{
    GcpsoParams p;
    p.n_particles = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.w_end = 1.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.rho0 = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
}
