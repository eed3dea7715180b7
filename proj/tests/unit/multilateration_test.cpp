#include "parkcp/localize.hpp"
#include "parkcp/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace parkcp;

TEST(Trilaterate, ThreeFourExample)
{
    auto r = trilaterate({Position2D{0, 0}, {4, 0}, {0, 3}}, {5.0, std::sqrt(17.0), std::sqrt(10.0)});
    EXPECT_NEAR(r.position.x, 3.0, 1e-12);
    EXPECT_NEAR(r.position.y, 4.0, 1e-12);
    EXPECT_LT(r.residual, 1e-9);
}

TEST(Trilaterate, ZeroRangePinsToAnchor)
{
    const Position2D a{7, -2}, b{20, 5}, c{-4, 11};
    auto r = trilaterate({a, b, c}, {0.0, distance(a, b), distance(a, c)});
    EXPECT_NEAR(distance(r.position, a), 0.0, 1e-9);
}

TEST(Trilaterate, CollinearIsGeometryError)
{
    EXPECT_THROW(trilaterate({Position2D{0, 0}, {1, 1}, {2, 2}}, {1.0, 1.0, 1.0}), GeometryError);
    std::vector<Position2D> two{{0, 0}, {1, 0}};
    std::vector<double> r{1, 1};
    EXPECT_THROW(trilaterate(two, r), GeometryError);
}

TEST(Trilaterate, OverdeterminedLeastSquares)
{
    std::vector<Position2D> a{{0, 0}, {30, 0}, {0, 30}, {30, 30}};
    std::vector<double> r;
    for (const auto &p : a) r.push_back(distance(p, {12, 17}));
    auto out = trilaterate(a, r);
    EXPECT_NEAR(out.position.x, 12.0, 1e-9);
    EXPECT_NEAR(out.position.y, 17.0, 1e-9);
}

TEST(Trilaterate, TranslationEquivariant)
{
    SplitMix64 rng(4);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<Position2D, 3> a{{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}};
        const Position2D target{u(rng), u(rng)};
        std::array<double, 3> r{distance(a[0], target), distance(a[1], target), distance(a[2], target)};
        const Offset2D t{u(rng), u(rng)};
        std::array<Position2D, 3> shifted{{a[0] + t, a[1] + t, a[2] + t}};
        try {
            auto p = trilaterate(a, r).position;
            auto q = trilaterate(shifted, r).position;
            EXPECT_NEAR(distance(p + t, q), 0.0, 1e-6);
        } catch (const GeometryError &) {
        }
    }
}

// Intersections (4, +-3) from tests/oracles/oracles.py (circle_intersections).
TEST(Bilaterate, PicksIntersectionNearPrior)
{
    auto up = bilaterate_with_prior({0, 0}, 5, {8, 0}, 5, {4, 10});
    EXPECT_NEAR(up.x, 4.0, 1e-12);
    EXPECT_NEAR(up.y, 3.0, 1e-12);
    auto down = bilaterate_with_prior({0, 0}, 5, {8, 0}, 5, {4, -10});
    EXPECT_NEAR(down.x, 4.0, 1e-12);
    EXPECT_NEAR(down.y, -3.0, 1e-12);
}

TEST(Bilaterate, NearMissUsesMidpoint)
{
    // circles of radius 3.9 centred 8 apart miss by 0.2
    auto p = bilaterate_with_prior({0, 0}, 3.9, {8, 0}, 3.9, {4, 1});
    EXPECT_NEAR(p.x, 4.0, 1e-12);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
    EXPECT_THROW(bilaterate_with_prior({0, 0}, 3.0, {8, 0}, 3.0, {4, 1}), GeometryError);
}

TEST(Bilaterate, ConcentricIsGeometryError)
{
    EXPECT_THROW(bilaterate_with_prior({1, 1}, 2, {1, 1}, 3, {0, 0}), GeometryError);
}

TEST(RangeDop, OrthogonalAndDegenerate)
{
    std::vector<Position2D> ortho{{10, 0}, {0, 10}};
    EXPECT_NEAR(range_dop(ortho, {0, 0}), std::sqrt(2.0), 1e-12);
    std::vector<Position2D> line{{10, 0}, {20, 0}};
    EXPECT_TRUE(std::isinf(range_dop(line, {0, 0})));
}
