#include <gtest/gtest.h>

#include <cmath>

#include "hadflow/resolvent.hpp"

using namespace hadflow;

namespace {

SpacePtr line() { return std::make_shared<EuclideanSpace>(1); }
SpacePtr plane() { return std::make_shared<EuclideanSpace>(2); }
SpacePtr tripod() {
    return std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

}  // namespace

TEST(Resolve, LinearDriftClosedForm) {
    LinearDrift f(line());
    const auto r = resolve(f, 0.0, make_point({0}), 0.1);
    EXPECT_EQ(r.method, "analytic");
    EXPECT_NEAR(r.point.coords()[0], 0.1, 1e-15);
    const auto n = resolve_numeric(f, 0.0, make_point({0}), 0.1);
    EXPECT_NEAR(n.point.coords()[0], 0.1, 1e-9);
}

TEST(Resolve, SumSquaredLineQuadratic) {
    SumSquaredDistances g(line(), {make_point({0}), make_point({2})});
    EXPECT_NEAR(resolve(g, 0, make_point({0}), 0.25).point.coords()[0], 1.0 / 3.0, 1e-14);
}

TEST(Resolve, DistanceClampsAtTarget) {
    DistanceToMovingSet f(MovingTarget::stationary(ConvexTarget(plane(), PointShape{make_point({0.05, 0})})));
    EXPECT_TRUE(approx_equal(resolve(f, 0, make_point({0, 0}), 0.1).point, make_point({0.05, 0}), 1e-15));
    EXPECT_TRUE(approx_equal(resolve(f, 0, make_point({1, 0}), 0.1).point, make_point({0.9, 0}), 1e-15));
}

TEST(Resolve, MinCoordinateReachesDiagonal) {
    MinFunctional f(std::make_shared<QuadrantSpace>(), false);
    const auto below = resolve(f, 0, make_point({1, 0}), 0.5).point;
    EXPECT_TRUE(approx_equal(below, make_point({1, 0.5}), 1e-12));
    const auto cross = resolve(f, 0, make_point({1, 0.9}), 0.5).point;
    // Energy minimum lands on the diagonal: u = (1 + 0.9 + 0.5) / 2.
    EXPECT_TRUE(approx_equal(cross, make_point({1.2, 1.2}), 1e-12));
}

TEST(Resolve, TreeSumSquaredMatchesNumeric) {
    const auto t = tripod();
    SumSquaredDistances g(t, {Point::tree(0, 1.0), Point::tree(1, 1.0), Point::tree(2, 0.5)});
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const Point x = t->sample_point(rng);
        const auto a = resolve(g, 0, x, 0.3);
        const auto n = resolve_numeric(g, 0, x, 0.3);
        EXPECT_LE(t->distance(a.point, n.point), 1e-8);
    }
}

TEST(Resolve, NumericOnTreeDistance) {
    const auto t = tripod();
    DistanceToMovingSet f(MovingTarget::stationary(ConvexTarget(t, PointShape{Point::tree(1, 1.0)})));
    const auto r = resolve_numeric(*f.without_closed_form(), 0, Point::tree(0, 1.0), 0.5);
    EXPECT_NEAR(t->distance(r.point, Point::tree(0, 0.5)), 0.0, 1e-8);
}

TEST(Resolve, StepAdmissibility) {
    auto sq = std::make_shared<SumSquaredDistances>(line(), std::vector<Point>{make_point({0})});
    auto drift = std::make_shared<LinearDrift>(line());
    EXPECT_THROW(check_resolvent_step(*drift, 0.0), StepSizeError);
    EXPECT_THROW(check_resolvent_step(*drift, -1.0), StepSizeError);
    EXPECT_NO_THROW(check_resolvent_step(*sq, 10.0));
}

TEST(Resolve, ContractionOnTree) {
    const auto t = tripod();
    SumSquaredDistances g(t, {Point::tree(0, 1.0), Point::tree(1, 1.0)});
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const auto c = resolvent_contraction_check(g, 0, t->sample_point(rng), t->sample_point(rng), 0.1);
        EXPECT_TRUE(c.holds) << c.ratio << " > " << c.bound;
        EXPECT_NEAR(c.bound, 1.0 / 1.2, 1e-8);
    }
}
