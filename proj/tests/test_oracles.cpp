#include <gtest/gtest.h>

#include <cmath>

#include "hadflow/oracles.hpp"
#include "hadflow/resolvent.hpp"

using namespace hadflow;

namespace {

SpacePtr line() { return std::make_shared<EuclideanSpace>(1); }

}  // namespace

TEST(Oracle, LinearDriftStep) {
    LinearDrift f(line());
    EXPECT_NEAR(oracle_resolve(f, 0, make_point({0}), 0.1, 1e-4).point.coords()[0], 0.1, 1e-4);
}

TEST(Oracle, SumSquaredStep) {
    SumSquaredDistances g(line(), {make_point({0}), make_point({2})});
    EXPECT_NEAR(oracle_resolve(g, 0, make_point({0}), 0.25, 1e-4).point.coords()[0], 1.0 / 3.0, 1e-4);
}

TEST(Oracle, DistanceClampsAtPoint) {
    const auto p = std::make_shared<EuclideanSpace>(2);
    DistanceToMovingSet f(MovingTarget::stationary(ConvexTarget(p, PointShape{make_point({0.05, 0})})));
    EXPECT_LE(p->distance(oracle_resolve(f, 0, make_point({0, 0}), 0.1, 1e-4).point, make_point({0.05, 0})), 1e-4);
}

TEST(Oracle, TreeScanFindsBranchVertex) {
    auto t = std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    SumSquaredDistances g(t, {Point::tree(0, 1.0), Point::tree(1, 1.0), Point::tree(2, 1.0)});
    const auto o = oracle_resolve(g, 0, Point::tree(0, 0.1), 0.5, 1e-3);
    EXPECT_LE(t->distance(o.point, resolve(g, 0, Point::tree(0, 0.1), 0.5).point), 1e-3);
}

TEST(Oracle, ExplicitRegionTooSmall) {
    LinearDrift f(line());
    EXPECT_THROW(oracle_resolve(f, 0, make_point({0}), 0.1, 1e-3, 0.01), RegionTooSmallError);
}

TEST(Oracle, ProductUnsupported) {
    auto p = std::make_shared<ProductSpace>(line(), line());
    SumSquaredDistances g(p, {Point(make_point({0}), make_point({0}))});
    EXPECT_THROW(oracle_resolve(g, 0, Point(make_point({1}), make_point({1})), 0.1, 1e-3), CapabilityError);
}

TEST(Oracle, LineTimesTripodSplitsIntoFactors) {
    auto tri = std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    auto p = std::make_shared<ProductSpace>(line(), tri);
    SumSquaredDistances g(p, {Point(make_point({0}), Point::tree(0, 0.5)), Point(make_point({2}), Point::tree(0, 0.5))});
    // Line factor as in the R^1 case, tree factor already at the anchors.
    const auto r = oracle_resolve(g, 0, Point(make_point({0}), Point::tree(0, 0.5)), 0.25, 1e-4);
    EXPECT_NEAR(r.point.left().coords()[0], 1.0 / 3.0, 1e-4);
    EXPECT_LE(tri->distance(r.point.right(), Point::tree(0, 0.5)), 1e-4);
}

TEST(ReferenceTrajectory, LinearDriftTruncation) {
    LinearDrift f(line());
    const double h = 1e-4;
    const auto traj = reference_trajectory(f, 0, make_point({0}), 1.0, h);
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, std::abs(s.x.coords()[0] - (s.t * s.t / 2 + s.t)));
    EXPECT_LE(worst, h * 1.0);
    EXPECT_THROW(reference_trajectory(f, 0, make_point({0}), 1.0, 1e-2), UsageError);
}

TEST(ConvergenceOrder, SyntheticSlopes) {
    std::vector<std::pair<double, double>> lin, half;
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
        lin.emplace_back(h, h);
        half.emplace_back(h, std::sqrt(h));
    }
    EXPECT_NEAR(convergence_order(lin), 1.0, 1e-6);
    EXPECT_NEAR(convergence_order(half), 0.5, 1e-6);
    EXPECT_THROW(convergence_order({{1e-1, 1.0}, {1e-2, 0.0}, {1e-3, 1.0}}), DataError);
    EXPECT_THROW(convergence_order({{1e-1, 1.0}, {1e-2, 0.5}}), DataError);
}
