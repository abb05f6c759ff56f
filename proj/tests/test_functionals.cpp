#include <gtest/gtest.h>

#include <cmath>

#include "hadflow/functionals.hpp"

using namespace hadflow;

namespace {

SpacePtr line() { return std::make_shared<EuclideanSpace>(1); }
SpacePtr quadrant() { return std::make_shared<QuadrantSpace>(); }
SpacePtr tripod() {
    return std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

}  // namespace

TEST(LinearDrift, GradientAndDerivative) {
    LinearDrift f(line());
    const Point x = make_point({0.3});
    const auto g = f.gradient(1.0, x);
    EXPECT_NEAR(norm(g), 2.0, 1e-15);
    const auto w = line()->log_direction(x, make_point({1.3}));
    EXPECT_NEAR(f.directional_derivative(1.0, x, w), -2.0, 1e-12);
    EXPECT_NEAR(numeric_directional_derivative(f, 1.0, x, w), -2.0, 1e-8);
    EXPECT_THROW(LinearDrift{quadrant()}, ValidationError);
}

TEST(MinCoordinate, GradientOnAndOffDiagonal) {
    MinFunctional f(quadrant(), false);
    EXPECT_TRUE(approx_equal(f.space().exp_step(f.gradient(0, make_point({1, 0}))), make_point({1, 1})));
    const auto diag = f.gradient(0, make_point({1, 1}));
    EXPECT_NEAR(norm(diag), std::sqrt(0.5), 1e-15);
    EXPECT_FALSE(f.has_singular_locus());
}

TEST(MovingMin, SingularLocus) {
    MinFunctional f(quadrant(), true);
    EXPECT_TRUE(f.singular(1.0, make_point({2, 1})));
    EXPECT_FALSE(f.singular(1.0, make_point({2, 0.5})));
    EXPECT_NEAR(f.locus_offset(0.0, make_point({2, 0.5})), -1.5, 1e-15);
}

TEST(SumSquared, GradientMatchesNumericDerivative) {
    const auto t = tripod();
    SumSquaredDistances g(t, {Point::tree(0, 1.0), Point::tree(1, 1.0), Point::tree(2, 1.0)});
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Point x = t->sample_point(rng);
        for (const auto& germ : dynamic_cast<const TreeSpace&>(*t).germs_at(x)) {
            const TangentVector w{x, germ, 1.0};
            EXPECT_NEAR(g.directional_derivative(0, x, w), numeric_directional_derivative(g, 0, x, w), 1e-6);
            const auto s = gradient_support_check(g, 0, x, w);
            EXPECT_GE(s.support_slack, -1e-6);
            EXPECT_LE(std::abs(s.self_gap), 1e-6);
        }
    }
    EXPECT_NEAR(norm(g.gradient(0, dynamic_cast<const TreeSpace&>(*t).vertex_point(0))), 0.0, 1e-12);
}

TEST(SumSquared, LambdaConvexityAndGradientPairs) {
    const auto t = tripod();
    SumSquaredDistances g(t, {Point::tree(0, 1.0), Point::tree(1, 0.4)});
    Rng rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Point x = t->sample_point(rng);
        const Point y = t->sample_point(rng);
        EXPECT_TRUE(lambda_convexity_check(g, 0, x, y, unit(rng)).holds);
        EXPECT_TRUE(gradient_pair_inequality_check(g, 0, x, y).holds);
    }
}

TEST(DistanceToTarget, GradientPointsAtFootpoint) {
    const auto p = std::make_shared<EuclideanSpace>(2);
    DistanceToMovingSet f(MovingTarget::stationary(ConvexTarget(p, PointShape{make_point({3, 4})})));
    const auto g = f.gradient(0, make_point({0, 0}));
    EXPECT_NEAR(norm(g), 1.0, 1e-15);
    EXPECT_TRUE(approx_equal(p->exp_step(g.scaled(5.0)), make_point({3, 4}), 1e-12));
    EXPECT_TRUE(norm(f.gradient(0, make_point({3, 4}))) == 0.0);
}

TEST(WeightedSum, ComposesConstants) {
    auto drift = std::make_shared<LinearDrift>(line());
    auto sq = std::make_shared<SumSquaredDistances>(line(), std::vector<Point>{make_point({0})});
    WeightedSum s({{2.0, drift}, {0.5, sq}});
    EXPECT_DOUBLE_EQ(s.lambda(), 1.0);
    EXPECT_DOUBLE_EQ(s.hoelder()->B, 2.0);
    EXPECT_NEAR(s.value(0, make_point({1})), -2.0 + 0.5, 1e-15);
    EXPECT_THROW(WeightedSum({{-1.0, drift}}), ValidationError);
}

TEST(Hoelder, LinearDriftRatioIsOne) {
    LinearDrift f(line());
    EXPECT_NEAR(hoelder_ratio(f, *f.hoelder(), make_point({0}), 0.0, 0.3), 1.0, 1e-12);
}

TEST(AbsoluteGradient, MatchesGradientNorm) {
    const auto p = std::make_shared<EuclideanSpace>(2);
    SumSquaredDistances g(p, {make_point({1, 0}), make_point({0, 1})});
    Rng rng(11);
    const Point x = make_point({2, 2});
    const double est = absolute_gradient_estimate(g, 0, x, 720, {1e-2, 5e-3, 2.5e-3}, rng);
    EXPECT_NEAR(est, norm(g.gradient(0, x)), 1e-3);
    EXPECT_THROW(absolute_gradient_estimate(g, 0, x, 10, {}, rng), UsageError);
}

TEST(FunctionalJson, ParsesCatalog) {
    EXPECT_EQ(functional_from_json(line(), Json{{"kind", "linear_drift"}})->kind(), "linear_drift");
    EXPECT_EQ(functional_from_json(quadrant(), Json{{"kind", "moving_min"}})->kind(), "moving_min");
    auto ws = functional_from_json(line(), Json::parse(R"({"kind":"weighted_sum","terms":[
        {"weight":1,"f":{"kind":"linear_drift"}},{"weight":1,"f":{"kind":"sum_squared","anchors":[[0],[2]]}}]})"));
    EXPECT_EQ(ws->kind(), "weighted_sum");
    EXPECT_THROW(functional_from_json(line(), Json{{"kind", "linear_drift"}, {"slope", 2}}), ValidationError);
    EXPECT_THROW(functional_from_json(line(), Json{{"kind", "cubic"}}), ValidationError);
}
