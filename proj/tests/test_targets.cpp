#include <gtest/gtest.h>

#include <cmath>

#include "hadflow/targets.hpp"

using namespace hadflow;

namespace {

SpacePtr plane() { return std::make_shared<EuclideanSpace>(2); }

SpacePtr tripod() {
    return std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

}  // namespace

TEST(ConvexTarget, SegmentFootpointClamps) {
    ConvexTarget seg(plane(), SegmentShape{make_point({0, 0}), make_point({2, 0})});
    EXPECT_TRUE(approx_equal(seg.footpoint(make_point({1, 3})), make_point({1, 0})));
    EXPECT_TRUE(approx_equal(seg.footpoint(make_point({-1, 1})), make_point({0, 0})));
    EXPECT_DOUBLE_EQ(seg.distance_to(make_point({3, 0})), 1.0);
}

TEST(ConvexTarget, BallFootpointIsRadial) {
    ConvexTarget ball(plane(), BallShape{make_point({0, 0}), 1.0});
    EXPECT_TRUE(approx_equal(ball.footpoint(make_point({3, 4})), make_point({0.6, 0.8})));
    EXPECT_TRUE(ball.contains(make_point({0.5, 0.5})));
    EXPECT_THROW(ConvexTarget(plane(), BallShape{make_point({0, 0}), -1.0}), ValidationError);
}

TEST(ConvexTarget, SubtreeFootpointAndConnectivity) {
    const auto t = tripod();
    ConvexTarget sub(t, SubtreeShape{{{0, 0.0, 0.5}, {1, 0.0, 0.25}}});
    EXPECT_NEAR(sub.distance_to(Point::tree(2, 1.0)), 1.0, 1e-15);
    EXPECT_NEAR(sub.distance_to(Point::tree(0, 0.75)), 0.25, 1e-15);
    EXPECT_THROW(ConvexTarget(t, SubtreeShape{{{0, 0.6, 0.8}, {1, 0.5, 0.9}}}), ValidationError);
    EXPECT_THROW(ConvexTarget(plane(), SubtreeShape{{{0, 0.0, 0.5}}}), ValidationError);
}

TEST(Hausdorff, ClosedFormsAndExtremePoints) {
    const auto p = plane();
    ConvexTarget a(p, BallShape{make_point({0, 0}), 1.0});
    ConvexTarget b(p, BallShape{make_point({3, 0}), 2.0});
    EXPECT_NEAR(hausdorff(a, b).value, 4.0, 1e-12);
    ConvexTarget s1(p, SegmentShape{make_point({0, 0}), make_point({1, 0})});
    ConvexTarget s2(p, SegmentShape{make_point({0, 1}), make_point({1, 2})});
    const auto h = hausdorff(s1, s2);
    EXPECT_TRUE(h.exact);
    EXPECT_NEAR(h.value, 2.0, 1e-12);
}

TEST(MovingTarget, KeyframesInterpolateAndHold) {
    const auto p = plane();
    auto m = MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}}, {2.0, PointShape{make_point({2, 0})}}});
    EXPECT_NEAR(m.distance(1.0, make_point({1, 1})), 1.0, 1e-12);
    EXPECT_NEAR(m.distance(5.0, make_point({2, 0})), 0.0, 1e-12);
    EXPECT_NEAR(m.distance(-1.0, make_point({0, 0})), 0.0, 1e-12);
}

TEST(MovingTarget, ContractDetectsFastTarget) {
    const auto p = plane();
    auto slow = MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}}, {1.0, PointShape{make_point({1, 0})}}});
    auto fast = MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}}, {1.0, PointShape{make_point({2, 0})}}});
    EXPECT_TRUE(motion_contract_check(slow, 0.0, 0.5).holds);
    EXPECT_FALSE(motion_contract_check(fast, 0.0, 0.5).holds);
}

TEST(TargetJson, ParsesKindsAndRejectsUnknownFields) {
    const auto p = plane();
    auto seg = target_from_json(p, Json::parse(R"({"kind":"segment","keyframes":[[0,[[0,0],[1,0]]]]})"));
    EXPECT_EQ(seg.kind(), "segment");
    auto ball = target_from_json(p, Json::parse(R"({"kind":"ball","keyframes":[[0,{"center":[0,0],"radius":1}]]})"));
    EXPECT_NEAR(ball.distance(0.0, make_point({2, 0})), 1.0, 1e-12);
    auto sub = target_from_json(tripod(), Json::parse(R"({"kind":"subtree","edges":[[0,0,0.5]]})"));
    EXPECT_EQ(sub.kind(), "subtree");
    EXPECT_THROW(target_from_json(p, Json::parse(R"({"kind":"point","keyframe":[[0,[0,0]]]})")), ValidationError);
    EXPECT_THROW(evaders_from_json(p, Json::parse(R"([{"kind":"segment","keyframes":[[0,[[0,0],[1,0]]]]}])")),
                 ValidationError);
}
