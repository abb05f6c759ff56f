#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hadflow/geometry.hpp"

namespace hadflow {

struct PointShape {
    Point p;
};

struct SegmentShape {
    Point a;
    Point b;
};

struct BallShape {
    Point center;
    double radius = 0.0;
};

// Closed interval [lo, hi] of offsets along one tree edge.
struct SubtreePiece {
    std::size_t edge = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Connected union of edge pieces of a tree.
struct SubtreeShape {
    std::vector<SubtreePiece> pieces;
};

using TargetShape = std::variant<PointShape, SegmentShape, BallShape, SubtreeShape>;

std::string_view shape_kind(const TargetShape& shape);

// Closed convex subset of a space with its nearest-point projection.
class ConvexTarget {
public:
    ConvexTarget(SpacePtr space, TargetShape shape);

    const TargetShape& shape() const { return shape_; }
    std::string_view kind() const { return shape_kind(shape_); }
    const Space& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }

    // Unique nearest point of the target to p.
    Point footpoint(const Point& p) const;
    double distance_to(const Point& p) const;
    bool contains(const Point& p, double tol = 1e-12) const;

    // Random member of the target.
    Point sample_member(Rng& rng) const;

    // Points at which every convex function on the target attains its
    // maximum: endpoints for points, segments and subtrees, the boundary
    // sphere for balls (sampled with 64 points unless finite).
    std::vector<Point> extreme_points() const;
    bool extreme_points_exact() const;

private:
    SpacePtr space_;
    TargetShape shape_;
};

struct HausdorffResult {
    double value = 0.0;
    bool exact = true;
};

HausdorffResult hausdorff(const ConvexTarget& a, const ConvexTarget& b);

// Time-parameterized convex target Y_t. The motion contract
// d_H(Y_t, Y_t') <= |t - t'| is validated by callers, not assumed.
class MovingTarget {
public:
    using Curve = std::function<ConvexTarget(double)>;

    MovingTarget(SpacePtr space, std::string kind, Curve curve, Json spec = nullptr);

    static MovingTarget stationary(const ConvexTarget& target);
    // Constant-velocity interpolation of the defining data between
    // keyframes, held constant outside the keyframe range.
    static MovingTarget keyframed(SpacePtr space, std::vector<std::pair<double, TargetShape>> keyframes,
                                  Json spec = nullptr);

    ConvexTarget at(double t) const { return curve_(t); }
    Point footpoint(double t, const Point& p) const { return at(t).footpoint(p); }
    double distance(double t, const Point& p) const { return at(t).distance_to(p); }

    const Space& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    std::string_view kind() const { return kind_; }
    const Json& spec() const { return spec_; }

private:
    SpacePtr space_;
    std::string kind_;
    Curve curve_;
    Json spec_;
};

struct ContractCheck {
    bool holds = true;
    double hausdorff = 0.0;
    double bound = 0.0;
    bool exact = true;
};

// d_H(Y_t, Y_t') <= |t - t'| (1 + 1e-9) + slack.
ContractCheck motion_contract_check(const MovingTarget& target, double t, double t_prime, double slack = 1e-6);

// {"kind": "point", "keyframes": [[t, point], ...]} |
// {"kind": "segment", "keyframes": [[t, [a, b]], ...]} |
// {"kind": "ball", "keyframes": [[t, {"center": c, "radius": r}], ...]} |
// {"kind": "subtree", "edges": [[edge, lo, hi], ...]} (or keyframes of such lists)
MovingTarget target_from_json(SpacePtr space, const Json& j);

using EvaderSet = std::vector<MovingTarget>;

// {"evaders": [<point target spec>, ...]} or a bare array of point specs.
EvaderSet evaders_from_json(SpacePtr space, const Json& j);

}  // namespace hadflow
