#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hadflow/errors.hpp"

namespace hadflow {

using Json = nlohmann::json;
using Rng = std::mt19937_64;

// A point on a finite metric tree: position `offset` along edge `edge`,
// measured from the edge's first endpoint.
struct TreePoint {
    std::size_t edge = 0;
    double offset = 0.0;

    friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

// Space-specific point coordinates. Euclidean and quadrant points hold a
// coordinate tuple, tree points a TreePoint, product points exactly two
// member points.
class Point {
public:
    using Coords = std::vector<double>;

    Point() = default;
    explicit Point(Coords coords) : data_(std::move(coords)) {}
    explicit Point(TreePoint tp) : data_(tp) {}
    Point(Point left, Point right) : data_(std::vector<Point>{std::move(left), std::move(right)}) {}

    static Point tree(std::size_t edge, double offset) { return Point(TreePoint{edge, offset}); }

    bool is_coords() const { return std::holds_alternative<Coords>(data_); }
    bool is_tree() const { return std::holds_alternative<TreePoint>(data_); }
    bool is_pair() const { return std::holds_alternative<std::vector<Point>>(data_); }

    const Coords& coords() const;
    const TreePoint& tree_point() const;
    const Point& left() const;
    const Point& right() const;

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::variant<Coords, TreePoint, std::vector<Point>> data_;
};

inline Point make_point(std::initializer_list<double> coords) { return Point(Point::Coords(coords)); }

// Structural equality up to `tol` in every real coordinate.
bool approx_equal(const Point& a, const Point& b, double tol = 1e-12);

// Edge germ on a tree: the initial direction of a geodesic that leaves its
// base point along `edge`, toward increasing offset when sign = +1.
struct TreeGerm {
    std::size_t edge = 0;
    int sign = 1;

    friend bool operator==(const TreeGerm&, const TreeGerm&) = default;
};

struct TangentVector;

// Unit direction in a tangent cone. Monostate marks the cone vertex o_x.
// For products the direction is a pair of component vectors whose squared
// lengths add to one.
using Direction = std::variant<std::monostate, std::vector<double>, TreeGerm, std::vector<TangentVector>>;

struct TangentVector {
    Point base;
    Direction direction;
    double length = 0.0;

    bool is_vertex() const;
    TangentVector scaled(double factor) const;
    TangentVector unit() const;

    static TangentVector vertex(Point base);
};

double norm(const TangentVector& v);

// Cone inner product: |v||w|cos(angle), zero if either is the vertex.
// Throws UsageError when the base points differ.
double inner_product(const TangentVector& v, const TangentVector& w);

// Angle in [0, pi] between nonzero vectors at a common base.
double angle_between(const TangentVector& v, const TangentVector& w);

// Distance in the Euclidean cone, rho^2 = |v|^2 + |w|^2 - 2<v,w>, evaluated
// per cone type to avoid cancellation.
double cone_distance(const TangentVector& v, const TangentVector& w);

// Component vector of a product tangent vector (index 0 or 1), carrying its
// share of the length.
TangentVector product_component(const TangentVector& v, std::size_t index);

// Line segment [a, b] in a space; used as a one-parameter search family.
struct GeodesicSegment {
    Point a;
    Point b;
};

class Space {
public:
    virtual ~Space() = default;

    virtual std::string_view kind() const = 0;

    // Throws ValidationError for an invalid point representation.
    virtual void validate(const Point& p) const = 0;
    // Validated point in its canonical representation.
    virtual Point canonical(const Point& p) const;

    virtual double distance(const Point& x, const Point& y) const = 0;

    // Point x_t on [x y] with d(x, x_t) = t d(x, y). DomainError unless t in [0, 1].
    Point geodesic_point(const Point& x, const Point& y, double t) const;

    // Tangent vector at x pointing along [x y] with length d(x, y);
    // the cone vertex when x = y.
    virtual TangentVector log_direction(const Point& x, const Point& y) const = 0;

    // Follow the germ of v for arclength |v|. Exact while the germ's geodesic
    // stays straight (trees clamp at the end of the germ's edge).
    virtual Point exp_step(const TangentVector& v) const = 0;

    // Downward gradient of the convex map w -> -sum_i <v_i, w> on the tangent
    // cone at `base`. In Euclidean cones this is the vector sum.
    virtual TangentVector cone_sum(const Point& base, std::span<const TangentVector> vectors) const = 0;

    // Minimizer of a one-homogeneous convex function on the unit ball of the
    // tangent cone, returned as the steepest-descent vector (xi, |min|), or
    // the vertex when the minimum is nonnegative.
    virtual TangentVector steepest_descent(const Point& base,
                                           const std::function<double(const TangentVector&)>& derivative) const;

    // Angle between directions at nearby, possibly different, base points.
    virtual double transported_angle(const TangentVector& v, const TangentVector& w) const = 0;

    // Segments on which a convex function restricted to the ball B(center, radius)
    // attains its minimum; empty if the space offers no such family.
    virtual std::vector<GeodesicSegment> search_segments(const Point& center, double radius) const;

    virtual Point sample_point(Rng& rng) const = 0;

    virtual std::vector<std::string> coordinate_names() const = 0;
    virtual std::vector<double> coordinates(const Point& p) const = 0;

    virtual Json point_to_json(const Point& p) const = 0;
    virtual Point point_from_json(const Json& j) const = 0;
    virtual Json to_json() const = 0;

protected:
    virtual Point geodesic_point_unchecked(const Point& x, const Point& y, double t) const = 0;
};

using SpacePtr = std::shared_ptr<const Space>;

class EuclideanSpace : public Space {
public:
    explicit EuclideanSpace(std::size_t dim, double sample_extent = 5.0);

    std::size_t dim() const { return dim_; }

    std::string_view kind() const override { return "euclidean"; }
    void validate(const Point& p) const override;
    double distance(const Point& x, const Point& y) const override;
    TangentVector log_direction(const Point& x, const Point& y) const override;
    Point exp_step(const TangentVector& v) const override;
    TangentVector cone_sum(const Point& base, std::span<const TangentVector> vectors) const override;
    TangentVector steepest_descent(const Point& base,
                                   const std::function<double(const TangentVector&)>& derivative) const override;
    double transported_angle(const TangentVector& v, const TangentVector& w) const override;
    std::vector<GeodesicSegment> search_segments(const Point& center, double radius) const override;
    Point sample_point(Rng& rng) const override;
    std::vector<std::string> coordinate_names() const override;
    std::vector<double> coordinates(const Point& p) const override;
    Json point_to_json(const Point& p) const override;
    Point point_from_json(const Json& j) const override;
    Json to_json() const override;

protected:
    Point geodesic_point_unchecked(const Point& x, const Point& y, double t) const override;
    double sample_extent_;

private:
    std::size_t dim_;
};

// Closed quadrant {x >= 0, y >= 0} of the plane with the induced metric.
class QuadrantSpace : public EuclideanSpace {
public:
    explicit QuadrantSpace(double sample_extent = 5.0) : EuclideanSpace(2, sample_extent) {}

    std::string_view kind() const override { return "quadrant"; }
    void validate(const Point& p) const override;
    std::vector<GeodesicSegment> search_segments(const Point& center, double radius) const override;
    Point sample_point(Rng& rng) const override;
    std::vector<std::string> coordinate_names() const override;
    Json to_json() const override;
};

struct TreeEdge {
    long long u = 0;
    long long v = 0;
    double length = 0.0;
};

// Finite metric tree. Points are (edge, offset) with offset 0 at the edge's
// first endpoint u. A vertex is represented by its lowest-id edge that starts
// there (offset 0); leaves that only end edges use (edge, length).
class TreeSpace : public Space {
public:
    explicit TreeSpace(std::vector<TreeEdge> edges);

    const std::vector<TreeEdge>& edges() const { return edges_; }
    std::size_t vertex_count() const { return labels_.size(); }
    const std::vector<long long>& vertex_labels() const { return labels_; }
    Point vertex_point(long long label) const;
    // Distance between two vertices given by label.
    double vertex_distance(long long a, long long b) const;
    double total_length() const;

    std::string_view kind() const override { return "tree"; }
    void validate(const Point& p) const override;
    Point canonical(const Point& p) const override;
    double distance(const Point& x, const Point& y) const override;
    TangentVector log_direction(const Point& x, const Point& y) const override;
    Point exp_step(const TangentVector& v) const override;
    TangentVector cone_sum(const Point& base, std::span<const TangentVector> vectors) const override;
    TangentVector steepest_descent(const Point& base,
                                   const std::function<double(const TangentVector&)>& derivative) const override;
    double transported_angle(const TangentVector& v, const TangentVector& w) const override;
    std::vector<GeodesicSegment> search_segments(const Point& center, double radius) const override;
    Point sample_point(Rng& rng) const override;
    std::vector<std::string> coordinate_names() const override;
    std::vector<double> coordinates(const Point& p) const override;
    Json point_to_json(const Point& p) const override;
    Point point_from_json(const Json& j) const override;
    Json to_json() const override;

    // All germs at a point: two at edge interiors, one per incident edge at vertices.
    std::vector<TreeGerm> germs_at(const Point& p) const;

    // A piece of edge traversed from offset `from` to offset `to`.
    struct PathLeg {
        std::size_t edge;
        double from;
        double to;
    };
    // The unique path from x to y as a list of nonempty legs.
    std::vector<PathLeg> path(const Point& x, const Point& y) const;

protected:
    Point geodesic_point_unchecked(const Point& x, const Point& y, double t) const override;

private:
    // Vertex index of the endpoint at which point p sits, or npos.
    std::size_t vertex_of(const Point& p) const;
    std::size_t index_of(long long label) const;

    std::vector<TreeEdge> edges_;
    std::vector<long long> labels_;
    std::vector<std::size_t> edge_u_;
    std::vector<std::size_t> edge_v_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<double> vdist_;           // row-major vertex distance matrix
    std::vector<std::size_t> next_edge_;  // first edge on the path i -> j
    std::vector<TreePoint> vertex_rep_;
};

// l2 product of two spaces: d^2 = d_left^2 + d_right^2.
class ProductSpace : public Space {
public:
    ProductSpace(SpacePtr left, SpacePtr right);

    const Space& left() const { return *left_; }
    const Space& right() const { return *right_; }
    const SpacePtr& left_ptr() const { return left_; }
    const SpacePtr& right_ptr() const { return right_; }

    std::string_view kind() const override { return "product"; }
    void validate(const Point& p) const override;
    Point canonical(const Point& p) const override;
    double distance(const Point& x, const Point& y) const override;
    TangentVector log_direction(const Point& x, const Point& y) const override;
    Point exp_step(const TangentVector& v) const override;
    TangentVector cone_sum(const Point& base, std::span<const TangentVector> vectors) const override;
    double transported_angle(const TangentVector& v, const TangentVector& w) const override;
    Point sample_point(Rng& rng) const override;
    std::vector<std::string> coordinate_names() const override;
    std::vector<double> coordinates(const Point& p) const override;
    Json point_to_json(const Point& p) const override;
    Point point_from_json(const Json& j) const override;
    Json to_json() const override;

    // Assemble a product tangent vector from component vectors at the
    // component bases.
    TangentVector combine(const TangentVector& left, const TangentVector& right) const;

protected:
    Point geodesic_point_unchecked(const Point& x, const Point& y, double t) const override;

private:
    SpacePtr left_;
    SpacePtr right_;
};

// {"kind": "euclidean", "dim": n} | {"kind": "quadrant"} |
// {"kind": "tree", "edges": [[u, v, length], ...]} |
// {"kind": "product", "left": ..., "right": ...}
SpacePtr space_from_json(const Json& j);

// Euclidean comparison angle at `apex` of the triangle (apex, y, z).
double comparison_angle(const Space& space, const Point& apex, const Point& y, const Point& z);

struct SlackCheck {
    bool holds = false;
    double slack = 0.0;
};

// d^2(y, x_t) <= (1-t) d^2(y, x0) + t d^2(y, x1) - t(1-t) d^2(x0, x1), within 1e-9.
SlackCheck cat0_quadruple_check(const Space& space, const Point& y, const Point& x0, const Point& x1, double t);

// |<v3, v1> - <v3, v2>| <= rho(v1, v2) for unit v3, within 1e-9.
SlackCheck angle_difference_bound_check(const TangentVector& v1, const TangentVector& v2, const TangentVector& v3);

// Iterative solver failure, carrying the best iterate reached.
class SolverError : public Error {
public:
    SolverError(const std::string& what, Point best) : Error(what), best_(std::move(best)) {}
    const Point& best_iterate() const noexcept { return best_; }

private:
    Point best_;
};

}  // namespace hadflow
