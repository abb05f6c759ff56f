#include <algorithm>
#include <cmath>
#include <numbers>

#include "hadflow/geometry.hpp"

namespace hadflow {

const Point::Coords& Point::coords() const {
    if (const auto* c = std::get_if<Coords>(&data_)) return *c;
    throw ValidationError("point is not a coordinate tuple");
}

const TreePoint& Point::tree_point() const {
    if (const auto* t = std::get_if<TreePoint>(&data_)) return *t;
    throw ValidationError("point is not a tree point");
}

const Point& Point::left() const {
    if (const auto* p = std::get_if<std::vector<Point>>(&data_); p && p->size() == 2) return (*p)[0];
    throw ValidationError("point is not a product pair");
}

const Point& Point::right() const {
    if (const auto* p = std::get_if<std::vector<Point>>(&data_); p && p->size() == 2) return (*p)[1];
    throw ValidationError("point is not a product pair");
}

bool approx_equal(const Point& a, const Point& b, double tol) {
    if (a.is_coords() && b.is_coords()) {
        const auto& x = a.coords();
        const auto& y = b.coords();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > tol) return false;
        return true;
    }
    if (a.is_tree() && b.is_tree()) {
        return a.tree_point().edge == b.tree_point().edge &&
               std::abs(a.tree_point().offset - b.tree_point().offset) <= tol;
    }
    if (a.is_pair() && b.is_pair()) {
        return approx_equal(a.left(), b.left(), tol) && approx_equal(a.right(), b.right(), tol);
    }
    return false;
}

bool TangentVector::is_vertex() const {
    return length <= 0.0 || std::holds_alternative<std::monostate>(direction);
}

TangentVector TangentVector::scaled(double factor) const {
    if (factor < 0.0) throw DomainError("tangent vectors scale by nonnegative factors only");
    TangentVector out = *this;
    out.length *= factor;
    if (out.length == 0.0) out.direction = std::monostate{};
    return out;
}

TangentVector TangentVector::unit() const {
    if (is_vertex()) throw DomainError("the cone vertex has no unit direction");
    TangentVector out = *this;
    out.length = 1.0;
    return out;
}

TangentVector TangentVector::vertex(Point base) {
    return TangentVector{std::move(base), std::monostate{}, 0.0};
}

double norm(const TangentVector& v) { return v.is_vertex() ? 0.0 : v.length; }

namespace {

// Inner product of the unit directions, both nonzero.
double direction_cosine(const Direction& a, const Direction& b) {
    if (const auto* u = std::get_if<std::vector<double>>(&a)) {
        const auto* w = std::get_if<std::vector<double>>(&b);
        if (!w || w->size() != u->size()) throw UsageError("tangent directions of different kinds");
        double s = 0.0;
        for (std::size_t i = 0; i < u->size(); ++i) s += (*u)[i] * (*w)[i];
        return s;
    }
    if (const auto* g = std::get_if<TreeGerm>(&a)) {
        const auto* h = std::get_if<TreeGerm>(&b);
        if (!h) throw UsageError("tangent directions of different kinds");
        return *g == *h ? 1.0 : -1.0;
    }
    if (const auto* p = std::get_if<std::vector<TangentVector>>(&a)) {
        const auto* q = std::get_if<std::vector<TangentVector>>(&b);
        if (!q || q->size() != p->size()) throw UsageError("tangent directions of different kinds");
        double s = 0.0;
        for (std::size_t i = 0; i < p->size(); ++i) s += inner_product((*p)[i], (*q)[i]);
        return s;
    }
    throw UsageError("vertex has no direction");
}

}  // namespace

double inner_product(const TangentVector& v, const TangentVector& w) {
    if (!approx_equal(v.base, w.base, 1e-10)) throw UsageError("inner product of tangent vectors at different base points");
    if (v.is_vertex() || w.is_vertex()) return 0.0;
    return v.length * w.length * direction_cosine(v.direction, w.direction);
}

double angle_between(const TangentVector& v, const TangentVector& w) {
    if (v.is_vertex() || w.is_vertex()) throw DomainError("angle with the cone vertex is undefined");
    const double c = inner_product(v, w) / (v.length * w.length);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double cone_distance(const TangentVector& v, const TangentVector& w) {
    if (!approx_equal(v.base, w.base, 1e-10)) throw UsageError("cone distance of tangent vectors at different base points");
    if (v.is_vertex()) return norm(w);
    if (w.is_vertex()) return norm(v);
    // Componentwise forms avoid the cancellation in |v|^2 + |w|^2 - 2<v,w>.
    if (const auto* a = std::get_if<std::vector<double>>(&v.direction)) {
        const auto& b = std::get<std::vector<double>>(w.direction);
        double sq = 0.0;
        for (std::size_t i = 0; i < a->size(); ++i) {
            const double d = v.length * (*a)[i] - w.length * b[i];
            sq += d * d;
        }
        return std::sqrt(sq);
    }
    if (const auto* g = std::get_if<TreeGerm>(&v.direction))
        return *g == std::get<TreeGerm>(w.direction) ? std::abs(v.length - w.length) : v.length + w.length;
    const double l = cone_distance(product_component(v, 0), product_component(w, 0));
    const double r = cone_distance(product_component(v, 1), product_component(w, 1));
    return std::hypot(l, r);
}

TangentVector product_component(const TangentVector& v, std::size_t index) {
    if (index > 1) throw UsageError("product component index must be 0 or 1");
    const Point& base = index == 0 ? v.base.left() : v.base.right();
    if (v.is_vertex()) return TangentVector::vertex(base);
    const auto* parts = std::get_if<std::vector<TangentVector>>(&v.direction);
    if (!parts || parts->size() != 2) throw UsageError("not a product tangent vector");
    return (*parts)[index].scaled(v.length);
}

Point Space::canonical(const Point& p) const {
    validate(p);
    return p;
}

Point Space::geodesic_point(const Point& x, const Point& y, double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter outside [0, 1]: " + std::to_string(t));
    if (t == 0.0) return canonical(x);
    if (t == 1.0) return canonical(y);
    return geodesic_point_unchecked(x, y, t);
}

TangentVector Space::steepest_descent(const Point&, const std::function<double(const TangentVector&)>&) const {
    throw CapabilityError(std::string("steepest-descent direction search is not available on ") + std::string(kind()));
}

std::vector<GeodesicSegment> Space::search_segments(const Point&, double) const { return {}; }

double comparison_angle(const Space& space, const Point& apex, const Point& y, const Point& z) {
    const double a = space.distance(apex, y);
    const double b = space.distance(apex, z);
    if (a == 0.0 || b == 0.0) throw DomainError("comparison angle needs both points distinct from the apex");
    const double c = space.distance(y, z);
    const double cosine = (a * a + b * b - c * c) / (2.0 * a * b);
    return std::acos(std::clamp(cosine, -1.0, 1.0));
}

SlackCheck cat0_quadruple_check(const Space& space, const Point& y, const Point& x0, const Point& x1, double t) {
    const Point xt = space.geodesic_point(x0, x1, t);
    const double d0 = space.distance(y, x0);
    const double d1 = space.distance(y, x1);
    const double d01 = space.distance(x0, x1);
    const double dt = space.distance(y, xt);
    const double rhs = (1.0 - t) * d0 * d0 + t * d1 * d1 - t * (1.0 - t) * d01 * d01;
    const double slack = rhs - dt * dt;
    return {slack >= -1e-9, slack};
}

SlackCheck angle_difference_bound_check(const TangentVector& v1, const TangentVector& v2, const TangentVector& v3) {
    if (std::abs(norm(v3) - 1.0) > 1e-12) throw UsageError("third vector must have unit length");
    const double lhs = std::abs(inner_product(v3, v1) - inner_product(v3, v2));
    const double slack = cone_distance(v1, v2) - lhs;
    return {slack >= -1e-9, slack};
}

}  // namespace hadflow
