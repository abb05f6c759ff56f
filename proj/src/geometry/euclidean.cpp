#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hadflow/geometry.hpp"

namespace hadflow {

namespace {

TangentVector from_vector(const Point& base, Point::Coords v) {
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n == 0.0) return TangentVector::vertex(base);
    for (double& c : v) c /= n;
    return TangentVector{base, std::move(v), n};
}

Point::Coords ambient(const TangentVector& v, std::size_t dim) {
    Point::Coords out(dim, 0.0);
    if (v.is_vertex()) return out;
    const auto& u = std::get<std::vector<double>>(v.direction);
    for (std::size_t i = 0; i < dim; ++i) out[i] = v.length * u[i];
    return out;
}

bool inside_quadrant_cone(const Point& base, double ux, double uy) {
    const auto& c = base.coords();
    return !(c[0] == 0.0 && ux < 0.0) && !(c[1] == 0.0 && uy < 0.0);
}

}  // namespace

EuclideanSpace::EuclideanSpace(std::size_t dim, double sample_extent) : sample_extent_(sample_extent), dim_(dim) {
    if (dim == 0) throw ValidationError("euclidean dim must be positive");
}

void EuclideanSpace::validate(const Point& p) const {
    if (!p.is_coords()) throw ValidationError("expected a coordinate tuple");
    if (p.coords().size() != dim_)
        throw ValidationError("expected " + std::to_string(dim_) + " coordinates, got " +
                              std::to_string(p.coords().size()));
    for (double c : p.coords())
        if (!std::isfinite(c)) throw ValidationError("non-finite coordinate");
}

double EuclideanSpace::distance(const Point& x, const Point& y) const {
    const auto& a = x.coords();
    const auto& b = y.coords();
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Point EuclideanSpace::geodesic_point_unchecked(const Point& x, const Point& y, double t) const {
    const auto& a = x.coords();
    const auto& b = y.coords();
    Point::Coords out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return Point(std::move(out));
}

TangentVector EuclideanSpace::log_direction(const Point& x, const Point& y) const {
    const auto& a = x.coords();
    const auto& b = y.coords();
    Point::Coords v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = b[i] - a[i];
    return from_vector(x, std::move(v));
}

Point EuclideanSpace::exp_step(const TangentVector& v) const {
    Point::Coords out = v.base.coords();
    const auto step = ambient(v, dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] += step[i];
    return Point(std::move(out));
}

TangentVector EuclideanSpace::cone_sum(const Point& base, std::span<const TangentVector> vectors) const {
    Point::Coords sum(dim_, 0.0);
    for (const auto& v : vectors) {
        const auto a = ambient(v, dim_);
        for (std::size_t i = 0; i < dim_; ++i) sum[i] += a[i];
    }
    return from_vector(base, std::move(sum));
}

TangentVector EuclideanSpace::steepest_descent(const Point& base,
                                               const std::function<double(const TangentVector&)>& derivative) const {
    const bool quadrant = kind() == "quadrant";
    auto feasible = [&](double ux, double uy) { return !quadrant || inside_quadrant_cone(base, ux, uy); };
    if (dim_ == 1) {
        const TangentVector up{base, std::vector<double>{1.0}, 1.0};
        const TangentVector down{base, std::vector<double>{-1.0}, 1.0};
        const double a = derivative(up);
        const double b = derivative(down);
        const double best = std::min(a, b);
        if (best >= 0.0) return TangentVector::vertex(base);
        return (a <= b ? up : down).scaled(-best);
    }
    if (dim_ != 2) throw CapabilityError("steepest-descent search supports dimensions 1 and 2 only");

    auto at = [&](double theta) {
        return TangentVector{base, std::vector<double>{std::cos(theta), std::sin(theta)}, 1.0};
    };
    constexpr int kScan = 720;
    double best_theta = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScan; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / kScan;
        if (!feasible(std::cos(theta), std::sin(theta))) continue;
        const double val = derivative(at(theta));
        if (val < best_value) {
            best_value = val;
            best_theta = theta;
        }
    }
    // Golden-section refinement on the bracketing arc.
    const double step = 2.0 * std::numbers::pi / kScan;
    double lo = best_theta - step;
    double hi = best_theta + step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto value = [&](double theta) {
        if (!feasible(std::cos(theta), std::sin(theta))) return std::numeric_limits<double>::infinity();
        return derivative(at(theta));
    };
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = value(c);
    double fd = value(d);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = value(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = value(d);
        }
    }
    const double theta = fc < fd ? c : d;
    const double refined = std::min(fc, fd);
    if (refined < best_value) {
        best_value = refined;
        best_theta = theta;
    }
    if (best_value >= 0.0) return TangentVector::vertex(base);
    return at(best_theta).scaled(-best_value);
}

double EuclideanSpace::transported_angle(const TangentVector& v, const TangentVector& w) const {
    if (v.is_vertex() || w.is_vertex()) return 0.0;
    const auto& a = std::get<std::vector<double>>(v.direction);
    const auto& b = std::get<std::vector<double>>(w.direction);
    double c = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) c += a[i] * b[i];
    return std::acos(std::clamp(c, -1.0, 1.0));
}

std::vector<GeodesicSegment> EuclideanSpace::search_segments(const Point& center, double radius) const {
    if (dim_ != 1) return {};
    const double c = center.coords()[0];
    return {GeodesicSegment{make_point({c - radius}), make_point({c + radius})}};
}

Point EuclideanSpace::sample_point(Rng& rng) const {
    std::uniform_real_distribution<double> u(-sample_extent_, sample_extent_);
    Point::Coords out(dim_);
    for (auto& c : out) c = u(rng);
    return Point(std::move(out));
}

std::vector<std::string> EuclideanSpace::coordinate_names() const {
    static const char* kShort[] = {"x", "y", "z"};
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dim_; ++i) names.push_back(dim_ <= 3 ? kShort[i] : "x" + std::to_string(i));
    return names;
}

std::vector<double> EuclideanSpace::coordinates(const Point& p) const { return p.coords(); }

Json EuclideanSpace::point_to_json(const Point& p) const { return Json(p.coords()); }

Point EuclideanSpace::point_from_json(const Json& j) const {
    if (!j.is_array()) throw ValidationError("point must be an array of numbers");
    Point::Coords c;
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError("point coordinates must be numbers");
        c.push_back(v.get<double>());
    }
    Point p(std::move(c));
    validate(p);
    return p;
}

Json EuclideanSpace::to_json() const { return Json{{"kind", "euclidean"}, {"dim", dim_}}; }

void QuadrantSpace::validate(const Point& p) const {
    EuclideanSpace::validate(p);
    if (p.coords()[0] < 0.0 || p.coords()[1] < 0.0) throw ValidationError("quadrant points need both coordinates >= 0");
}

std::vector<GeodesicSegment> QuadrantSpace::search_segments(const Point&, double) const { return {}; }

Point QuadrantSpace::sample_point(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, sample_extent_);
    const double x = u(rng);
    const double y = u(rng);
    return make_point({x, y});
}

std::vector<std::string> QuadrantSpace::coordinate_names() const { return {"x", "y"}; }

Json QuadrantSpace::to_json() const { return Json{{"kind", "quadrant"}}; }

}  // namespace hadflow
