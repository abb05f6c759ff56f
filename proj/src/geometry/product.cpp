#include <algorithm>
#include <cmath>

#include "hadflow/geometry.hpp"

namespace hadflow {

ProductSpace::ProductSpace(SpacePtr left, SpacePtr right) : left_(std::move(left)), right_(std::move(right)) {
    if (!left_ || !right_) throw ValidationError("product factors must be non-null");
}

void ProductSpace::validate(const Point& p) const {
    if (!p.is_pair()) throw ValidationError("expected a product pair [left, right]");
    left_->validate(p.left());
    right_->validate(p.right());
}

Point ProductSpace::canonical(const Point& p) const {
    validate(p);
    return Point(left_->canonical(p.left()), right_->canonical(p.right()));
}

double ProductSpace::distance(const Point& x, const Point& y) const {
    return std::hypot(left_->distance(x.left(), y.left()), right_->distance(x.right(), y.right()));
}

Point ProductSpace::geodesic_point_unchecked(const Point& x, const Point& y, double t) const {
    return Point(left_->geodesic_point(x.left(), y.left(), t), right_->geodesic_point(x.right(), y.right(), t));
}

TangentVector ProductSpace::combine(const TangentVector& left, const TangentVector& right) const {
    const Point base(left.base, right.base);
    const double total = std::hypot(norm(left), norm(right));
    if (total == 0.0) return TangentVector::vertex(base);
    auto part = [&](const TangentVector& v) {
        return v.is_vertex() ? TangentVector::vertex(v.base) : TangentVector{v.base, v.direction, v.length / total};
    };
    return TangentVector{base, std::vector<TangentVector>{part(left), part(right)}, total};
}

TangentVector ProductSpace::log_direction(const Point& x, const Point& y) const {
    return combine(left_->log_direction(x.left(), y.left()), right_->log_direction(x.right(), y.right()));
}

Point ProductSpace::exp_step(const TangentVector& v) const {
    return Point(left_->exp_step(product_component(v, 0)), right_->exp_step(product_component(v, 1)));
}

TangentVector ProductSpace::cone_sum(const Point& base, std::span<const TangentVector> vectors) const {
    std::vector<TangentVector> lefts;
    std::vector<TangentVector> rights;
    for (const auto& v : vectors) {
        lefts.push_back(product_component(v, 0));
        rights.push_back(product_component(v, 1));
    }
    return combine(left_->cone_sum(base.left(), lefts), right_->cone_sum(base.right(), rights));
}

double ProductSpace::transported_angle(const TangentVector& v, const TangentVector& w) const {
    if (v.is_vertex() || w.is_vertex()) return 0.0;
    const auto v0 = product_component(v.unit(), 0);
    const auto v1 = product_component(v.unit(), 1);
    const auto w0 = product_component(w.unit(), 0);
    const auto w1 = product_component(w.unit(), 1);
    double c = 0.0;
    if (!v0.is_vertex() && !w0.is_vertex()) c += v0.length * w0.length * std::cos(left_->transported_angle(v0, w0));
    if (!v1.is_vertex() && !w1.is_vertex()) c += v1.length * w1.length * std::cos(right_->transported_angle(v1, w1));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

Point ProductSpace::sample_point(Rng& rng) const {
    Point a = left_->sample_point(rng);
    Point b = right_->sample_point(rng);
    return Point(std::move(a), std::move(b));
}

std::vector<std::string> ProductSpace::coordinate_names() const {
    std::vector<std::string> names;
    for (const auto& n : left_->coordinate_names()) names.push_back("left_" + n);
    for (const auto& n : right_->coordinate_names()) names.push_back("right_" + n);
    return names;
}

std::vector<double> ProductSpace::coordinates(const Point& p) const {
    auto out = left_->coordinates(p.left());
    const auto r = right_->coordinates(p.right());
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

Json ProductSpace::point_to_json(const Point& p) const {
    return Json::array({left_->point_to_json(p.left()), right_->point_to_json(p.right())});
}

Point ProductSpace::point_from_json(const Json& j) const {
    if (!j.is_array() || j.size() != 2) throw ValidationError("product point must be a pair [left, right]");
    return Point(left_->point_from_json(j[0]), right_->point_from_json(j[1]));
}

Json ProductSpace::to_json() const {
    return Json{{"kind", "product"}, {"left", left_->to_json()}, {"right", right_->to_json()}};
}

namespace {

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ValidationError("unknown " + what + " field '" + key + "'");
    }
}

}  // namespace

SpacePtr space_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("space spec needs a string field 'kind'");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "euclidean") {
        require_keys(j, {"kind", "dim"}, "space");
        if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
            throw ValidationError("space field 'dim' must be a positive integer");
        return std::make_shared<EuclideanSpace>(j["dim"].get<std::size_t>());
    }
    if (kind == "quadrant") {
        require_keys(j, {"kind"}, "space");
        return std::make_shared<QuadrantSpace>();
    }
    if (kind == "tree") {
        require_keys(j, {"kind", "edges"}, "space");
        if (!j.contains("edges") || !j["edges"].is_array()) throw ValidationError("space field 'edges' must be an array");
        std::vector<TreeEdge> edges;
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
                !e[2].is_number())
                throw ValidationError("space field 'edges' entries must be [u, v, length]");
            edges.push_back({e[0].get<long long>(), e[1].get<long long>(), e[2].get<double>()});
        }
        return std::make_shared<TreeSpace>(std::move(edges));
    }
    if (kind == "product") {
        require_keys(j, {"kind", "left", "right"}, "space");
        if (!j.contains("left") || !j.contains("right"))
            throw ValidationError("product space needs fields 'left' and 'right'");
        return std::make_shared<ProductSpace>(space_from_json(j["left"]), space_from_json(j["right"]));
    }
    throw ValidationError("space field 'kind' has unknown value '" + kind + "'");
}

}  // namespace hadflow
