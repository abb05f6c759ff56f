#include <algorithm>
#include <cmath>
#include <limits>

#include "hadflow/functionals.hpp"

namespace hadflow {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Signed ambient displacement of a tangent vector on the line.
double line_component(const TangentVector& w) {
    if (w.is_vertex()) return 0.0;
    return w.length * std::get<std::vector<double>>(w.direction)[0];
}

std::pair<double, double> plane_components(const TangentVector& w) {
    if (w.is_vertex()) return {0.0, 0.0};
    const auto& d = std::get<std::vector<double>>(w.direction);
    return {w.length * d[0], w.length * d[1]};
}

TangentVector rebase(const Space& space, const TangentVector& w) {
    TangentVector out = w;
    out.base = space.canonical(w.base);
    return out;
}

bool near_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::optional<ResolvedPoint> Functional::specialized_resolvent(double, const Point&, double) const {
    return std::nullopt;
}

std::vector<GeodesicSegment> Functional::candidate_geodesics(double, const Point&, double) const { return {}; }

bool Functional::singular(double, const Point&) const { return false; }

// LinearDrift

LinearDrift::LinearDrift(SpacePtr space) : Functional(std::move(space)) {
    const auto* e = dynamic_cast<const EuclideanSpace*>(&this->space());
    if (!e || e->dim() != 1 || this->space().kind() != "euclidean")
        throw ValidationError("linear_drift needs the space {\"kind\": \"euclidean\", \"dim\": 1}");
}

double LinearDrift::value(double t, const Point& x) const { return -(t + 1.0) * x.coords()[0]; }

TangentVector LinearDrift::gradient(double t, const Point& x) const {
    const double c = t + 1.0;
    if (c == 0.0) return TangentVector::vertex(x);
    return TangentVector{x, std::vector<double>{c > 0.0 ? 1.0 : -1.0}, std::abs(c)};
}

double LinearDrift::directional_derivative(double t, const Point&, const TangentVector& w) const {
    return -(t + 1.0) * line_component(w);
}

std::optional<ResolvedPoint> LinearDrift::specialized_resolvent(double t, const Point& x0, double h) const {
    return ResolvedPoint{make_point({x0.coords()[0] + (t + 1.0) * h}), true, 0.0};
}

// MinFunctional

MinFunctional::MinFunctional(SpacePtr space, bool moving) : Functional(std::move(space)), moving_(moving) {
    if (this->space().kind() != "quadrant")
        throw ValidationError(std::string(kind()) + " needs the space {\"kind\": \"quadrant\"}");
}

double MinFunctional::value(double t, const Point& x) const {
    const auto& c = x.coords();
    return -std::min(c[0] - shift(t), c[1]);
}

double MinFunctional::locus_offset(double t, const Point& x) const {
    const auto& c = x.coords();
    return c[1] - (c[0] - shift(t));
}

bool MinFunctional::singular(double t, const Point& x) const {
    return moving_ && std::abs(locus_offset(t, x)) <= 1e-9;
}

TangentVector MinFunctional::gradient(double t, const Point& x) const {
    const auto& c = x.coords();
    const double a = c[0] - shift(t);
    const double b = c[1];
    if (near_equal(a, b)) return TangentVector{x, std::vector<double>{kInvSqrt2, kInvSqrt2}, kInvSqrt2};
    if (a < b) return TangentVector{x, std::vector<double>{1.0, 0.0}, 1.0};
    return TangentVector{x, std::vector<double>{0.0, 1.0}, 1.0};
}

double MinFunctional::directional_derivative(double t, const Point& x, const TangentVector& w) const {
    const auto& c = x.coords();
    const double a = c[0] - shift(t);
    const double b = c[1];
    const auto [wx, wy] = plane_components(w);
    if (near_equal(a, b)) return -std::min(wx, wy);
    return a < b ? -wx : -wy;
}

std::optional<ResolvedPoint> MinFunctional::specialized_resolvent(double t, const Point& x0, double h) const {
    const auto& c = x0.coords();
    const double s = shift(t);
    auto energy = [&](const Point& p) {
        const double dx = p.coords()[0] - c[0];
        const double dy = p.coords()[1] - c[1];
        return value(t, p) + (dx * dx + dy * dy) / (2.0 * h);
    };
    // Minimizer restricted to the locus {(u + s, u)}, clamped to the quadrant.
    const double u = std::max({(c[0] + c[1] - s + h) / 2.0, 0.0, -s});
    const Point candidates[3] = {make_point({u + s, u}), make_point({c[0] + h, c[1]}), make_point({c[0], c[1] + h})};
    std::size_t best = 0;
    double best_energy = energy(candidates[0]);
    for (std::size_t i = 1; i < 3; ++i) {
        const double e = energy(candidates[i]);
        if (e < best_energy - 1e-15 * (1.0 + std::abs(best_energy))) {
            best = i;
            best_energy = e;
        }
    }
    return ResolvedPoint{candidates[best], true, 0.0};
}

// DistanceToMovingSet

DistanceToMovingSet::DistanceToMovingSet(MovingTarget target, std::optional<HoelderData> hoelder)
    : Functional(target.space_ptr()), target_(std::move(target)), hoelder_(hoelder) {}

double DistanceToMovingSet::value(double t, const Point& x) const { return target_.distance(t, x); }

TangentVector DistanceToMovingSet::gradient(double t, const Point& x) const {
    const Point cx = space().canonical(x);
    const Point q = target_.footpoint(t, cx);
    if (space().distance(cx, q) == 0.0) return TangentVector::vertex(cx);
    return space().log_direction(cx, q).unit();
}

double DistanceToMovingSet::directional_derivative(double t, const Point& x, const TangentVector& w) const {
    if (w.is_vertex()) return 0.0;
    const TangentVector g = gradient(t, x);
    if (!g.is_vertex()) return -inner_product(g, rebase(space(), w));
    // Inside the target: growth rate of the distance along the germ.
    const ConvexTarget y = target_.at(t);
    double eps = 1e-7;
    Point p = space().exp_step(w.unit().scaled(eps));
    const double reached = space().distance(space().canonical(x), p);
    if (reached < eps) eps = reached;
    if (eps == 0.0) return 0.0;
    return w.length * y.distance_to(p) / eps;
}

std::optional<ResolvedPoint> DistanceToMovingSet::specialized_resolvent(double t, const Point& x0, double h) const {
    if (!closed_form_) return std::nullopt;
    const Point cx = space().canonical(x0);
    const Point q = target_.footpoint(t, cx);
    const double d = space().distance(cx, q);
    if (d <= h) return ResolvedPoint{q, true, 0.0};
    return ResolvedPoint{space().geodesic_point(cx, q, h / d), true, 0.0};
}

std::vector<GeodesicSegment> DistanceToMovingSet::candidate_geodesics(double t, const Point& x0, double) const {
    const Point cx = space().canonical(x0);
    return {GeodesicSegment{cx, target_.footpoint(t, cx)}};
}

std::shared_ptr<DistanceToMovingSet> DistanceToMovingSet::without_closed_form() const {
    auto out = std::make_shared<DistanceToMovingSet>(*this);
    out->closed_form_ = false;
    return out;
}

Json DistanceToMovingSet::to_json() const {
    Json j{{"kind", "distance_to_target"}, {"target", target_.spec()}};
    if (hoelder_) j["hoelder"] = Json{{"B", hoelder_->B}, {"alpha", hoelder_->alpha}, {"B0", hoelder_->B0}};
    return j;
}

// SumSquaredDistances

SumSquaredDistances::SumSquaredDistances(SpacePtr space, std::vector<Point> anchors)
    : Functional(std::move(space)), anchors_(std::move(anchors)) {
    if (anchors_.empty()) throw ValidationError("sum_squared needs at least one anchor");
    for (auto& a : anchors_) a = this->space().canonical(a);
}

double SumSquaredDistances::value(double, const Point& x) const {
    double s = 0.0;
    for (const auto& a : anchors_) {
        const double d = space().distance(x, a);
        s += d * d;
    }
    return s / static_cast<double>(anchors_.size());
}

TangentVector SumSquaredDistances::gradient(double, const Point& x) const {
    const Point cx = space().canonical(x);
    const double k = 2.0 / static_cast<double>(anchors_.size());
    std::vector<TangentVector> logs;
    logs.reserve(anchors_.size());
    for (const auto& a : anchors_) logs.push_back(space().log_direction(cx, a).scaled(k));
    return space().cone_sum(cx, logs);
}

double SumSquaredDistances::directional_derivative(double, const Point& x, const TangentVector& w) const {
    const Point cx = space().canonical(x);
    const TangentVector rw = rebase(space(), w);
    double s = 0.0;
    for (const auto& a : anchors_) s += inner_product(space().log_direction(cx, a), rw);
    return -2.0 * s / static_cast<double>(anchors_.size());
}

double SumSquaredDistances::lipschitz_x(double, const Point& center, double radius) const {
    double s = 0.0;
    for (const auto& a : anchors_) s += space().distance(center, a) + radius;
    return 2.0 * s / static_cast<double>(anchors_.size());
}

namespace {

// Exact step-energy minimizer on a tree: along each edge every distance term
// is an affine function of the offset, so the energy is a quadratic.
Point tree_sum_squared_resolvent(const TreeSpace& tree, const std::vector<Point>& anchors, const Point& x0, double h) {
    const double n = static_cast<double>(anchors.size());
    auto affine = [&](const Point& z, std::size_t e) -> std::pair<double, double> {
        const double len = tree.edges()[e].length;
        const auto& tp = z.tree_point();
        if (tp.edge == e) return {-tp.offset, 1.0};
        const double du = tree.distance(z, Point::tree(e, 0.0));
        const double dv = tree.distance(z, Point::tree(e, len));
        if (du <= dv) return {du, 1.0};
        return {dv + len, -1.0};
    };
    auto energy = [&](const Point& y) {
        double s = 0.0;
        for (const auto& a : anchors) {
            const double d = tree.distance(y, a);
            s += d * d;
        }
        const double d0 = tree.distance(y, x0);
        return s / n + d0 * d0 / (2.0 * h);
    };
    Point best = x0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
        double lin = 0.0;
        for (const auto& a : anchors) {
            const auto [alpha, beta] = affine(a, e);
            lin += 2.0 * alpha * beta / n;
        }
        const auto [alpha0, beta0] = affine(x0, e);
        lin += alpha0 * beta0 / h;
        const double quad = 1.0 + 1.0 / (2.0 * h);
        const double s = std::clamp(-lin / (2.0 * quad), 0.0, tree.edges()[e].length);
        const Point y = tree.canonical(Point::tree(e, s));
        const double en = energy(y);
        if (en < best_energy) {
            best_energy = en;
            best = y;
        }
    }
    return best;
}

}  // namespace

std::optional<ResolvedPoint> SumSquaredDistances::specialized_resolvent(double t, const Point& x0, double h) const {
    const Point cx = space().canonical(x0);
    if (dynamic_cast<const EuclideanSpace*>(&space())) {
        Point::Coords mean(cx.coords().size(), 0.0);
        for (const auto& a : anchors_)
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += a.coords()[i];
        Point::Coords out(mean.size());
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i] /= static_cast<double>(anchors_.size());
            out[i] = (cx.coords()[i] + 2.0 * h * mean[i]) / (1.0 + 2.0 * h);
        }
        return ResolvedPoint{Point(std::move(out)), true, 0.0};
    }
    if (const auto* tree = dynamic_cast<const TreeSpace*>(&space()))
        return ResolvedPoint{tree_sum_squared_resolvent(*tree, anchors_, cx, h), true, 0.0};
    if (const auto* prod = dynamic_cast<const ProductSpace*>(&space())) {
        // The energy separates over the factors.
        std::vector<Point> left;
        std::vector<Point> right;
        for (const auto& a : anchors_) {
            left.push_back(a.left());
            right.push_back(a.right());
        }
        const auto l = SumSquaredDistances(prod->left_ptr(), left).specialized_resolvent(t, cx.left(), h);
        const auto r = SumSquaredDistances(prod->right_ptr(), right).specialized_resolvent(t, cx.right(), h);
        if (!l || !r) return std::nullopt;
        return ResolvedPoint{Point(l->point, r->point), l->exact && r->exact, std::max(l->tolerance, r->tolerance)};
    }
    return std::nullopt;
}

Json SumSquaredDistances::to_json() const {
    Json anchors = Json::array();
    for (const auto& a : anchors_) anchors.push_back(space().point_to_json(a));
    return Json{{"kind", "sum_squared"}, {"anchors", anchors}};
}

// WeightedSum

WeightedSum::WeightedSum(std::vector<WeightedTerm> terms)
    : Functional(terms.empty() || !terms.front().f ? nullptr : terms.front().f->space_ptr()), terms_(std::move(terms)) {
    if (terms_.empty()) throw ValidationError("weighted_sum needs at least one term");
    for (const auto& term : terms_) {
        if (!term.f) throw ValidationError("weighted_sum term is missing its functional");
        if (!(term.weight >= 0.0) || !std::isfinite(term.weight))
            throw ValidationError("weighted_sum weights must be finite and >= 0");
        if (term.f->space_ptr() != space_ptr() && term.f->space().to_json() != space().to_json())
            throw ValidationError("weighted_sum terms must share one space");
    }
}

double WeightedSum::value(double t, const Point& x) const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.weight * term.f->value(t, x);
    return s;
}

bool WeightedSum::differential_is_linear() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& term) { return term.f->differential_is_linear(); });
}

TangentVector WeightedSum::gradient(double t, const Point& x) const {
    const Point cx = space().canonical(x);
    if (differential_is_linear()) {
        std::vector<TangentVector> parts;
        for (const auto& term : terms_) {
            TangentVector g = term.f->gradient(t, cx).scaled(term.weight);
            g.base = cx;
            parts.push_back(std::move(g));
        }
        return space().cone_sum(cx, parts);
    }
    return space().steepest_descent(cx, [&](const TangentVector& w) { return directional_derivative(t, cx, w); });
}

double WeightedSum::directional_derivative(double t, const Point& x, const TangentVector& w) const {
    double s = 0.0;
    for (const auto& term : terms_)
        if (term.weight > 0.0) s += term.weight * term.f->directional_derivative(t, x, w);
    return s;
}

double WeightedSum::lambda() const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.weight * term.f->lambda();
    return s;
}

std::optional<double> WeightedSum::lipschitz_t() const {
    double s = 0.0;
    for (const auto& term : terms_) {
        const auto l = term.f->lipschitz_t();
        if (!l) return std::nullopt;
        s += term.weight * *l;
    }
    return s;
}

double WeightedSum::lipschitz_x(double t, const Point& center, double radius) const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.weight * term.f->lipschitz_x(t, center, radius);
    return s;
}

std::optional<HoelderData> WeightedSum::hoelder() const {
    std::vector<HoelderData> parts;
    for (const auto& term : terms_) {
        const auto h = term.f->hoelder();
        if (!h) return std::nullopt;
        parts.push_back(*h);
    }
    HoelderData out{0.0, 1.0, std::numeric_limits<double>::infinity()};
    for (const auto& p : parts) {
        out.alpha = std::min(out.alpha, p.alpha);
        out.B0 = std::min(out.B0, p.B0);
    }
    const bool mixed = std::any_of(parts.begin(), parts.end(), [&](const auto& p) { return p.alpha != out.alpha; });
    // Mixed exponents only compose on a bounded window of time differences.
    if (mixed && !std::isfinite(out.B0)) out.B0 = 1.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (terms_[i].weight == 0.0 || parts[i].B == 0.0) continue;
        const double inflation = std::max(1.0, std::pow(out.B0, parts[i].alpha - out.alpha));
        out.B += terms_[i].weight * parts[i].B * inflation;
    }
    return out;
}

double WeightedSum::growth() const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.weight * term.f->growth();
    return s;
}

bool WeightedSum::time_independent() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& term) { return term.f->time_independent(); });
}

bool WeightedSum::has_singular_locus() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const auto& term) { return term.f->has_singular_locus(); });
}

bool WeightedSum::singular(double t, const Point& x) const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [&](const auto& term) { return term.weight > 0.0 && term.f->singular(t, x); });
}

Json WeightedSum::to_json() const {
    Json terms = Json::array();
    for (const auto& term : terms_) terms.push_back(Json{{"weight", term.weight}, {"f", term.f->to_json()}});
    return Json{{"kind", "weighted_sum"}, {"terms", terms}};
}

// Construction from structured text.

namespace {

void allow_keys(const Json& j, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ValidationError("unknown functional field '" + key + "'");
}

HoelderData hoelder_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("functional field 'hoelder' must be an object {B, alpha, B0}");
    for (const auto& [key, _] : j.items())
        if (key != "B" && key != "alpha" && key != "B0") throw ValidationError("unknown hoelder field '" + key + "'");
    HoelderData h;
    if (!j.contains("B") || !j["B"].is_number() || j["B"].get<double>() < 0.0)
        throw ValidationError("hoelder field 'B' must be a number >= 0");
    h.B = j["B"].get<double>();
    if (j.contains("alpha")) {
        if (!j["alpha"].is_number() || !(j["alpha"].get<double>() > 0.0 && j["alpha"].get<double>() <= 1.0))
            throw ValidationError("hoelder field 'alpha' must lie in (0, 1]");
        h.alpha = j["alpha"].get<double>();
    }
    if (j.contains("B0")) {
        if (!j["B0"].is_number() || !(j["B0"].get<double>() > 0.0))
            throw ValidationError("hoelder field 'B0' must be a positive number");
        h.B0 = j["B0"].get<double>();
    }
    return h;
}

}  // namespace

FunctionalPtr functional_from_json(SpacePtr space, const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("functional spec needs a string field 'kind'");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "linear_drift") {
        allow_keys(j, {"kind"});
        return std::make_shared<LinearDrift>(space);
    }
    if (kind == "min_coordinate" || kind == "moving_min") {
        allow_keys(j, {"kind"});
        return std::make_shared<MinFunctional>(space, kind == "moving_min");
    }
    if (kind == "distance_to_target") {
        allow_keys(j, {"kind", "target", "hoelder"});
        if (!j.contains("target")) throw ValidationError("distance_to_target needs field 'target'");
        std::optional<HoelderData> h;
        if (j.contains("hoelder")) h = hoelder_from_json(j["hoelder"]);
        return std::make_shared<DistanceToMovingSet>(target_from_json(space, j["target"]), h);
    }
    if (kind == "sum_squared") {
        allow_keys(j, {"kind", "anchors"});
        if (!j.contains("anchors") || !j["anchors"].is_array() || j["anchors"].empty())
            throw ValidationError("sum_squared field 'anchors' must be a nonempty array of points");
        std::vector<Point> anchors;
        for (const auto& a : j["anchors"]) anchors.push_back(space->point_from_json(a));
        return std::make_shared<SumSquaredDistances>(space, std::move(anchors));
    }
    if (kind == "weighted_sum") {
        allow_keys(j, {"kind", "terms"});
        if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
            throw ValidationError("weighted_sum field 'terms' must be a nonempty array");
        std::vector<WeightedTerm> terms;
        for (const auto& term : j["terms"]) {
            if (!term.is_object()) throw ValidationError("weighted_sum terms must be objects {weight, f}");
            for (const auto& [key, _] : term.items())
                if (key != "weight" && key != "f") throw ValidationError("unknown weighted_sum term field '" + key + "'");
            if (!term.contains("weight") || !term["weight"].is_number())
                throw ValidationError("weighted_sum term field 'weight' must be a number");
            if (!term.contains("f")) throw ValidationError("weighted_sum term needs field 'f'");
            terms.push_back({term["weight"].get<double>(), functional_from_json(space, term["f"])});
        }
        return std::make_shared<WeightedSum>(std::move(terms));
    }
    throw ValidationError("functional field 'kind' has unknown value '" + kind + "'");
}

}  // namespace hadflow
