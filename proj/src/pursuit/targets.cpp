#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hadflow/targets.hpp"

namespace hadflow {

namespace {

const TreeSpace* as_tree(const Space& s) { return dynamic_cast<const TreeSpace*>(&s); }

bool is_flat(const Space& s) { return dynamic_cast<const EuclideanSpace*>(&s) != nullptr; }

// Nearest offset on the piece [lo, hi] of `edge` to p, together with its distance.
std::pair<double, double> nearest_on_piece(const TreeSpace& tree, const SubtreePiece& piece, const Point& p) {
    const double len = tree.edges()[piece.edge].length;
    const Point cp = tree.canonical(p);
    const auto& tp = cp.tree_point();
    double s;
    if (tp.edge == piece.edge && tp.offset > 0.0 && tp.offset < len) {
        s = std::clamp(tp.offset, piece.lo, piece.hi);
    } else {
        const double du = tree.distance(cp, Point::tree(piece.edge, 0.0));
        const double dv = tree.distance(cp, Point::tree(piece.edge, len));
        s = du <= dv ? piece.lo : piece.hi;
    }
    return {s, tree.distance(cp, Point::tree(piece.edge, s))};
}

Point subtree_footpoint(const TreeSpace& tree, const std::vector<SubtreePiece>& pieces, const Point& p) {
    double best = std::numeric_limits<double>::infinity();
    Point out;
    for (const auto& piece : pieces) {
        const auto [s, d] = nearest_on_piece(tree, piece, p);
        if (d < best) {
            best = d;
            out = tree.canonical(Point::tree(piece.edge, s));
        }
    }
    return out;
}

std::vector<SubtreePiece> path_pieces(const TreeSpace& tree, const Point& a, const Point& b) {
    std::vector<SubtreePiece> pieces;
    for (const auto& leg : tree.path(tree.canonical(a), tree.canonical(b)))
        pieces.push_back({leg.edge, std::min(leg.from, leg.to), std::max(leg.from, leg.to)});
    if (pieces.empty()) {
        const auto& tp = tree.canonical(a).tree_point();
        pieces.push_back({tp.edge, tp.offset, tp.offset});
    }
    return pieces;
}

// Golden-section minimization of the convex map u -> d(p, [a b](u)).
Point golden_segment_footpoint(const Space& space, const Point& a, const Point& b, const Point& p) {
    auto f = [&](double u) { return space.distance(p, space.geodesic_point(a, b, u)); };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    double best_u = 0.5 * (lo + hi);
    double best = f(best_u);
    for (double u : {0.0, 1.0}) {
        const double v = f(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    return space.geodesic_point(a, b, best_u);
}

bool covered(const std::vector<SubtreePiece>& pieces, std::size_t edge, double lo, double hi, double tol) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& p : pieces)
        if (p.edge == edge) iv.emplace_back(p.lo, p.hi);
    std::sort(iv.begin(), iv.end());
    double reach = lo;
    for (const auto& [a, b] : iv) {
        if (a > reach + tol) break;
        reach = std::max(reach, b);
    }
    return reach >= hi - tol;
}

}  // namespace

std::string_view shape_kind(const TargetShape& shape) {
    switch (shape.index()) {
        case 0: return "point";
        case 1: return "segment";
        case 2: return "ball";
        default: return "subtree";
    }
}

ConvexTarget::ConvexTarget(SpacePtr space, TargetShape shape) : space_(std::move(space)), shape_(std::move(shape)) {
    if (!space_) throw ValidationError("target needs a space");
    if (auto* p = std::get_if<PointShape>(&shape_)) {
        p->p = space_->canonical(p->p);
    } else if (auto* s = std::get_if<SegmentShape>(&shape_)) {
        s->a = space_->canonical(s->a);
        s->b = space_->canonical(s->b);
    } else if (auto* b = std::get_if<BallShape>(&shape_)) {
        b->center = space_->canonical(b->center);
        if (!(b->radius >= 0.0) || !std::isfinite(b->radius)) throw ValidationError("ball radius must be >= 0");
    } else {
        auto& sub = std::get<SubtreeShape>(shape_);
        const auto* tree = as_tree(*space_);
        if (!tree) throw ValidationError("subtree targets need a tree space");
        if (sub.pieces.empty()) throw ValidationError("subtree target needs at least one piece");
        for (const auto& piece : sub.pieces) {
            if (piece.edge >= tree->edges().size()) throw ValidationError("subtree piece edge out of range");
            const double len = tree->edges()[piece.edge].length;
            if (!(piece.lo >= 0.0 && piece.lo <= piece.hi && piece.hi <= len))
                throw ValidationError("subtree piece needs 0 <= lo <= hi <= edge length");
        }
        // A union of edge pieces is convex iff it is connected: every path
        // between two pieces must be covered.
        for (std::size_t i = 0; i < sub.pieces.size(); ++i) {
            for (std::size_t j = i + 1; j < sub.pieces.size(); ++j) {
                const Point a = Point::tree(sub.pieces[i].edge, sub.pieces[i].lo);
                const Point b = Point::tree(sub.pieces[j].edge, sub.pieces[j].lo);
                for (const auto& leg : tree->path(tree->canonical(a), tree->canonical(b))) {
                    if (!covered(sub.pieces, leg.edge, std::min(leg.from, leg.to), std::max(leg.from, leg.to), 1e-12))
                        throw ValidationError("subtree pieces are not connected, so the target is not convex");
                }
            }
        }
    }
}

Point ConvexTarget::footpoint(const Point& p) const {
    const Point cp = space_->canonical(p);
    if (const auto* s = std::get_if<PointShape>(&shape_)) return s->p;
    if (const auto* s = std::get_if<SegmentShape>(&shape_)) {
        if (is_flat(*space_)) {
            const auto& a = s->a.coords();
            const auto& b = s->b.coords();
            const auto& x = cp.coords();
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                num += (x[i] - a[i]) * (b[i] - a[i]);
                den += (b[i] - a[i]) * (b[i] - a[i]);
            }
            if (den == 0.0) return s->a;
            return space_->geodesic_point(s->a, s->b, std::clamp(num / den, 0.0, 1.0));
        }
        if (const auto* tree = as_tree(*space_)) return subtree_footpoint(*tree, path_pieces(*tree, s->a, s->b), cp);
        return golden_segment_footpoint(*space_, s->a, s->b, cp);
    }
    if (const auto* s = std::get_if<BallShape>(&shape_)) {
        const double d = space_->distance(s->center, cp);
        if (d <= s->radius) return cp;
        return space_->geodesic_point(s->center, cp, s->radius / d);
    }
    return subtree_footpoint(*as_tree(*space_), std::get<SubtreeShape>(shape_).pieces, cp);
}

double ConvexTarget::distance_to(const Point& p) const { return space_->distance(footpoint(p), p); }

bool ConvexTarget::contains(const Point& p, double tol) const { return distance_to(p) <= tol; }

Point ConvexTarget::sample_member(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (const auto* s = std::get_if<PointShape>(&shape_)) return s->p;
    if (const auto* s = std::get_if<SegmentShape>(&shape_)) return space_->geodesic_point(s->a, s->b, u(rng));
    if (const auto* s = std::get_if<BallShape>(&shape_)) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const Point y = space_->sample_point(rng);
            const double d = space_->distance(s->center, y);
            if (d == 0.0) continue;
            return space_->geodesic_point(s->center, y, std::min(1.0, s->radius * u(rng) / d));
        }
        return s->center;
    }
    const auto& pieces = std::get<SubtreeShape>(shape_).pieces;
    double total = 0.0;
    for (const auto& p : pieces) total += p.hi - p.lo;
    double r = u(rng) * total;
    for (const auto& p : pieces) {
        const double len = p.hi - p.lo;
        if (r <= len || &p == &pieces.back())
            return space_->canonical(Point::tree(p.edge, std::clamp(p.lo + r, p.lo, p.hi)));
        r -= len;
    }
    return space_->canonical(Point::tree(pieces.front().edge, pieces.front().lo));
}

std::vector<Point> ConvexTarget::extreme_points() const {
    if (const auto* s = std::get_if<PointShape>(&shape_)) return {s->p};
    if (const auto* s = std::get_if<SegmentShape>(&shape_)) return {s->a, s->b};
    if (const auto* s = std::get_if<SubtreeShape>(&shape_)) {
        std::vector<Point> out;
        for (const auto& p : s->pieces) {
            out.push_back(space_->canonical(Point::tree(p.edge, p.lo)));
            out.push_back(space_->canonical(Point::tree(p.edge, p.hi)));
        }
        return out;
    }
    const auto& ball = std::get<BallShape>(shape_);
    std::vector<Point> out;
    if (ball.radius == 0.0) return {ball.center};
    if (const auto* e = dynamic_cast<const EuclideanSpace*>(space_.get()); e && e->dim() <= 2 && space_->kind() == "euclidean") {
        const auto& c = ball.center.coords();
        if (e->dim() == 1) return {make_point({c[0] - ball.radius}), make_point({c[0] + ball.radius})};
        for (int k = 0; k < 64; ++k) {
            const double th = 2.0 * std::numbers::pi * k / 64;
            out.push_back(make_point({c[0] + ball.radius * std::cos(th), c[1] + ball.radius * std::sin(th)}));
        }
        return out;
    }
    if (const auto* tree = as_tree(*space_)) {
        std::map<long long, int> degree;
        for (const auto& e : tree->edges()) {
            ++degree[e.u];
            ++degree[e.v];
        }
        for (const auto& [label, deg] : degree) {
            const Point v = tree->vertex_point(label);
            if (deg == 1 && tree->distance(ball.center, v) <= ball.radius) out.push_back(v);
        }
        const auto& ct = ball.center.tree_point();
        for (std::size_t e = 0; e < tree->edges().size(); ++e) {
            const double len = tree->edges()[e].length;
            if (ct.edge == e && ct.offset > 0.0 && ct.offset < len) {
                for (double s : {ct.offset - ball.radius, ct.offset + ball.radius})
                    if (s >= 0.0 && s <= len) out.push_back(tree->canonical(Point::tree(e, s)));
                continue;
            }
            const double du = tree->distance(ball.center, Point::tree(e, 0.0));
            const double dv = tree->distance(ball.center, Point::tree(e, len));
            const double s = du <= dv ? ball.radius - du : len - (ball.radius - dv);
            if (s >= 0.0 && s <= len) out.push_back(tree->canonical(Point::tree(e, s)));
        }
        if (out.empty()) out.push_back(ball.center);
        return out;
    }
    // Sampled boundary: radial points toward a fixed pseudo-random cloud.
    Rng rng(0x5eedULL);
    for (int k = 0; k < 256 && out.size() < 64; ++k) {
        const Point y = space_->sample_point(rng);
        const double d = space_->distance(ball.center, y);
        if (d <= ball.radius || d == 0.0) continue;
        out.push_back(space_->geodesic_point(ball.center, y, ball.radius / d));
    }
    if (out.empty()) out.push_back(ball.center);
    return out;
}

bool ConvexTarget::extreme_points_exact() const {
    const auto* ball = std::get_if<BallShape>(&shape_);
    if (!ball || ball->radius == 0.0) return true;
    if (as_tree(*space_)) return true;
    const auto* e = dynamic_cast<const EuclideanSpace*>(space_.get());
    return e && e->dim() == 1 && space_->kind() == "euclidean";
}

HausdorffResult hausdorff(const ConvexTarget& a, const ConvexTarget& b) {
    const auto* ba = std::get_if<BallShape>(&a.shape());
    const auto* bb = std::get_if<BallShape>(&b.shape());
    if (ba && bb && a.space().kind() == "euclidean")
        return {a.space().distance(ba->center, bb->center) + std::abs(ba->radius - bb->radius), true};
    // d(., B) is convex, so its supremum over A is attained at extreme points of A.
    double value = 0.0;
    for (const auto& p : a.extreme_points()) value = std::max(value, b.distance_to(p));
    for (const auto& p : b.extreme_points()) value = std::max(value, a.distance_to(p));
    return {value, a.extreme_points_exact() && b.extreme_points_exact()};
}

MovingTarget::MovingTarget(SpacePtr space, std::string kind, Curve curve, Json spec)
    : space_(std::move(space)), kind_(std::move(kind)), curve_(std::move(curve)), spec_(std::move(spec)) {}

MovingTarget MovingTarget::stationary(const ConvexTarget& target) {
    return MovingTarget(target.space_ptr(), std::string(target.kind()), [target](double) { return target; });
}

MovingTarget MovingTarget::keyframed(SpacePtr space, std::vector<std::pair<double, TargetShape>> keyframes,
                                     Json spec) {
    if (keyframes.empty()) throw ValidationError("moving target needs at least one keyframe");
    const auto kind = std::string(shape_kind(keyframes.front().second));
    std::vector<std::pair<double, ConvexTarget>> frames;
    for (std::size_t i = 0; i < keyframes.size(); ++i) {
        if (shape_kind(keyframes[i].second) != kind) throw ValidationError("keyframes must share one target kind");
        if (!std::isfinite(keyframes[i].first)) throw ValidationError("keyframe times must be finite");
        if (i > 0 && !(keyframes[i].first > keyframes[i - 1].first))
            throw ValidationError("keyframe times must be strictly increasing");
        frames.emplace_back(keyframes[i].first, ConvexTarget(space, keyframes[i].second));
    }
    if (kind == "subtree") {
        const auto n = std::get<SubtreeShape>(frames.front().second.shape()).pieces.size();
        for (const auto& [t, f] : frames) {
            const auto& pieces = std::get<SubtreeShape>(f.shape()).pieces;
            if (pieces.size() != n) throw ValidationError("subtree keyframes must have matching pieces");
            for (std::size_t k = 0; k < n; ++k)
                if (pieces[k].edge != std::get<SubtreeShape>(frames.front().second.shape()).pieces[k].edge)
                    throw ValidationError("subtree keyframes must have matching pieces");
        }
    }
    auto curve = [space, frames](double t) -> ConvexTarget {
        if (t <= frames.front().first) return frames.front().second;
        if (t >= frames.back().first) return frames.back().second;
        const auto it = std::upper_bound(frames.begin(), frames.end(), t,
                                         [](double v, const auto& f) { return v < f.first; });
        const auto& [t1, f1] = *it;
        const auto& [t0, f0] = *(it - 1);
        const double u = (t - t0) / (t1 - t0);
        const Space& s = *space;
        if (const auto* a = std::get_if<PointShape>(&f0.shape())) {
            const auto& b = std::get<PointShape>(f1.shape());
            return ConvexTarget(space, PointShape{s.geodesic_point(a->p, b.p, u)});
        }
        if (const auto* a = std::get_if<SegmentShape>(&f0.shape())) {
            const auto& b = std::get<SegmentShape>(f1.shape());
            return ConvexTarget(space, SegmentShape{s.geodesic_point(a->a, b.a, u), s.geodesic_point(a->b, b.b, u)});
        }
        if (const auto* a = std::get_if<BallShape>(&f0.shape())) {
            const auto& b = std::get<BallShape>(f1.shape());
            return ConvexTarget(space, BallShape{s.geodesic_point(a->center, b.center, u),
                                                 std::lerp(a->radius, b.radius, u)});
        }
        const auto& pa = std::get<SubtreeShape>(f0.shape()).pieces;
        const auto& pb = std::get<SubtreeShape>(f1.shape()).pieces;
        SubtreeShape out;
        for (std::size_t k = 0; k < pa.size(); ++k)
            out.pieces.push_back({pa[k].edge, std::lerp(pa[k].lo, pb[k].lo, u), std::lerp(pa[k].hi, pb[k].hi, u)});
        return ConvexTarget(space, out);
    };
    return MovingTarget(std::move(space), kind, std::move(curve), std::move(spec));
}

ContractCheck motion_contract_check(const MovingTarget& target, double t, double t_prime, double slack) {
    const auto h = hausdorff(target.at(t), target.at(t_prime));
    const double bound = std::abs(t - t_prime) * (1.0 + 1e-9);
    return {h.value <= bound + slack, h.value, bound, h.exact};
}

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    for (const auto& [key, _] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ValidationError("unknown " + what + " field '" + key + "'");
}

SubtreeShape subtree_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("subtree field 'edges' must be an array of [edge, lo, hi]");
    SubtreeShape out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || e[0].get<long long>() < 0 ||
            !e[1].is_number() || !e[2].is_number())
            throw ValidationError("subtree field 'edges' entries must be [edge, lo, hi]");
        out.pieces.push_back({e[0].get<std::size_t>(), e[1].get<double>(), e[2].get<double>()});
    }
    return out;
}

TargetShape shape_from_json(const Space& space, const std::string& kind, const Json& data) {
    if (kind == "point") return PointShape{space.point_from_json(data)};
    if (kind == "segment") {
        if (!data.is_array() || data.size() != 2) throw ValidationError("segment keyframe data must be [a, b]");
        return SegmentShape{space.point_from_json(data[0]), space.point_from_json(data[1])};
    }
    if (kind == "ball") {
        if (!data.is_object()) throw ValidationError("ball keyframe data must be {\"center\", \"radius\"}");
        check_keys(data, {"center", "radius"}, "ball");
        if (!data.contains("center") || !data.contains("radius") || !data["radius"].is_number())
            throw ValidationError("ball keyframe needs 'center' and numeric 'radius'");
        return BallShape{space.point_from_json(data["center"]), data["radius"].get<double>()};
    }
    if (kind == "subtree") return subtree_from_json(data);
    throw ValidationError("target field 'kind' has unknown value '" + kind + "'");
}

}  // namespace

MovingTarget target_from_json(SpacePtr space, const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("target spec needs a string field 'kind'");
    const auto kind = j["kind"].get<std::string>();
    check_keys(j, {"kind", "keyframes", "edges"}, "target");
    if (kind == "subtree" && j.contains("edges")) {
        if (j.contains("keyframes")) throw ValidationError("subtree target takes 'edges' or 'keyframes', not both");
        return MovingTarget::keyframed(space, {{0.0, subtree_from_json(j["edges"])}}, j);
    }
    if (j.contains("edges")) throw ValidationError("target field 'edges' is only valid for subtree targets");
    if (!j.contains("keyframes") || !j["keyframes"].is_array() || j["keyframes"].empty())
        throw ValidationError("target field 'keyframes' must be a nonempty array of [t, data]");
    std::vector<std::pair<double, TargetShape>> frames;
    for (const auto& kf : j["keyframes"]) {
        if (!kf.is_array() || kf.size() != 2 || !kf[0].is_number())
            throw ValidationError("target field 'keyframes' entries must be [t, data]");
        frames.emplace_back(kf[0].get<double>(), shape_from_json(*space, kind, kf[1]));
    }
    return MovingTarget::keyframed(std::move(space), std::move(frames), j);
}

EvaderSet evaders_from_json(SpacePtr space, const Json& j) {
    const Json* list = &j;
    if (j.is_object()) {
        check_keys(j, {"evaders"}, "evader set");
        if (!j.contains("evaders")) throw ValidationError("evader set needs field 'evaders'");
        list = &j["evaders"];
    }
    if (!list->is_array() || list->empty()) throw ValidationError("field 'evaders' must be a nonempty array");
    EvaderSet out;
    for (const auto& e : *list) {
        auto target = target_from_json(space, e);
        if (target.kind() != "point") throw ValidationError("evaders must be point targets");
        out.push_back(std::move(target));
    }
    return out;
}

}  // namespace hadflow
