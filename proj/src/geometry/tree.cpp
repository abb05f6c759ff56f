#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "hadflow/geometry.hpp"

namespace hadflow {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

TreeSpace::TreeSpace(std::vector<TreeEdge> edges) : edges_(std::move(edges)) {
    if (edges_.empty()) throw ValidationError("tree needs at least one edge");
    std::map<long long, std::size_t> index;
    for (const auto& e : edges_) {
        if (!(e.length > 0.0) || !std::isfinite(e.length)) throw ValidationError("tree edge lengths must be positive and finite");
        if (e.u == e.v) throw ValidationError("tree edges cannot be loops");
        index.emplace(e.u, 0);
        index.emplace(e.v, 0);
    }
    for (auto& [label, i] : index) {
        i = labels_.size();
        labels_.push_back(label);
    }
    const std::size_t n = labels_.size();
    if (n != edges_.size() + 1) throw ValidationError("edge list does not describe a tree (|V| != |E| + 1)");

    incident_.assign(n, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_u_.push_back(index.at(edges_[e].u));
        edge_v_.push_back(index.at(edges_[e].v));
        incident_[edge_u_[e]].push_back(e);
        incident_[edge_v_[e]].push_back(e);
    }

    vdist_.assign(n * n, std::numeric_limits<double>::infinity());
    next_edge_.assign(n * n, kNone);
    for (std::size_t src = 0; src < n; ++src) {
        std::vector<std::size_t> stack{src};
        vdist_[src * n + src] = 0.0;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t e : incident_[cur]) {
                const std::size_t other = edge_u_[e] == cur ? edge_v_[e] : edge_u_[e];
                if (std::isfinite(vdist_[src * n + other])) continue;
                vdist_[src * n + other] = vdist_[src * n + cur] + edges_[e].length;
                next_edge_[src * n + other] = cur == src ? e : next_edge_[src * n + cur];
                stack.push_back(other);
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(vdist_[src * n + j])) throw ValidationError("edge list does not describe a connected tree");
    }

    vertex_rep_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = kNone;
        std::size_t end = kNone;
        for (std::size_t e : incident_[i]) {
            if (edge_u_[e] == i) start = std::min(start, e);
            else end = std::min(end, e);
        }
        vertex_rep_[i] = start != kNone ? TreePoint{start, 0.0} : TreePoint{end, edges_[end].length};
    }
}

std::size_t TreeSpace::index_of(long long label) const {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) throw ValidationError("unknown tree vertex " + std::to_string(label));
    return static_cast<std::size_t>(it - labels_.begin());
}

Point TreeSpace::vertex_point(long long label) const { return Point(vertex_rep_[index_of(label)]); }

double TreeSpace::vertex_distance(long long a, long long b) const {
    return vdist_[index_of(a) * labels_.size() + index_of(b)];
}

double TreeSpace::total_length() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length;
    return s;
}

void TreeSpace::validate(const Point& p) const {
    if (!p.is_tree()) throw ValidationError("expected a tree point {edge, offset}");
    const auto& tp = p.tree_point();
    if (tp.edge >= edges_.size()) throw ValidationError("tree edge id " + std::to_string(tp.edge) + " out of range");
    if (!(tp.offset >= 0.0 && tp.offset <= edges_[tp.edge].length))
        throw ValidationError("tree offset " + std::to_string(tp.offset) + " outside [0, edge length]");
}

Point TreeSpace::canonical(const Point& p) const {
    validate(p);
    const auto& tp = p.tree_point();
    const double len = edges_[tp.edge].length;
    const double snap = 1e-13 * std::max(1.0, len);
    if (tp.offset <= snap) return Point(vertex_rep_[edge_u_[tp.edge]]);
    if (tp.offset >= len - snap) return Point(vertex_rep_[edge_v_[tp.edge]]);
    return p;
}

std::size_t TreeSpace::vertex_of(const Point& p) const {
    const auto& tp = p.tree_point();
    if (tp.offset == 0.0) return edge_u_[tp.edge];
    if (tp.offset == edges_[tp.edge].length) return edge_v_[tp.edge];
    return kNone;
}

double TreeSpace::distance(const Point& x, const Point& y) const {
    const auto& a = x.tree_point();
    const auto& b = y.tree_point();
    if (a.edge == b.edge) return std::abs(a.offset - b.offset);
    const std::size_t n = labels_.size();
    const double la = edges_[a.edge].length;
    const double lb = edges_[b.edge].length;
    const std::size_t ends_a[2] = {edge_u_[a.edge], edge_v_[a.edge]};
    const std::size_t ends_b[2] = {edge_u_[b.edge], edge_v_[b.edge]};
    const double to_a[2] = {a.offset, la - a.offset};
    const double to_b[2] = {b.offset, lb - b.offset};
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) best = std::min(best, to_a[i] + vdist_[ends_a[i] * n + ends_b[j]] + to_b[j]);
    return best;
}

std::vector<TreeSpace::PathLeg> TreeSpace::path(const Point& x, const Point& y) const {
    const auto& a = x.tree_point();
    const auto& b = y.tree_point();
    std::vector<PathLeg> legs;
    if (a.edge == b.edge) {
        if (a.offset != b.offset) legs.push_back({a.edge, a.offset, b.offset});
        return legs;
    }
    const std::size_t n = labels_.size();
    const double la = edges_[a.edge].length;
    const double lb = edges_[b.edge].length;
    const std::size_t ends_a[2] = {edge_u_[a.edge], edge_v_[a.edge]};
    const std::size_t ends_b[2] = {edge_u_[b.edge], edge_v_[b.edge]};
    const double to_a[2] = {a.offset, la - a.offset};
    const double to_b[2] = {b.offset, lb - b.offset};
    int bi = 0;
    int bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double d = to_a[i] + vdist_[ends_a[i] * n + ends_b[j]] + to_b[j];
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    const double exit_offset = bi == 0 ? 0.0 : la;
    if (a.offset != exit_offset) legs.push_back({a.edge, a.offset, exit_offset});
    std::size_t cur = ends_a[bi];
    const std::size_t target = ends_b[bj];
    while (cur != target) {
        const std::size_t e = next_edge_[cur * n + target];
        const bool forward = edge_u_[e] == cur;
        legs.push_back({e, forward ? 0.0 : edges_[e].length, forward ? edges_[e].length : 0.0});
        cur = forward ? edge_v_[e] : edge_u_[e];
    }
    const double entry_offset = bj == 0 ? 0.0 : lb;
    if (entry_offset != b.offset) legs.push_back({b.edge, entry_offset, b.offset});
    return legs;
}

Point TreeSpace::geodesic_point_unchecked(const Point& x, const Point& y, double t) const {
    const Point cx = canonical(x);
    const Point cy = canonical(y);
    double remaining = t * distance(cx, cy);
    for (const auto& leg : path(cx, cy)) {
        const double len = std::abs(leg.to - leg.from);
        if (remaining <= len) {
            const double offset = leg.from + (leg.to > leg.from ? remaining : -remaining);
            return canonical(Point::tree(leg.edge, std::clamp(offset, 0.0, edges_[leg.edge].length)));
        }
        remaining -= len;
    }
    return cy;
}

TangentVector TreeSpace::log_direction(const Point& x, const Point& y) const {
    const Point cx = canonical(x);
    const Point cy = canonical(y);
    const auto legs = path(cx, cy);
    if (legs.empty()) return TangentVector::vertex(cx);
    const auto& first = legs.front();
    return TangentVector{cx, TreeGerm{first.edge, first.to > first.from ? 1 : -1}, distance(cx, cy)};
}

Point TreeSpace::exp_step(const TangentVector& v) const {
    const Point base = canonical(v.base);
    if (v.is_vertex()) return base;
    const auto& germ = std::get<TreeGerm>(v.direction);
    const double len = edges_[germ.edge].length;
    double start = 0.0;
    const auto& tp = base.tree_point();
    if (tp.edge == germ.edge) {
        start = tp.offset;
    } else {
        const std::size_t vert = vertex_of(base);
        if (vert == edge_u_[germ.edge]) start = 0.0;
        else if (vert == edge_v_[germ.edge]) start = len;
        else throw UsageError("tree germ is not attached to its base point");
    }
    const double offset = std::clamp(start + germ.sign * v.length, 0.0, len);
    return canonical(Point::tree(germ.edge, offset));
}

std::vector<TreeGerm> TreeSpace::germs_at(const Point& p) const {
    const Point c = canonical(p);
    const std::size_t vert = vertex_of(c);
    if (vert == kNone) return {TreeGerm{c.tree_point().edge, 1}, TreeGerm{c.tree_point().edge, -1}};
    std::vector<TreeGerm> germs;
    for (std::size_t e : incident_[vert]) germs.push_back(TreeGerm{e, edge_u_[e] == vert ? 1 : -1});
    return germs;
}

TangentVector TreeSpace::cone_sum(const Point& base, std::span<const TangentVector> vectors) const {
    const Point c = canonical(base);
    const auto germs = germs_at(c);
    double best = 0.0;
    const TreeGerm* best_germ = nullptr;
    for (const auto& g : germs) {
        double score = 0.0;
        for (const auto& v : vectors) {
            if (v.is_vertex()) continue;
            score += std::get<TreeGerm>(v.direction) == g ? v.length : -v.length;
        }
        if (score > best) {
            best = score;
            best_germ = &g;
        }
    }
    if (!best_germ) return TangentVector::vertex(c);
    return TangentVector{c, *best_germ, best};
}

TangentVector TreeSpace::steepest_descent(const Point& base,
                                          const std::function<double(const TangentVector&)>& derivative) const {
    const Point c = canonical(base);
    double best = 0.0;
    std::optional<TreeGerm> best_germ;
    for (const auto& g : germs_at(c)) {
        const double val = derivative(TangentVector{c, g, 1.0});
        if (val < best) {
            best = val;
            best_germ = g;
        }
    }
    if (!best_germ) return TangentVector::vertex(c);
    return TangentVector{c, *best_germ, -best};
}

double TreeSpace::transported_angle(const TangentVector& v, const TangentVector& w) const {
    if (v.is_vertex() || w.is_vertex()) return 0.0;
    const auto& gv = std::get<TreeGerm>(v.direction);
    const auto& gw = std::get<TreeGerm>(w.direction);
    if (approx_equal(v.base, w.base)) return gv == gw ? 0.0 : std::numbers::pi;
    if (gv.edge == gw.edge) return gv.sign == gw.sign ? 0.0 : std::numbers::pi;
    // w continues v if w's base lies ahead along v's germ and w points away from v's base.
    const auto ahead = log_direction(v.base, w.base);
    const auto back = log_direction(w.base, v.base);
    const bool forward = std::get<TreeGerm>(ahead.direction) == gv;
    const bool away = std::get<TreeGerm>(back.direction) != gw;
    return forward && away ? 0.0 : std::numbers::pi;
}

std::vector<GeodesicSegment> TreeSpace::search_segments(const Point& center, double radius) const {
    const Point c = canonical(center);
    std::vector<GeodesicSegment> out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const TreePoint start{e, 0.0};
        const TreePoint end{e, edges_[e].length};
        const bool on_edge = c.tree_point().edge == e;
        const double d = on_edge ? 0.0 : std::min(distance(c, Point(start)), distance(c, Point(end)));
        if (d <= radius) out.push_back({Point(start), Point(end)});
    }
    return out;
}

Point TreeSpace::sample_point(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, total_length());
    double r = u(rng);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (r <= edges_[e].length || e + 1 == edges_.size())
            return canonical(Point::tree(e, std::clamp(r, 0.0, edges_[e].length)));
        r -= edges_[e].length;
    }
    return canonical(Point::tree(0, 0.0));
}

std::vector<std::string> TreeSpace::coordinate_names() const { return {"edge", "offset"}; }

std::vector<double> TreeSpace::coordinates(const Point& p) const {
    const Point c = canonical(p);
    return {static_cast<double>(c.tree_point().edge), c.tree_point().offset};
}

Json TreeSpace::point_to_json(const Point& p) const {
    const Point c = canonical(p);
    return Json{{"edge", c.tree_point().edge}, {"offset", c.tree_point().offset}};
}

Point TreeSpace::point_from_json(const Json& j) const {
    if (!j.is_object()) throw ValidationError("tree point must be an object {\"edge\", \"offset\"}");
    for (const auto& [key, _] : j.items())
        if (key != "edge" && key != "offset") throw ValidationError("unknown tree point field '" + key + "'");
    if (!j.contains("edge") || !j["edge"].is_number_integer() || j["edge"].get<long long>() < 0)
        throw ValidationError("tree point field 'edge' must be a nonnegative integer");
    if (!j.contains("offset") || !j["offset"].is_number())
        throw ValidationError("tree point field 'offset' must be a number");
    return canonical(Point::tree(j["edge"].get<std::size_t>(), j["offset"].get<double>()));
}

Json TreeSpace::to_json() const {
    Json edges = Json::array();
    for (const auto& e : edges_) edges.push_back(Json::array({e.u, e.v, e.length}));
    return Json{{"kind", "tree"}, {"edges", edges}};
}

}  // namespace hadflow
