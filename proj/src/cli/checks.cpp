#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "hadflow/cli.hpp"
#include "hadflow/resolvent.hpp"

namespace hadflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpacePtr plane() { return std::make_shared<EuclideanSpace>(2); }
SpacePtr line() { return std::make_shared<EuclideanSpace>(1); }
SpacePtr quadrant() { return std::make_shared<QuadrantSpace>(); }

SpacePtr catalog_tree() {
    return std::make_shared<TreeSpace>(
        std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.5}, {0, 3, 0.8}, {3, 4, 1.2}, {3, 5, 0.6}});
}

SpacePtr tripod() {
    return std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

SpacePtr product() { return std::make_shared<ProductSpace>(line(), tripod()); }

// Pursuit constants for the Hoelder suite; valid where
// R - T >= d(x, Y_t) > 3T (see hoelder_admissible).
constexpr double kPursuitR = 10.0;
constexpr double kPursuitT = 0.25;

struct MovingKind {
    std::string key;
    MovingTarget target;
};

std::vector<MovingKind> moving_targets() {
    const auto p = plane();
    const auto tr = catalog_tree();
    std::vector<MovingKind> out;
    out.push_back({"point", MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}},
                                                        {2.0, PointShape{make_point({1.2, 1.6})}}})});
    out.push_back({"segment", MovingTarget::keyframed(p, {{0.0, SegmentShape{make_point({0, 0}), make_point({1, 0})}},
                                                          {2.0, SegmentShape{make_point({1, 1}), make_point({2, 1})}}})});
    out.push_back({"ball", MovingTarget::keyframed(p, {{0.0, BallShape{make_point({0, 0}), 1.0}},
                                                       {2.0, BallShape{make_point({1, 0}), 1.5}}})});
    out.push_back({"subtree", MovingTarget::keyframed(
                                  tr, {{0.0, SubtreeShape{{{0, 0.0, 0.3}, {2, 0.0, 0.8}, {3, 0.0, 0.2}}}},
                                       {2.0, SubtreeShape{{{0, 0.0, 0.6}, {2, 0.0, 0.8}, {3, 0.0, 0.5}}}}})});
    return out;
}

// Distance from x to the nearest point where the functional's gradient
// jumps: the MinFunctional diagonal, a target boundary, or a tree vertex.
double kink_distance(const Functional& f, double t, const Point& x);

double vertex_distance(const Space& space, const Point& x) {
    if (const auto* tree = dynamic_cast<const TreeSpace*>(&space)) {
        const auto& tp = x.tree_point();
        const double len = tree->edges()[tp.edge].length;
        return std::min(tp.offset, len - tp.offset);
    }
    if (const auto* prod = dynamic_cast<const ProductSpace*>(&space))
        return std::min(vertex_distance(prod->left(), x.left()), vertex_distance(prod->right(), x.right()));
    return kInf;
}

double kink_distance(const Functional& f, double t, const Point& x) {
    double d = vertex_distance(f.space(), x);
    if (const auto* m = dynamic_cast<const MinFunctional*>(&f)) d = std::min(d, std::abs(m->locus_offset(t, x)) / std::sqrt(2.0));
    if (dynamic_cast<const DistanceToMovingSet*>(&f)) {
        const double v = f.value(t, x);
        if (v > 0.0) d = std::min(d, v);
    }
    if (const auto* w = dynamic_cast<const WeightedSum*>(&f))
        for (const auto& term : w->terms()) d = std::min(d, kink_distance(*term.f, t, x));
    return d;
}

class Tracker {
public:
    Tracker(std::string name, double tol) : tol_(tol) { r_.name = std::move(name); r_.worst_slack = kInf; }
    void add(double slack) {
        ++r_.samples;
        r_.worst_slack = std::min(r_.worst_slack, slack);
        if (!(slack >= -tol_)) r_.holds = false;
    }
    void fail() {
        ++r_.samples;
        r_.holds = false;
    }
    InvariantResult result() const {
        InvariantResult out = r_;
        if (out.samples == 0) out.worst_slack = 0.0;
        return out;
    }

private:
    InvariantResult r_;
    double tol_;
};

struct Context {
    Rng rng;
    SuiteResult out;
    void push(const Tracker& t) { out.invariants.push_back(t.result()); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

std::string space_key(const Space& s) {
    if (const auto* e = dynamic_cast<const EuclideanSpace*>(&s); e && s.kind() == "euclidean")
        return "R" + std::to_string(e->dim());
    return std::string(s.kind());
}

// Random tangent vector at x with length in [0.1, 2].
TangentVector random_tangent(Context& c, const Space& s, const Point& x) {
    for (int i = 0; i < 100; ++i) {
        const auto v = s.log_direction(x, s.sample_point(c.rng));
        if (!v.is_vertex()) return v.unit().scaled(c.uniform(0.1, 2.0));
    }
    return TangentVector::vertex(x);
}

void suite_metric(Context& c) {
    for (const auto& s : catalog_spaces()) {
        const auto k = space_key(*s);
        Tracker sym("symmetry/" + k, 1e-9), tri("triangle/" + k, 1e-9), id("identity/" + k, 1e-9);
        for (int i = 0; i < 1000; ++i) {
            const Point x = s->sample_point(c.rng), y = s->sample_point(c.rng), z = s->sample_point(c.rng);
            const double dxy = s->distance(x, y);
            sym.add(-std::abs(dxy - s->distance(y, x)));
            tri.add(dxy + s->distance(y, z) - s->distance(x, z));
            id.add(-s->distance(x, x));
            if (!(dxy > 0.0) && !approx_equal(s->canonical(x), s->canonical(y), 1e-12)) id.fail();
        }
        c.push(sym);
        c.push(tri);
        c.push(id);
    }
}

void suite_geodesic(Context& c) {
    for (const auto& s : catalog_spaces()) {
        Tracker g("parameterization/" + space_key(*s), 0.0);
        for (int i = 0; i < 1000; ++i) {
            const Point x = s->sample_point(c.rng), y = s->sample_point(c.rng);
            const double a = c.uniform(0, 1), b = c.uniform(0, 1);
            const double d = s->distance(x, y);
            const double gap = std::abs(s->distance(s->geodesic_point(x, y, a), s->geodesic_point(x, y, b)) - std::abs(a - b) * d);
            g.add(1e-9 * std::max(d, 1e-300) - gap);
        }
        c.push(g);
    }
}

void suite_cat0(Context& c) {
    for (const auto& s : catalog_spaces()) {
        const auto k = space_key(*s);
        Tracker q("quadruple/" + k, 1e-9), l48("angle_difference/" + k, 1e-9);
        for (int i = 0; i < 1000; ++i) {
            const Point y = s->sample_point(c.rng), x0 = s->sample_point(c.rng), x1 = s->sample_point(c.rng);
            q.add(cat0_quadruple_check(*s, y, x0, x1, c.uniform(0, 1)).slack);
        }
        for (int i = 0; i < 1000; ++i) {
            const Point x = s->sample_point(c.rng);
            const auto v1 = random_tangent(c, *s, x), v2 = random_tangent(c, *s, x), v3 = random_tangent(c, *s, x);
            if (v3.is_vertex()) continue;
            l48.add(angle_difference_bound_check(v1, v2, v3.unit()).slack);
        }
        c.push(q);
        c.push(l48);
    }
}

void suite_tangent(Context& c) {
    for (const auto& s : catalog_spaces()) {
        const auto k = space_key(*s);
        Tracker self("log_inner/" + k, 0.0), cmp("comparison_angle/" + k, 0.0);
        for (int i = 0; i < 1000; ++i) {
            const Point x = s->sample_point(c.rng), y = s->sample_point(c.rng), z = s->sample_point(c.rng);
            const auto v = s->log_direction(x, y);
            const double a = s->distance(x, y);
            self.add(1e-9 * std::max(1.0, a * a) - std::abs(inner_product(v, v) - a * a));
            // Angles never exceed comparison angles; compared through cosines.
            const double b = s->distance(x, z);
            if (a > 1e-6 && b > 1e-6) {
                const double cc = s->distance(y, z);
                const double cos_cmp = (a * a + b * b - cc * cc) / (2 * a * b);
                const double cos_angle = inner_product(v.unit(), s->log_direction(x, z).unit());
                cmp.add(cos_angle - cos_cmp + 1e-9 * (a * a + b * b + cc * cc) / (2 * a * b));
            }
        }
        c.push(self);
        c.push(cmp);
    }
}

void suite_convexity(Context& c) {
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        Tracker conv("lambda_convexity/" + e.key, 1e-9), pair("gradient_pair/" + e.key, 1e-9);
        for (int i = 0; i < 500; ++i) {
            const double t = c.uniform(0, 1);
            const Point x0 = s.sample_point(c.rng), x1 = s.sample_point(c.rng);
            conv.add(lambda_convexity_check(*e.f, t, x0, x1, c.uniform(0, 1)).slack);
            if (s.distance(x0, x1) > 0.0) pair.add(gradient_pair_inequality_check(*e.f, t, x0, x1).slack);
        }
        c.push(conv);
        c.push(pair);
    }
}

// Sample (t, x) at least `margin` away from the gradient's jump set.
std::pair<double, Point> regular_sample(Context& c, const Functional& f, double margin) {
    for (int i = 0; i < 10000; ++i) {
        const double t = c.uniform(0, 1);
        Point x = f.space().canonical(f.space().sample_point(c.rng));
        if (kink_distance(f, t, x) > margin) return {t, std::move(x)};
    }
    throw SolverError("no regular sample found for " + f.kind(), Point{});
}

void suite_gradient(Context& c) {
    for (const auto& e : catalog_functionals()) {
        Tracker sup("support/" + e.key, 1e-6), self("self_differential/" + e.key, 1e-6);
        for (int i = 0; i < 200; ++i) {
            // The difference quotients use steps up to 2e-3 along w.
            const auto [t, x] = regular_sample(c, *e.f, 0.01);
            const auto w = random_tangent(c, e.f->space(), x);
            const auto r = gradient_support_check(*e.f, t, x, w);
            sup.add(r.support_slack);
            self.add(-r.self_gap);
        }
        c.push(sup);
        c.push(self);
    }
}

// Whether the declared Hoelder data applies at (t, t', x).
bool hoelder_admissible(const Functional& f, double t, double t2, const Point& x) {
    const double dt = std::abs(t - t2);
    if (const auto* m = dynamic_cast<const MinFunctional*>(&f))
        return std::abs(m->locus_offset(t, x)) > dt + 0.1 && std::abs(m->locus_offset(t2, x)) > dt + 0.1;
    if (dynamic_cast<const DistanceToMovingSet*>(&f)) {
        const double d = f.value(t, x);
        return d > 3.0 * kPursuitT && d <= kPursuitR - kPursuitT;
    }
    return true;
}

void suite_hoelder(Context& c) {
    auto entries = catalog_functionals();
    for (const auto& mk : moving_targets())
        entries.push_back({"pursuit_" + mk.key + "/" + space_key(mk.target.space()),
                           std::make_shared<DistanceToMovingSet>(mk.target, pursuit_constants(kPursuitR, kPursuitT))});
    for (const auto& e : entries) {
        const auto data = e.f->hoelder();
        if (!data) continue;
        Tracker hd("hoelder/" + e.key, 1e-9);
        const double max_dt = std::min(data->B0, 0.5);
        for (int i = 0, tries = 0; i < 500 && tries < 100000; ++tries) {
            const double t = c.uniform(0, 1);
            const double t2 = t + c.uniform(0, 1) * max_dt;
            const Point x = e.f->space().canonical(e.f->space().sample_point(c.rng));
            if (t2 == t || !hoelder_admissible(*e.f, t, t2, x)) continue;
            hd.add(data->B - hoelder_ratio(*e.f, *data, x, t, t2));
            ++i;
        }
        c.push(hd);
    }
}

void suite_absgrad(Context& c) {
    const std::vector<double> radii{1e-2, 5e-3, 2.5e-3};
    for (const auto& e : catalog_functionals()) {
        Tracker ag("absolute_gradient/" + e.key, 0.0);
        for (int i = 0; i < 100; ++i) {
            const auto [t, x] = regular_sample(c, *e.f, 0.1);
            const double est = absolute_gradient_estimate(*e.f, t, x, 720, radii, c.rng);
            ag.add(1e-2 - std::abs(est - norm(e.f->gradient(t, x))));
        }
        c.push(ag);
    }
}

void suite_resolvent(Context& c) {
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        Tracker con("contraction/" + e.key, 0.0), desc("energy_descent/" + e.key, 0.0),
            cons("consistency/" + e.key, 0.0);
        for (double h : {0.1, 0.01, 0.001}) {
            for (int i = 0; i < 500; ++i) {
                const double t = c.uniform(0, 1);
                const Point x = s.sample_point(c.rng), y = s.sample_point(c.rng);
                const auto r = resolvent_contraction_check(*e.f, t, x, y, h);
                con.add(r.holds ? std::max(0.0, r.bound - r.ratio) : std::min(r.bound - r.ratio, -1e-300));
                const auto j = resolve(*e.f, t, x, h);
                const double fx = e.f->value(t, x);
                desc.add(1e-12 * (1.0 + std::abs(fx)) + fx - j.energy);
            }
        }
        for (int i = 0; i < 100; ++i) {
            const double t = c.uniform(0, 1);
            const Point x = s.canonical(s.sample_point(c.rng));
            const double g = norm(e.f->gradient(t, x));
            for (double h : {1e-3, 1e-4, 1e-5}) {
                const auto j = resolve(*e.f, t, x, h);
                cons.add(h * g * (1.0 + 1e-9) + j.tolerance + 1e-12 - s.distance(x, j.point));
            }
        }
        c.push(con);
        c.push(desc);
        c.push(cons);
    }
}

void suite_contraction(Context& c) {
    const double h = 0.01;
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        Tracker con("distance_I/" + e.key, 0.0);
        for (int i = 0; i < 200; ++i) {
            const double t = c.uniform(0, 1);
            const auto r = contraction_check(*e.f, t, s.sample_point(c.rng), s.sample_point(c.rng), 1.0, EulerProximal{h});
            con.add(r.bound - r.ratio);
        }
        c.push(con);
    }
}

void suite_footpoint(Context& c) {
    for (const auto& mk : moving_targets()) {
        const Space& s = mk.target.space();
        Tracker dist("distance_stability/" + mk.key, 1e-9), foot("footpoint_stability/" + mk.key, 1e-9),
            pyth("pythagorean/" + mk.key, 1e-9), lipx("lipschitz_x/" + mk.key, 1e-9), lipt("lipschitz_t/" + mk.key, 1e-9);
        for (int i = 0; i < 500; ++i) {
            const Point p = s.canonical(s.sample_point(c.rng));
            const double t = c.uniform(0, 2), t2 = c.uniform(0, 2);
            const auto fs = footpoint_stability_check(mk.target, p, t, t2);
            dist.add(fs.distance_slack);
            foot.add(fs.footpoint_slack);
            const auto y_t = mk.target.at(t);
            const Point q = y_t.footpoint(p);
            const Point y = y_t.sample_member(c.rng);
            const double dpy = s.distance(p, y), dpq = s.distance(p, q), dqy = s.distance(q, y);
            pyth.add((dpy * dpy - dpq * dpq - dqy * dqy) / std::max(1.0, dpy * dpy));
            const Point p2 = s.sample_point(c.rng);
            lipx.add(s.distance(p, p2) - std::abs(y_t.distance_to(p) - y_t.distance_to(p2)));
            lipt.add(std::abs(t - t2) - std::abs(y_t.distance_to(p) - mk.target.distance(t2, p)));
        }
        for (auto* tr : {&dist, &foot, &pyth, &lipx, &lipt}) c.push(*tr);
    }
}

void suite_barycenter(Context& c) {
    const auto p = plane();
    Tracker mean("euclidean_mean", 1e-12), vertex("tripod_vertex", 1e-8), resid("residual", 1e-8),
        lip_plane("lipschitz/R2", 1e-9), lip_tree("lipschitz/tree", 1e-9);
    for (int i = 0; i < 100; ++i) {
        std::vector<Point> pts;
        Point::Coords sum(2, 0.0);
        const int n = 2 + i % 5;
        for (int k = 0; k < n; ++k) {
            pts.push_back(p->sample_point(c.rng));
            sum[0] += pts.back().coords()[0];
            sum[1] += pts.back().coords()[1];
        }
        const Point m = make_point({sum[0] / n, sum[1] / n});
        mean.add(-p->distance(barycenter(p, pts), m));
    }
    const auto tri = tripod();
    const auto* tri_tree = static_cast<const TreeSpace*>(tri.get());
    for (double r : {0.25, 0.5, 1.0}) {
        std::vector<Point> pts;
        for (std::size_t e = 0; e < 3; ++e) pts.push_back(Point::tree(e, r));
        vertex.add(-tri->distance(barycenter(tri, pts), tri_tree->vertex_point(0)));
    }
    const auto tree = catalog_tree();
    for (int i = 0; i < 50; ++i) {
        std::vector<Point> pts;
        for (int k = 0; k < 2 + i % 4; ++k) pts.push_back(tree->sample_point(c.rng));
        BarycenterInfo info;
        barycenter(tree, pts, &info);
        resid.add(-info.residual);
    }
    auto evaders = [&](const SpacePtr& s) {
        EvaderSet out;
        for (int k = 0; k < 2; ++k) {
            std::vector<std::pair<double, TargetShape>> frames;
            Point at = s->sample_point(c.rng);
            for (double t = 0.0; t <= 2.0 + 1e-12; t += 0.5) {
                frames.push_back({t, PointShape{at}});
                // Each keyframe leg is shorter than its duration.
                for (int tries = 0; tries < 1000; ++tries) {
                    const Point next = s->sample_point(c.rng);
                    const double d = s->distance(at, next);
                    if (d > 0.0) {
                        at = s->geodesic_point(at, next, std::min(1.0, 0.45 / d));
                        break;
                    }
                }
            }
            out.push_back(MovingTarget::keyframed(s, std::move(frames)));
        }
        return out;
    };
    for (auto [space, tracker] : {std::pair{p, &lip_plane}, std::pair{tri, &lip_tree}}) {
        const auto ev = evaders(space);
        for (int i = 0; i < 200; ++i) {
            const double t = c.uniform(0, 2), t2 = c.uniform(0, 2);
            const auto r = barycenter_lipschitz_check(space, ev, t, t2);
            tracker->add(std::min(r.coupling - r.distance, std::abs(t - t2) - r.distance));
        }
    }
    for (auto* tr : {&mean, &vertex, &resid, &lip_plane, &lip_tree}) c.push(*tr);
}

// Flow-level invariants: monotone descent, unit speed of distance flows, and
// the dyadic semigroup on a shared grid.
void suite_flow(Context& c) {
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        if (e.f->time_independent()) {
            Tracker mono("monotone_descent/" + e.key, 1e-12);
            for (int i = 0; i < 20; ++i) {
                std::vector<Point> path;
                fixed_time_curve(*e.f, 0.0, s.sample_point(c.rng), 1.0, 50, &path);
                for (std::size_t k = 1; k < path.size(); ++k)
                    mono.add((e.f->value(0, path[k - 1]) - e.f->value(0, path[k])) / (1.0 + std::abs(e.f->value(0, path[k]))));
            }
            c.push(mono);
        }
        if (dynamic_cast<const DistanceToMovingSet*>(e.f.get())) {
            Tracker speed("unit_speed/" + e.key, 0.0);
            const double h = 1e-4;
            for (int i = 0; i < 50; ++i) {
                const auto [t, x] = regular_sample(c, *e.f, 0.1);
                if (e.f->value(t, x) == 0.0) continue;
                const auto j = resolve(*e.f, t, x, h);
                speed.add(1e-3 - std::abs(s.distance(x, j.point) / h - 1.0));
            }
            c.push(speed);
        }
        const Dyadic scheme{6, 2};
        try {
            check_scheme_admissible(*e.f, 1.0 / 64, 1.0 / 128);
        } catch (const StepSizeError&) {
            continue;  // blocks exceed B0; the pursuit semigroup runs in acceptance
        }
        Tracker semi("semigroup/" + e.key, 0.0);
        for (int i = 0; i < 5; ++i) {
            const auto r = semigroup_check(*e.f, 0.0, s.sample_point(c.rng), 0.5, 0.5, scheme, 1e-9);
            semi.add(-r.shared_gap);
        }
        c.push(semi);
    }
}

const std::map<std::string, std::function<void(Context&)>>& suites() {
    static const std::map<std::string, std::function<void(Context&)>> m = {
        {"metric", suite_metric},       {"geodesic", suite_geodesic},       {"cat0", suite_cat0},
        {"tangent", suite_tangent},     {"convexity", suite_convexity},     {"gradient", suite_gradient},
        {"hoelder", suite_hoelder},     {"absgrad", suite_absgrad},         {"resolvent", suite_resolvent},
        {"contraction", suite_contraction}, {"footpoint", suite_footpoint}, {"barycenter", suite_barycenter},
        {"flow", suite_flow}};
    return m;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(std::hash<std::string>{}(name))};
    Context c{Rng(seq), SuiteResult{name, {}}};
    try {
        suites().at(name)(c);
    } catch (const std::exception& e) {
        InvariantResult err{std::string("error: ") + e.what(), 0, 0.0, false};
        c.out.invariants.push_back(err);
    }
    return c.out;
}

}  // namespace

bool SuiteResult::holds() const {
    return std::all_of(invariants.begin(), invariants.end(), [](const auto& r) { return r.holds; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"metric",   "geodesic",    "cat0",      "tangent",    "convexity",
                                                   "gradient", "hoelder",     "absgrad",   "resolvent",  "contraction",
                                                   "footpoint", "barycenter", "flow"};
    return names;
}

std::vector<SuiteResult> run_checks(const std::string& selector, std::uint64_t seed, int jobs) {
    std::vector<std::string> wanted;
    if (selector == "all") wanted = suite_names();
    else if (suites().count(selector)) wanted = {selector};
    else throw ValidationError("unknown check suite '" + selector + "'");
    std::vector<SuiteResult> results(wanted.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < wanted.size();) results[i] = run_suite(wanted[i], seed);
    };
    const auto n = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(wanted.size())));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return results;
}

Json checks_to_json(const std::vector<SuiteResult>& results, std::uint64_t seed) {
    Json suites_json = Json::array();
    bool all = true;
    for (const auto& s : results) {
        Json inv = Json::array();
        for (const auto& r : s.invariants)
            inv.push_back(Json{{"name", r.name}, {"samples", r.samples}, {"worst_slack", r.worst_slack}, {"holds", r.holds}});
        suites_json.push_back(Json{{"suite", s.suite}, {"holds", s.holds()}, {"invariants", inv}});
        all = all && s.holds();
    }
    return Json{{"command", "check"}, {"seed", seed}, {"holds", all}, {"suites", suites_json}};
}

std::vector<SpacePtr> catalog_spaces() { return {plane(), quadrant(), catalog_tree(), product()}; }

std::vector<CatalogEntry> catalog_functionals() {
    const auto r1 = line();
    const auto r2 = plane();
    const auto q = quadrant();
    const auto tree = catalog_tree();
    const auto prod = product();
    auto targets = moving_targets();
    auto drift = std::make_shared<LinearDrift>(r1);
    auto sq1 = std::make_shared<SumSquaredDistances>(r1, std::vector<Point>{make_point({0}), make_point({2})});
    std::vector<CatalogEntry> out;
    out.push_back({"linear_drift/R1", drift});
    out.push_back({"min_coordinate/quadrant", std::make_shared<MinFunctional>(q, false)});
    out.push_back({"moving_min/quadrant", std::make_shared<MinFunctional>(q, true)});
    for (const auto& mk : targets)
        out.push_back({"distance_" + mk.key + "/" + space_key(mk.target.space()),
                       std::make_shared<DistanceToMovingSet>(mk.target)});
    out.push_back({"sum_squared/R1", sq1});
    out.push_back({"sum_squared/R2", std::make_shared<SumSquaredDistances>(
                                         r2, std::vector<Point>{make_point({1, 0}), make_point({-1, 2}), make_point({0, -3})})});
    out.push_back({"sum_squared/tree", std::make_shared<SumSquaredDistances>(
                                           tree, std::vector<Point>{Point::tree(0, 1.0), Point::tree(1, 0.7), Point::tree(3, 1.2)})});
    out.push_back({"sum_squared/product",
                   std::make_shared<SumSquaredDistances>(
                       prod, std::vector<Point>{Point(make_point({0}), Point::tree(0, 1.0)),
                                                Point(make_point({1}), Point::tree(1, 0.5)),
                                                Point(make_point({-2}), Point::tree(2, 0.25))})});
    out.push_back({"weighted_sum/R1", std::make_shared<WeightedSum>(std::vector<WeightedTerm>{{1.0, drift}, {0.5, sq1}})});
    return out;
}

}  // namespace hadflow
