// Acceptance criteria AC01-AC14. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
//
// usage: acceptance <fixtures.json> <hadflow binary>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <unistd.h>

#include "hadflow/cli.hpp"
#include "hadflow/oracles.hpp"
#include "hadflow/resolvent.hpp"

namespace fs = std::filesystem;
using namespace hadflow;

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects sub-checks of one criterion.
class Criterion {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            if (!failures_.empty()) failures_ += "; ";
            failures_ += what;
        }
    }
    void note(const std::string& s) {
        if (!notes_.empty()) notes_ += ", ";
        notes_ += s;
    }
    Outcome outcome() const { return {pass_, pass_ ? notes_ : failures_}; }

private:
    bool pass_ = true;
    std::string failures_;
    std::string notes_;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

SpacePtr line() { return std::make_shared<EuclideanSpace>(1); }
SpacePtr plane() { return std::make_shared<EuclideanSpace>(2); }
SpacePtr quadrant() { return std::make_shared<QuadrantSpace>(); }
SpacePtr tripod() {
    return std::make_shared<TreeSpace>(std::vector<TreeEdge>{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

double drift_error(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, std::abs(s.x.coords()[0] - (s.t * s.t / 2 + s.t)));
    return worst;
}

Outcome ac01() {
    Criterion c;
    const LinearDrift f(line());
    const double err = drift_error(time_dependent_curve(f, 0, make_point({0}), 2.0, EulerProximal{1e-3}));
    c.expect(err <= 2e-3, "max error " + num(err) + " > 2e-3");
    std::vector<std::pair<double, double>> errors;
    for (double h : {1e-2, 5e-3, 2.5e-3, 1.25e-3})
        errors.push_back({h, drift_error(time_dependent_curve(f, 0, make_point({0}), 2.0, EulerProximal{h}))});
    const double order = convergence_order(errors);
    c.expect(order >= 0.9 && order <= 1.1, "order " + num(order) + " outside [0.9, 1.1]");
    c.note("max error " + num(err));
    c.note("order " + num(order));
    return c.outcome();
}

Outcome ac02() {
    Criterion c;
    const MinFunctional f(quadrant(), false);
    const Point x0 = make_point({1, 0});
    const auto& s = f.space();
    const double d1 = s.distance(fixed_time_curve(f, 0, x0, 0.5, 500), make_point({1, 0.5}));
    const double d2 = s.distance(fixed_time_curve(f, 0, x0, 2.0, 2000), make_point({1.5, 1.5}));
    c.expect(d1 <= 1e-3, "s=0.5 off by " + num(d1));
    c.expect(d2 <= 1e-3, "s=2 off by " + num(d2));
    c.note("s=0.5 off by " + num(d1) + ", s=2 off by " + num(d2));
    return c.outcome();
}

Outcome ac03() {
    Criterion c;
    const MinFunctional f(quadrant(), true);
    const double h = 1e-3;
    const auto below = time_dependent_curve(f, 0, make_point({2, 0.5}), 3.0, EulerProximal{h});
    c.expect(below.termination == Termination::singular_locus, "below-diagonal run did not stop at the locus");
    if (below.termination_time) {
        c.expect(std::abs(*below.termination_time - 0.75) <= 5 * h, "termination at " + num(*below.termination_time));
        c.note("t* = " + num(*below.termination_time));
    }
    const double dend = f.space().distance(below.final_point(), make_point({2, 1.25}));
    c.expect(dend <= 5 * h, "endpoint off by " + num(dend));
    const auto above = time_dependent_curve(f, 0, make_point({0.5, 2}), 3.0, EulerProximal{h});
    c.expect(above.termination == Termination::completed && std::abs(above.final_time() - 3.0) < 1e-12,
             "above-diagonal run terminated early");
    return c.outcome();
}

Outcome ac04(std::uint64_t seed) {
    Criterion c;
    Rng rng(seed);
    double worst_margin = 1.0;
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        for (double h : {0.1, 0.01}) {
            bool ok = true;
            for (int i = 0; i < 500; ++i) {
                const double t = std::uniform_real_distribution<double>(0, 1)(rng);
                const auto r = resolvent_contraction_check(*e.f, t, s.sample_point(rng), s.sample_point(rng), h);
                ok = ok && r.holds;
                if (r.ratio > 0) worst_margin = std::min(worst_margin, r.bound - r.ratio);
            }
            c.expect(ok, e.key + " h=" + num(h));
        }
    }
    c.note("worst bound - ratio " + num(worst_margin));
    return c.outcome();
}

Outcome ac05(std::uint64_t seed) {
    Criterion c;
    Rng rng(seed + 1);
    double worst = kInfinity;
    for (const auto& e : catalog_functionals()) {
        const Space& s = e.f->space();
        bool ok = true;
        for (int i = 0; i < 200; ++i) {
            const double t = std::uniform_real_distribution<double>(0, 1)(rng);
            const auto r = contraction_check(*e.f, t, s.sample_point(rng), s.sample_point(rng), 1.0, EulerProximal{0.01});
            ok = ok && r.holds;
            worst = std::min(worst, r.bound - r.ratio);
        }
        c.expect(ok, e.key);
    }
    c.note("worst bound - ratio " + num(worst));
    return c.outcome();
}

// Unit-speed evader along the x-axis and the pursuit functional on an
// existence window of length T from t_start.
std::shared_ptr<DistanceToMovingSet> ray_pursuit(const Point& x0, double t_start, double T) {
    const auto target = MovingTarget::keyframed(
        plane(), {{0.0, PointShape{make_point({0, 0})}}, {100.0, PointShape{make_point({100, 0})}}});
    double lo = kInfinity;
    double hi = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double d = target.distance(t_start + T * i / 1000.0, x0);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const double sigma = T / 1000.0;
    if (!(lo - sigma / 2 > 2 * T)) throw UsageError("pursuit window violates the existence condition");
    return std::make_shared<DistanceToMovingSet>(target, pursuit_constants(hi + sigma / 2, T));
}

Outcome ac06() {
    Criterion c;
    const Dyadic scheme{10, 4};
    const LinearDrift drift(line());
    const auto sd = semigroup_check(drift, 0, make_point({0}), 0.5, 0.5, scheme, 0.0);
    c.expect(sd.shared_gap == 0.0, "LinearDrift shared gap " + num(sd.shared_gap));
    const MinFunctional mc(quadrant(), false);
    const auto sm = semigroup_check(mc, 0, make_point({1, 0}), 0.5, 0.5, scheme, 1e-3);
    c.expect(sm.shared_gap <= 1e-3 && sm.independent_gap <= 1e-3, "MinCoordinate gap " + num(sm.independent_gap));
    const Point x0 = make_point({0, 5});
    const auto pf = ray_pursuit(x0, 0.0, 2.0);
    const auto sp = semigroup_check(*pf, 0, x0, 0.5, 0.5, scheme, 1e-3);
    c.expect(sp.shared_gap <= 1e-3 && sp.independent_gap <= 1e-3, "pursuit gap " + num(sp.independent_gap));
    c.note("drift " + num(sd.shared_gap) + ", min_coordinate " + num(sm.independent_gap) + ", pursuit " +
           num(sp.independent_gap));
    return c.outcome();
}

Outcome ac07() {
    Criterion c;
    const LinearDrift f(line());
    const auto study = refinement_study(f, 0, make_point({0}), 1.0, 4, 10, 2);
    for (const auto& r : study.rows)
        c.expect(r.measured <= r.predicted, "n=" + std::to_string(r.n) + " measured " + num(r.measured) + " > " +
                                                num(r.predicted));
    c.expect(std::abs(study.decay_ratio - 0.5) <= 0.15 * 0.5, "decay ratio " + num(study.decay_ratio));
    c.note("decay ratio " + num(study.decay_ratio) + ", fitted order " + num(study.fitted_order));
    return c.outcome();
}

Outcome ac08(std::uint64_t seed) {
    Criterion c;
    const LinearDrift drift(line());
    const double s = 0.4;
    const auto d = distance_II_check(drift, make_point({0}), 0.2, 0.5, s, 40, 0.0);
    c.expect(std::abs(d.measured - s * 0.3) <= 1e-12, "LinearDrift measured " + num(d.measured));
    c.expect(d.holds && d.bound == 2 * s * 0.3, "LinearDrift bound");
    Rng rng(seed + 2);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = kInfinity;
    for (int i = 0; i < 100; ++i) {
        const double t1 = 5 * u(rng);
        const double angle = 2 * std::acos(-1.0) * u(rng);
        const double dist = 18 + 7 * u(rng);
        const Point x0 = make_point({t1 + dist * std::cos(angle), dist * std::sin(angle)});
        const auto f = ray_pursuit(x0, t1, dist / 3.2);
        const double t2 = t1 + std::min(0.01, f->hoelder()->B0) * u(rng);
        const double sv = 0.1 * (1.0 - u(rng));
        const auto r = distance_II_check(*f, x0, t1, t2, sv, 50, 1e-12);
        c.expect(r.holds, "pursuit instance " + std::to_string(i));
        worst = std::min(worst, r.bound - r.measured);
    }
    c.note("pursuit worst bound - measured " + num(worst));
    return c.outcome();
}

Outcome suites_outcome(const std::vector<std::string>& names, std::uint64_t seed, std::size_t min_samples) {
    Criterion c;
    std::size_t count = 0;
    for (const auto& name : names) {
        for (const auto& r : run_checks(name, seed)) {
            for (const auto& inv : r.invariants) {
                c.expect(inv.holds, name + ":" + inv.name + " worst slack " + num(inv.worst_slack));
                c.expect(inv.samples >= min_samples, name + ":" + inv.name + " has " + std::to_string(inv.samples) + " samples");
                ++count;
            }
        }
    }
    c.note(std::to_string(count) + " invariants");
    return c.outcome();
}

Outcome ac10(const Json& fixtures) {
    Criterion c;
    const auto p = plane();
    const double h = 1e-3;
    auto monotone = [&](const PursuitResult& r, double step, const std::string& name) {
        for (std::size_t i = 1; i < r.gaps.size(); ++i)
            if (r.gaps[i] > r.gaps[i - 1] + 2 * step) {
                c.expect(false, name + " gap increased at sample " + std::to_string(i));
                return;
            }
    };
    const auto still = pursue(MovingTarget::stationary(ConvexTarget(p, PointShape{make_point({3, 4})})),
                              make_point({0, 0}), 0, 10, EulerProximal{h});
    c.expect(still.capture_time && std::abs(*still.capture_time - 5.0) <= 2 * h, "stationary capture time");
    monotone(still, h, "stationary");
    const auto ray = MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}}, {10.0, PointShape{make_point({10, 0})}}});
    const auto flee = pursue(ray, make_point({-1, 0}), 0, 10, EulerProximal{1e-2});
    double drift = 0.0;
    for (double g : flee.gaps) drift = std::max(drift, std::abs(g - 1.0));
    c.expect(!flee.capture_time && drift <= 1e-6, "ray gap drift " + num(drift));
    monotone(flee, 1e-2, "ray");
    // Evader at speed 1/2 from the origin, pursuer from (0, 5): capture at 20/3.
    const auto half = MovingTarget::keyframed(p, {{0.0, PointShape{make_point({0, 0})}}, {10.0, PointShape{make_point({5, 0})}}});
    const auto chase = pursue(half, make_point({0, 5}), 0, 10, EulerProximal{h});
    monotone(chase, h, "half-speed");
    const double ref = fixtures.at("half_speed_pursuit").at("capture_time").get<double>();
    c.expect(std::abs(ref - 20.0 / 3.0) <= 1e-4, "reference capture " + num(ref));
    c.expect(chase.capture_time && std::abs(*chase.capture_time - ref) <= 2 * h, "half-speed capture time");
    c.note("stationary " + num(still.capture_time.value_or(NAN)) + ", ray drift " + num(drift) + ", half-speed " +
           num(chase.capture_time.value_or(NAN)) + " vs " + num(ref));
    return c.outcome();
}

Outcome ac11(const Json& fixtures, std::uint64_t seed) {
    Outcome o = suites_outcome({"barycenter"}, seed, 1);
    Criterion c;
    const auto tri = tripod();
    const auto& fx = fixtures.at("tripod_barycenter");
    std::vector<Point> pts;
    for (const auto& j : fx.at("points")) pts.push_back(tri->point_from_json(j));
    const Point vertex = static_cast<const TreeSpace&>(*tri).vertex_point(0);
    const Point grid = tri->point_from_json(fx.at("point"));
    const double b = tri->distance(barycenter(tri, pts), vertex);
    c.expect(tri->distance(grid, vertex) <= fx.at("pitch").get<double>(), "grid argmin is not the branch vertex");
    c.expect(b <= 1e-8, "tripod barycenter off by " + num(b));
    const Outcome mine = c.outcome();
    return {o.pass && mine.pass, o.pass ? (mine.pass ? o.detail + ", tripod off by " + num(b) : mine.detail) : o.detail};
}

Outcome ac13(const Json& fixtures) {
    Criterion c;
    const auto entries = catalog_functionals();
    std::map<std::string, FunctionalPtr> by_key;
    for (const auto& e : entries) by_key[e.key] = e.f;
    std::map<std::string, int> counts;
    double worst = 0.0;
    for (const auto& inst : fixtures.at("resolve")) {
        const auto key = inst.at("key").get<std::string>();
        const auto it = by_key.find(key);
        if (it == by_key.end()) {
            c.expect(false, "unknown fixture key " + key);
            continue;
        }
        const Functional& f = *it->second;
        const Point x0 = f.space().point_from_json(inst.at("x0"));
        const double t0 = inst.at("t0").get<double>();
        const double h = inst.at("h").get<double>();
        const double pitch = inst.at("pitch").get<double>();
        const auto r = resolve(f, t0, x0, h);
        const double d = f.space().distance(r.point, f.space().point_from_json(inst.at("point")));
        const double tol = r.method == "numeric" ? r.tolerance : 0.0;
        c.expect(d <= pitch + tol + 1e-12, key + " #" + std::to_string(inst.at("instance").get<int>()) + " off by " + num(d));
        worst = std::max(worst, d / pitch);
        ++counts[key];
    }
    for (const auto& e : entries)
        c.expect(counts[e.key] >= 50, e.key + " has " + std::to_string(counts[e.key]) + " instances");
    c.note(std::to_string(fixtures.at("resolve").size()) + " instances, worst distance " + num(worst) + " pitch");
    return c.outcome();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome ac14(const std::string& binary) {
    Criterion c;
    const fs::path root = fs::temp_directory_path() / ("hadflow_ac14_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    struct Run {
        std::string name;
        std::string args;
        Json config;
        std::vector<std::string> files;
    };
    const Json plane_space{{"kind", "euclidean"}, {"dim", 2}};
    const std::vector<Run> runs = {
        {"flow",
         "flow",
         Json{{"space", {{"kind", "euclidean"}, {"dim", 1}}},
              {"functional", {{"kind", "linear_drift"}}},
              {"x0", {0.0}},
              {"horizon", 2.0},
              {"scheme", {{"dyadic", {{"n", 6}, {"m", 4}}}}}},
         {"report.json", "trajectory.csv"}},
        {"pursue",
         "pursue",
         Json{{"space", plane_space},
              {"target", {{"kind", "point"}, {"keyframes", {{0.0, {0.0, 0.0}}, {10.0, {5.0, 0.0}}}}}},
              {"x0", {0.0, 5.0}},
              {"horizon", 10.0},
              {"scheme", {{"euler_proximal", {{"h", 1e-3}}}}}},
         {"report.json", "trajectory.csv"}},
        {"convergence",
         "convergence",
         Json{{"space", {{"kind", "euclidean"}, {"dim", 1}}},
              {"functional", {{"kind", "linear_drift"}}},
              {"x0", {0.0}},
              {"horizon", 1.0},
              {"levels", {4, 8}},
              {"substeps", 2}},
         {"report.json", "convergence.csv"}},
        {"check", "check cat0", Json(), {"check.json"}},
    };
    for (const auto& run : runs) {
        const fs::path cfg = root / (run.name + ".json");
        if (!run.config.is_null()) std::ofstream(cfg) << run.config.dump();
        std::vector<std::string> outputs[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = root / (run.name + "_" + std::to_string(k));
            std::string cmd = "\"" + binary + "\" " + run.args + " --seed 7 --out \"" + out.string() + "\"";
            if (!run.config.is_null()) cmd += " --config \"" + cfg.string() + "\"";
            cmd += " > \"" + (out.string() + ".stdout") + "\" 2>&1";
            const int rc = std::system(cmd.c_str());
            c.expect(rc == 0, run.name + " exited with " + std::to_string(rc));
            for (const auto& f : run.files) outputs[k].push_back(slurp(out / f));
            outputs[k].push_back(slurp(out.string() + ".stdout"));
        }
        c.expect(outputs[0] == outputs[1], run.name + " outputs differ");
        for (const auto& o : outputs[0]) c.expect(!o.empty(), run.name + " produced an empty output");
    }
    fs::remove_all(root);
    c.note(std::to_string(runs.size()) + " commands byte-identical");
    return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <fixtures.json> <hadflow binary>\n";
        return 2;
    }
    Json fixtures;
    try {
        std::ifstream in(argv[1]);
        fixtures = Json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "cannot read fixtures: " << e.what() << "\n";
        return 2;
    }
    const std::string binary = argv[2];
    const std::uint64_t seed = 7;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC01", [] { return ac01(); }},
        {"AC02", [] { return ac02(); }},
        {"AC03", [] { return ac03(); }},
        {"AC04", [&] { return ac04(seed); }},
        {"AC05", [&] { return ac05(seed); }},
        {"AC06", [] { return ac06(); }},
        {"AC07", [] { return ac07(); }},
        {"AC08", [&] { return ac08(seed); }},
        {"AC09", [&] { return suites_outcome({"footpoint"}, seed, 500); }},
        {"AC10", [&] { return ac10(fixtures); }},
        {"AC11", [&] { return ac11(fixtures, seed); }},
        {"AC12", [&] { return suites_outcome({"metric", "geodesic", "cat0"}, seed, 1000); }},
        {"AC13", [&] { return ac13(fixtures); }},
        {"AC14", [&] { return ac14(binary); }},
    };
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
