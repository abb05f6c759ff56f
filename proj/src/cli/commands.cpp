#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hadflow/cli.hpp"
#include "hadflow/oracles.hpp"
#include "hadflow/resolvent.hpp"

namespace hadflow {

namespace {

template <typename T>
const T& require(const std::optional<T>& v, const std::string& field, const std::string& command) {
    if (!v) throw ValidationError(command + " needs field '" + field + "'");
    return *v;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json constants_json(const Functional& f) {
    const double lambda = f.lambda();
    Json c{{"lambda", lambda}, {"lambda0", std::min(0.0, lambda)}};
    if (const auto h = f.hoelder()) {
        c["B"] = h->B;
        c["alpha"] = h->alpha;
        c["B0"] = finite_or_null(h->B0);
        c["Bprime"] = h->B / (1.0 - std::pow(2.0, -h->alpha));
    } else {
        c["B"] = c["alpha"] = c["B0"] = c["Bprime"] = nullptr;
    }
    return c;
}

void scheme_fields(Json& report, const Scheme& scheme) {
    report["scheme"] = std::holds_alternative<Dyadic>(scheme) ? "dyadic" : "euler_proximal";
    if (const auto* d = std::get_if<Dyadic>(&scheme)) {
        report["n"] = d->level;
        report["m"] = d->substeps;
    } else {
        report["h"] = std::get<EulerProximal>(scheme).h;
    }
}

void termination_fields(Json& report, const Trajectory& traj) {
    report["termination"] = termination_name(traj.termination);
    report["termination_time"] = traj.termination_time ? Json(*traj.termination_time) : Json(nullptr);
}

std::string header(const Space& space, const std::string& tail) {
    std::string out = "t";
    for (const auto& name : space.coordinate_names()) out += "," + name;
    return out + "," + tail + "\n";
}

void row(std::ostringstream& os, double t, const std::vector<double>& coords, std::initializer_list<double> tail) {
    os << format_double(t);
    for (double c : coords) os << ',' << format_double(c);
    for (double v : tail) os << ',' << format_double(v);
    os << '\n';
}

CommandOutput pursuit_output(const std::string& command, const Scenario& s, const PursuitResult& r) {
    const Space& space = *s.space;
    std::ostringstream csv;
    csv << header(space, "gap");
    for (std::size_t i = 0; i < r.trajectory.samples.size(); ++i) {
        const auto& smp = r.trajectory.samples[i];
        row(csv, smp.t, space.coordinates(smp.x), {r.gaps[i]});
    }
    Json report{{"command", command}};
    scheme_fields(report, r.trajectory.scheme);
    termination_fields(report, r.trajectory);
    report["capture_time"] = r.capture_time ? Json(*r.capture_time) : Json(nullptr);
    report["capture_eps"] = r.capture_eps;
    report["R"] = r.R;
    report["constants"] = Json{{"lambda", 0.0}, {"lambda0", 0.0}, {"B", r.constants.B},
                               {"alpha", r.constants.alpha}, {"B0", finite_or_null(r.constants.B0)}};
    Json segs = Json::array();
    for (const auto& seg : r.segments)
        segs.push_back(Json{{"start", seg.start}, {"T", seg.T}, {"R", seg.R}, {"B", seg.B}, {"B0", seg.B0},
                            {"verified", seg.verified}});
    report["segments"] = segs;
    report["existence_condition"] = r.existence_verified ? "verified" : "existence condition unverified";
    report["scheme_fallback"] = r.scheme_fallback;
    report["hausdorff"] = r.hausdorff_exact ? "exact" : "approximate";
    const auto& last = r.trajectory.samples.back();
    report["final_time"] = last.t;
    report["final_point"] = space.point_to_json(last.x);
    report["final_gap"] = r.gaps.back();
    report["samples"] = r.trajectory.samples.size();
    return CommandOutput{0, report, csv.str(), s.trajectory_file};
}

}  // namespace

CommandOutput cmd_flow(const Scenario& s) {
    if (!s.functional) throw ValidationError("flow needs field 'functional'");
    const Functional& f = *s.functional;
    const Point& x0 = require(s.x0, "x0", "flow");
    const double horizon = require(s.horizon, "horizon", "flow");
    const Scheme& scheme = require(s.scheme, "scheme", "flow");
    const auto traj = time_dependent_curve(f, s.t0, x0, horizon, scheme);

    std::ostringstream csv;
    csv << header(f.space(), "F,grad_norm");
    for (const auto& smp : traj.samples)
        row(csv, smp.t, f.space().coordinates(smp.x), {f.value(smp.t, smp.x), norm(f.gradient(smp.t, smp.x))});

    Json report{{"command", "flow"}, {"functional", f.kind()}};
    scheme_fields(report, scheme);
    const auto [block, substep] = scheme_steps(scheme, horizon);
    report["block"] = block;
    report["substep"] = substep;
    report["constants"] = constants_json(f);
    termination_fields(report, traj);
    const auto h = f.hoelder();
    if (const auto* d = std::get_if<Dyadic>(&scheme); d && h)
        report["error_bound"] = dyadic_error_bound(d->level, horizon, h->B, h->alpha, f.lambda());
    else
        report["error_bound"] = nullptr;
    report["final_time"] = traj.samples.back().t;
    report["final_point"] = f.space().point_to_json(traj.samples.back().x);
    report["samples"] = traj.samples.size();
    return CommandOutput{0, report, csv.str(), s.trajectory_file};
}

CommandOutput cmd_pursue(const Scenario& s) {
    if (!s.target) {
        if (!s.evaders.empty()) throw ValidationError("pursue needs field 'target'; evader sets run under 'barycenter'");
        throw ValidationError("pursue needs field 'target'");
    }
    const Point& x0 = require(s.x0, "x0", "pursue");
    const double horizon = require(s.horizon, "horizon", "pursue");
    const Scheme& scheme = require(s.scheme, "scheme", "pursue");
    const auto r = pursue(*s.target, x0, s.t0, s.t0 + horizon, scheme, PursuitOptions{s.capture_eps});
    return pursuit_output("pursue", s, r);
}

CommandOutput cmd_barycenter(const Scenario& s) {
    const bool has_points = !s.points.empty();
    const bool has_evaders = !s.evaders.empty();
    if (has_points == has_evaders) throw ValidationError("barycenter needs exactly one of fields 'points' or 'evaders'");
    if (has_points) {
        BarycenterInfo info;
        const Point b = barycenter(s.space, s.points, &info);
        Json report{{"command", "barycenter"},
                    {"barycenter", s.space->point_to_json(b)},
                    {"iterations", info.iterations},
                    {"residual", info.residual}};
        return CommandOutput{0, report, "", ""};
    }
    const Point& x0 = require(s.x0, "x0", "barycenter");
    const double horizon = require(s.horizon, "horizon", "barycenter");
    const Scheme& scheme = require(s.scheme, "scheme", "barycenter");
    const auto r = pursue_barycenter(s.space, s.evaders, x0, s.t0, s.t0 + horizon, scheme, PursuitOptions{s.capture_eps});
    return pursuit_output("barycenter", s, r);
}

CommandOutput cmd_convergence(const Scenario& s) {
    const Point& x0 = require(s.x0, "x0", "convergence");
    const double horizon = require(s.horizon, "horizon", "convergence");
    if (!(horizon > 0.0)) throw ValidationError("convergence needs a positive 'horizon'");
    const auto [n_lo, n_hi] = s.levels.value_or(std::pair<int, int>{4, 10});
    FunctionalPtr f = s.functional;
    Json report{{"command", "convergence"}};
    if (!f) {
        if (!s.target) throw ValidationError("convergence needs field 'functional' or 'target'");
        // Pursuit functional on [t0, t0 + horizon]: constants from the sampled
        // window, the distance being 1-Lipschitz in t.
        const std::size_t n = 4096;
        const double sigma = horizon / n;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double d = s.target->distance(s.t0 + sigma * i, x0);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const auto c = pursuit_constants(hi + sigma / 2, horizon);
        report["existence_condition"] = lo - sigma / 2 > 2.0 * horizon ? "verified" : "existence condition unverified";
        f = std::make_shared<DistanceToMovingSet>(*s.target, c);
    }
    const auto study = refinement_study(*f, s.t0, x0, horizon, n_lo, n_hi, s.substeps);
    std::ostringstream csv;
    csv << "n,measured,predicted,ratio\n";
    bool within = true;
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& r = study.rows[i];
        within = within && r.measured <= r.predicted;
        csv << r.n << ',' << format_double(r.measured) << ',' << format_double(r.predicted) << ',';
        if (i > 0 && study.rows[i - 1].measured > 0.0) csv << format_double(r.measured / study.rows[i - 1].measured);
        csv << '\n';
    }
    report["functional"] = f->kind();
    report["levels"] = Json::array({n_lo, n_hi});
    report["substeps"] = s.substeps;
    report["constants"] = constants_json(*f);
    report["fitted_order"] = finite_or_null(study.fitted_order);
    report["decay_ratio"] = study.decay_ratio;
    report["within_bound"] = within;
    return CommandOutput{0, report, csv.str(), s.table_file};
}

CommandOutput cmd_resolve(const Scenario& s) {
    if (!s.functional) throw ValidationError("resolve needs field 'functional'");
    const Functional& f = *s.functional;
    const Point& x0 = require(s.x0, "x0", "resolve");
    const double h = require(s.h, "h", "resolve");
    const auto r = resolve(f, s.t0, x0, h);
    Json report{{"command", "resolve"},
                {"functional", f.kind()},
                {"point", f.space().point_to_json(r.point)},
                {"method", r.method},
                {"energy", r.energy},
                {"tolerance", r.tolerance},
                {"displacement", f.space().distance(x0, r.point)}};
    if (s.pitch) {
        const auto o = oracle_resolve(f, s.t0, x0, h, *s.pitch);
        report["oracle"] = Json{{"point", f.space().point_to_json(o.point)},
                                {"pitch", o.pitch},
                                {"distance", f.space().distance(o.point, r.point)}};
    }
    return CommandOutput{0, report, "", ""};
}

}  // namespace hadflow
