#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hadflow/flow.hpp"
#include "hadflow/oracles.hpp"

namespace hadflow {

Json scheme_to_json(const Scheme& scheme) {
    if (const auto* e = std::get_if<EulerProximal>(&scheme)) return Json{{"euler_proximal", {{"h", e->h}}}};
    const auto& d = std::get<Dyadic>(scheme);
    return Json{{"dyadic", {{"n", d.level}, {"m", d.substeps}}}};
}

Scheme scheme_from_json(const Json& j) {
    if (!j.is_object() || j.size() != 1)
        throw ValidationError("field 'scheme' must be {\"euler_proximal\": {\"h\": ...}} or {\"dyadic\": {\"n\": ..., \"m\": ...}}");
    if (j.contains("euler_proximal")) {
        const auto& e = j["euler_proximal"];
        if (!e.is_object()) throw ValidationError("field 'scheme.euler_proximal' must be an object");
        for (const auto& [key, _] : e.items())
            if (key != "h") throw ValidationError("unknown scheme.euler_proximal field '" + key + "'");
        if (!e.contains("h") || !e["h"].is_number() || !(e["h"].get<double>() > 0.0))
            throw ValidationError("field 'scheme.euler_proximal.h' must be a positive number");
        return EulerProximal{e["h"].get<double>()};
    }
    if (j.contains("dyadic")) {
        const auto& d = j["dyadic"];
        if (!d.is_object()) throw ValidationError("field 'scheme.dyadic' must be an object");
        for (const auto& [key, _] : d.items())
            if (key != "n" && key != "m") throw ValidationError("unknown scheme.dyadic field '" + key + "'");
        if (!d.contains("n") || !d["n"].is_number_integer() || d["n"].get<long long>() < 0 || d["n"].get<long long>() > 30)
            throw ValidationError("field 'scheme.dyadic.n' must be an integer in [0, 30]");
        Dyadic out{d["n"].get<int>(), 8};
        if (d.contains("m")) {
            if (!d["m"].is_number_integer() || d["m"].get<long long>() < 1 || d["m"].get<long long>() > 1 << 20)
                throw ValidationError("field 'scheme.dyadic.m' must be a positive integer");
            out.substeps = d["m"].get<int>();
        }
        return out;
    }
    throw ValidationError("field 'scheme' has unknown key '" + j.begin().key() + "'");
}

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::singular_locus: return "singular_locus";
        case Termination::captured: return "captured";
        case Termination::step_error: return "step_error";
    }
    return "completed";
}

double t_est(double lambda) {
    return lambda < 0.0 ? 1.25 / std::abs(lambda) : std::numeric_limits<double>::infinity();
}

void check_scheme_admissible(const Functional& f, double block, double substep) {
    check_resolvent_step(f, substep);
    const double rel = 1.0 + 1e-12;
    if (const auto h = f.hoelder(); h && block > h->B0 * rel)
        throw StepSizeError("block length " + std::to_string(block) + " exceeds B0 = " + std::to_string(h->B0));
    if (block > t_est(f.lambda()) * rel)
        throw StepSizeError("block length " + std::to_string(block) + " exceeds T_est = " + std::to_string(t_est(f.lambda())));
}

Point fixed_time_curve(const Functional& f, double t0, const Point& x0, double s, int n, std::vector<Point>* path) {
    if (n < 1) throw UsageError("fixed-time curve needs n >= 1 steps");
    if (s < 0.0) throw DomainError("fixed-time curve needs s >= 0");
    Point x = f.space().canonical(x0);
    if (path) path->push_back(x);
    if (s == 0.0) return x;
    const double h = s / n;
    check_resolvent_step(f, h);
    for (int i = 0; i < n; ++i) {
        x = resolve(f, t0, x, h).point;
        if (path) path->push_back(x);
    }
    return x;
}

Point flow_map(const Functional& f, double t, double ell, const Point& x, int n) {
    return fixed_time_curve(f, t, x, ell, n);
}

std::pair<double, double> scheme_steps(const Scheme& scheme, double s) {
    if (const auto* e = std::get_if<EulerProximal>(&scheme)) return {e->h, e->h};
    const auto& d = std::get<Dyadic>(scheme);
    const double block = s / std::ldexp(1.0, d.level);
    return {block, block / d.substeps};
}

namespace {

// Shared integrator for both schemes. Block k (k = start ... start + count - 1)
// freezes time at origin + k * block and takes `substeps` resolvent steps;
// euler_proximal is the case substeps = 1 with the final block possibly short.
struct Grid {
    double origin = 0.0;
    std::size_t start = 0;
    std::size_t count = 0;
    double block = 0.0;
    int substeps = 1;
    double last_block = 0.0;  // length of the final block
};

Trajectory integrate(const Functional& f, const Point& x0, const Grid& grid, const Scheme& scheme,
                     const CurveOptions& options) {
    const Space& space = f.space();
    Trajectory traj;
    traj.scheme = scheme;
    traj.block = grid.block;
    traj.substep = grid.block / grid.substeps;
    Point x = space.canonical(x0);
    const double start_time = grid.origin + static_cast<double>(grid.start) * grid.block;
    traj.samples.push_back({start_time, x});
    const bool watch = options.stop_at_singular && f.has_singular_locus();
    TangentVector reference = watch ? f.gradient(start_time, x) : TangentVector::vertex(x);
    bool locus_hit = false;
    for (std::size_t b = 0; b < grid.count; ++b) {
        const std::size_t k = grid.start + b;
        const double tau = grid.origin + static_cast<double>(k) * grid.block;
        const bool last_block = b + 1 == grid.count;
        const double len = last_block ? grid.last_block : grid.block;
        const double h = len / grid.substeps;
        const double next_tau = grid.origin + static_cast<double>(k + 1) * grid.block;
        for (int j = 0; j < grid.substeps; ++j) {
            x = resolve(f, tau, x, h).point;
            const bool block_end = j + 1 == grid.substeps;
            const double t_after = block_end ? (last_block ? tau + len : next_tau) : tau + (j + 1) * h;
            if (options.record_substeps || block_end) traj.samples.push_back({t_after, x});
            if (!watch) continue;
            const double freeze_next = block_end ? t_after : tau;
            if (f.singular(tau, x) || f.singular(freeze_next, x)) locus_hit = true;
            const TangentVector g = f.gradient(freeze_next, x);
            if (!locus_hit) {
                reference = g;
                continue;
            }
            if (space.transported_angle(reference, g) > std::numbers::pi / 4.0 + 1e-9) {
                if (!options.record_substeps && !block_end) traj.samples.push_back({t_after, x});
                traj.termination = Termination::singular_locus;
                traj.termination_time = t_after;
                return traj;
            }
        }
    }
    return traj;
}

Grid grid_for(const Scheme& scheme, double t0, double s) {
    Grid g;
    g.origin = t0;
    if (const auto* e = std::get_if<EulerProximal>(&scheme)) {
        if (!(e->h > 0.0)) throw StepSizeError("euler_proximal step h must be positive");
        g.block = e->h;
        g.substeps = 1;
        const double ratio = s / e->h;
        g.count = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
        g.last_block = s - static_cast<double>(g.count > 0 ? g.count - 1 : 0) * e->h;
        if (g.count > 0 && std::abs(g.last_block - e->h) <= 1e-9 * e->h) g.last_block = e->h;
        return g;
    }
    const auto& d = std::get<Dyadic>(scheme);
    if (d.level < 0 || d.substeps < 1) throw StepSizeError("dyadic scheme needs n >= 0 and m >= 1");
    g.count = std::size_t{1} << d.level;
    g.block = s / static_cast<double>(g.count);
    g.last_block = g.block;
    g.substeps = d.substeps;
    return g;
}

}  // namespace

Trajectory time_dependent_curve(const Functional& f, double t0, const Point& x0, double s_total, const Scheme& scheme,
                                const CurveOptions& options) {
    if (!(s_total >= 0.0) || !std::isfinite(s_total)) throw DomainError("horizon must be a finite number >= 0");
    const Grid grid = grid_for(scheme, t0, s_total);
    if (s_total > 0.0) check_scheme_admissible(f, grid.block, grid.block / grid.substeps);
    if (s_total == 0.0) {
        Trajectory traj;
        traj.scheme = scheme;
        traj.samples.push_back({t0, f.space().canonical(x0)});
        return traj;
    }
    return integrate(f, x0, grid, scheme, options);
}

double dyadic_error_bound(int n, double s, double B, double alpha, double lambda) {
    const double lambda0 = std::min(0.0, lambda);
    const double b_prime = B / (1.0 - std::pow(2.0, -alpha));
    return b_prime * std::pow(s, 1.0 + alpha) * std::pow(2.0, -alpha * n) * std::exp(-lambda0 * s);
}

double consecutive_level_bound(int n, double s, double B, double alpha, double lambda) {
    const double lambda0 = std::min(0.0, lambda);
    return B * s * std::exp(-lambda0 * s) * std::pow(s / std::ldexp(1.0, n + 1), alpha);
}

RatioCheck contraction_check(const Functional& f, double t0, const Point& x1, const Point& x2, double s,
                             const Scheme& scheme) {
    const double d = f.space().distance(x1, x2);
    const double step = scheme_steps(scheme, s).first;
    const double bound = std::exp(-f.lambda() * s) + 10.0 * step;
    const CurveOptions opts{false, false};
    const auto a = time_dependent_curve(f, t0, x1, s, scheme, opts);
    const auto b = time_dependent_curve(f, t0, x2, s, scheme, opts);
    const double dd = f.space().distance(a.final_point(), b.final_point());
    if (d == 0.0) return {dd == 0.0, 0.0, bound};
    const double ratio = dd / d;
    return {ratio <= bound, ratio, bound};
}

DistanceIICheck distance_II_check(const Functional& f, const Point& x0, double t1, double t2, double s, int n,
                                  double slack) {
    const auto h = f.hoelder();
    if (!h) throw CapabilityError("Distance II needs declared Hoelder data for " + f.kind());
    const double dt = std::abs(t1 - t2);
    if (dt > h->B0 * (1.0 + 1e-12)) throw UsageError("Distance II needs |t1 - t2| <= B0");
    if (s > t_est(f.lambda())) throw UsageError("Distance II needs s <= T_est");
    const Point m1 = fixed_time_curve(f, t1, x0, s, n);
    const Point m2 = fixed_time_curve(f, t2, x0, s, n);
    const double measured = f.space().distance(m1, m2);
    const double bound = 2.0 * h->B * s * std::pow(dt, h->alpha);
    return {measured <= bound + slack, measured, bound};
}

SemigroupCheck semigroup_check(const Functional& f, double t0, const Point& x0, double s, double s2,
                               const Scheme& scheme, double slack) {
    if (s < 0.0 || s2 < 0.0) throw DomainError("semigroup check needs s, s2 >= 0");
    const CurveOptions opts{false, false};
    SemigroupCheck out;
    out.slack = slack;
    const double total = s + s2;
    if (total == 0.0) return out;

    // Shared grid: restart the second leg on the block grid of the full run.
    const Grid full = grid_for(scheme, t0, total);
    check_scheme_admissible(f, full.block, full.block / full.substeps);
    const double k_real = s / full.block;
    const auto k = static_cast<std::size_t>(std::llround(k_real));
    if (std::abs(k_real - static_cast<double>(k)) > 1e-9 * std::max(1.0, k_real))
        throw UsageError("semigroup split point must lie on the block grid");
    const auto whole = integrate(f, x0, full, scheme, opts);
    Grid first = full;
    first.count = k;
    first.last_block = full.block;
    const auto leg1 = integrate(f, x0, first, scheme, opts);
    Grid second = full;
    second.start = k;
    second.count = full.count - k;
    const auto leg2 = integrate(f, leg1.final_point(), second, scheme, opts);
    out.shared_gap = f.space().distance(whole.final_point(), leg2.final_point());

    // Independent grids: each leg at the scheme's own resolution.
    const auto a1 = time_dependent_curve(f, t0, x0, s, scheme, opts);
    const auto a2 = time_dependent_curve(f, t0 + s, a1.final_point(), s2, scheme, opts);
    const auto ref = time_dependent_curve(f, t0, x0, total, scheme, opts);
    out.independent_gap = f.space().distance(ref.final_point(), a2.final_point());
    out.holds = out.shared_gap == 0.0 && out.independent_gap <= slack;
    return out;
}

RefinementStudy refinement_study(const Functional& f, double t0, const Point& x0, double s, int n_lo, int n_hi,
                                 int substeps) {
    if (n_lo > n_hi || n_lo < 0) throw UsageError("refinement study needs 0 <= n_lo <= n_hi");
    const auto h = f.hoelder();
    if (!h) throw CapabilityError("refinement study needs declared Hoelder data for " + f.kind());
    const CurveOptions opts{false, false};
    RefinementStudy out;
    if (n_hi > 20 || substeps < 1) throw UsageError("refinement study needs n_hi <= 20 and substeps >= 1");
    // Every level uses the resolvent step of the finest level, so the
    // distances isolate the time-freezing error.
    auto level = [&](int n) {
        const Dyadic d{n, substeps << (n_hi + 1 - n)};
        return time_dependent_curve(f, t0, x0, s, d, opts).final_point();
    };
    Point prev = level(n_lo);
    std::vector<std::pair<double, double>> fit;
    for (int n = n_lo; n <= n_hi; ++n) {
        const Point next = level(n + 1);
        RefinementRow row{n, f.space().distance(prev, next), consecutive_level_bound(n, s, h->B, h->alpha, f.lambda())};
        out.rows.push_back(row);
        fit.emplace_back(s / std::ldexp(1.0, n), row.measured);
        prev = next;
    }
    const bool positive = std::all_of(fit.begin(), fit.end(), [](const auto& p) { return p.second > 0.0; });
    if (fit.size() >= 3 && positive) {
        out.fitted_order = convergence_order(fit);
        out.decay_ratio = std::pow(2.0, -out.fitted_order);
    } else {
        out.fitted_order = std::numeric_limits<double>::quiet_NaN();
        out.decay_ratio = 0.0;
    }
    return out;
}

}  // namespace hadflow
