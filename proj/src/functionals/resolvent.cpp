#include <algorithm>
#include <cmath>
#include <limits>

#include "hadflow/resolvent.hpp"

namespace hadflow {

double step_energy(const Functional& f, double t0, const Point& x0, double h, const Point& x) {
    const double d = f.space().distance(x0, x);
    return f.value(t0, x) + d * d / (2.0 * h);
}

void check_resolvent_step(const Functional& f, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw StepSizeError("step h must be positive and finite, got " + std::to_string(h));
    const double lambda = f.lambda();
    if (lambda < 0.0 && !(h < -1.0 / (2.0 * lambda)))
        throw StepSizeError("step h = " + std::to_string(h) + " violates h < -1/(2 lambda) = " +
                            std::to_string(-1.0 / (2.0 * lambda)));
    const double a = f.growth();
    if (a > 0.0 && h > 1.0 / (16.0 * a))
        throw StepSizeError("step h = " + std::to_string(h) + " outside the admissible interval (0, 1/(16A)] = (0, " +
                            std::to_string(1.0 / (16.0 * a)) + "]");
}

namespace {

// Right derivative of E at y in the direction of `toward`.
double energy_slope(const Functional& f, double t0, const Point& x0, double h, const Point& y, const Point& toward) {
    const Space& space = f.space();
    const TangentVector w = space.log_direction(y, toward);
    if (w.is_vertex()) return 0.0;
    const TangentVector u = w.unit();
    const double df = f.directional_derivative(t0, y, u);
    return df - inner_product(space.log_direction(y, x0), u) / h;
}

struct SegmentMinimum {
    Point point;
    double energy;
};

SegmentMinimum minimize_on_segment(const Functional& f, double t0, const Point& x0, double h, const GeodesicSegment& seg,
                                   double tol, int max_iter) {
    const Space& space = f.space();
    const double len = space.distance(seg.a, seg.b);
    const Point a = space.canonical(seg.a);
    if (len == 0.0) return {a, step_energy(f, t0, x0, h, a)};
    auto at = [&](double u) { return space.geodesic_point(seg.a, seg.b, u); };
    double lo = 0.0;
    double hi = 1.0;
    if (energy_slope(f, t0, x0, h, a, seg.b) >= 0.0) {
        hi = 0.0;
    } else {
        int it = 0;
        while ((hi - lo) * len > tol) {
            if (++it > max_iter) {
                const Point best = at(0.5 * (lo + hi));
                throw SolverError("numeric resolvent did not converge within " + std::to_string(max_iter) + " iterations",
                                  best);
            }
            const double mid = 0.5 * (lo + hi);
            if (energy_slope(f, t0, x0, h, at(mid), seg.b) < 0.0) lo = mid;
            else hi = mid;
        }
    }
    SegmentMinimum best{at(hi), 0.0};
    best.energy = step_energy(f, t0, x0, h, best.point);
    if (lo != hi) {
        const Point p = at(lo);
        const double e = step_energy(f, t0, x0, h, p);
        if (e < best.energy) best = {p, e};
    }
    return best;
}

}  // namespace

ResolveResult resolve_numeric(const Functional& f, double t0, const Point& x0, double h, double tol, int max_iter) {
    const Space& space = f.space();
    const Point cx = space.canonical(x0);
    auto segments = f.candidate_geodesics(t0, cx, h);
    if (segments.empty()) {
        // |J - x0| <= 2 h |grad| / (1 + lambda h) bounds the displacement of the
        // proximal step; widen with the local Lipschitz constant.
        const double g = norm(f.gradient(t0, cx));
        const double lip = f.lipschitz_x(t0, cx, 2.0 * h * std::max(g, 1.0));
        const double factor = std::max(1e-3, 1.0 + std::min(0.0, f.lambda()) * h);
        const double radius = 2.0 * h * std::max(g, lip) / factor + 1e-12;
        segments = space.search_segments(cx, radius);
    }
    if (segments.empty())
        throw CapabilityError("no candidate geodesic for a numeric resolvent of " + f.kind() + " on " +
                              std::string(space.kind()));
    SegmentMinimum best{cx, step_energy(f, t0, cx, h, cx)};
    for (const auto& seg : segments) {
        const auto m = minimize_on_segment(f, t0, cx, h, seg, tol, max_iter);
        if (m.energy < best.energy) best = m;
    }
    return ResolveResult{best.point, "numeric", tol, best.energy};
}

ResolveResult resolve(const Functional& f, double t0, const Point& x0, double h, const ResolveOptions& options) {
    check_resolvent_step(f, h);
    const Point cx = f.space().canonical(x0);
    if (options.allow_closed_form) {
        if (auto r = f.specialized_resolvent(t0, cx, h)) {
            const Point p = f.space().canonical(r->point);
            return ResolveResult{p, r->exact ? "analytic" : "numeric", r->tolerance, step_energy(f, t0, cx, h, p)};
        }
    }
    return resolve_numeric(f, t0, cx, h, options.tol, options.max_iter);
}

RatioCheck resolvent_contraction_check(const Functional& f, double t0, const Point& x, const Point& y, double h) {
    const Space& space = f.space();
    const double bound = 1.0 / (1.0 + f.lambda() * h);
    const double d = space.distance(x, y);
    const auto jx = resolve(f, t0, x, h);
    const auto jy = resolve(f, t0, y, h);
    const double dj = space.distance(jx.point, jy.point);
    if (d == 0.0) return {dj == 0.0, 0.0, bound};
    const double slack = (jx.method == "numeric" ? jx.tolerance : 0.0) + (jy.method == "numeric" ? jy.tolerance : 0.0);
    return {dj <= bound * d * (1.0 + 1e-9) + slack, dj / d, bound};
}

}  // namespace hadflow
