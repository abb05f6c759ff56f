#include <algorithm>
#include <cmath>
#include <limits>

#include "hadflow/pursuit.hpp"
#include "hadflow/resolvent.hpp"

namespace hadflow {

HoelderData pursuit_constants(double R, double T) {
    HoelderData h;
    h.alpha = 0.5;
    h.B = 10.0 * std::sqrt(R) / (std::sqrt(3.0) * T);
    h.B0 = std::min(R, T * T / (100.0 * R));
    return h;
}

namespace {

struct WindowStats {
    double min_lower = 0.0;  // lower bound on min_t d(x, Y_t)
    double max_upper = 0.0;  // upper bound on max_t d(x, Y_t)
};

// d(x, Y_t) is 1-Lipschitz in t, so samples at spacing sigma bound the
// extremes over the window within sigma / 2.
WindowStats window_stats(const MovingTarget& target, const Point& x, double start, double length, double block) {
    const auto n = static_cast<std::size_t>(
        std::clamp(std::ceil(length / std::max(block, 1e-300)), 16.0, 4096.0));
    const double sigma = length / static_cast<double>(n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double d = target.distance(start + sigma * static_cast<double>(i), x);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo - sigma / 2.0, hi + sigma / 2.0};
}

}  // namespace

PursuitResult pursue(const MovingTarget& target, const Point& x0, double t0, double t_end, const Scheme& scheme,
                     const PursuitOptions& options) {
    if (!(t_end >= t0)) throw DomainError("pursuit needs t_end >= t0");
    const Space& space = target.space();
    const DistanceToMovingSet f(target);
    PursuitResult out;
    out.trajectory.scheme = scheme;
    Point x = space.canonical(x0);
    const double horizon = t_end - t0;
    const double gap0 = target.distance(t0, x);
    out.capture_eps = options.capture_eps > 0.0 ? options.capture_eps : 1e-6 * gap0;
    out.trajectory.samples.push_back({t0, x});
    out.gaps.push_back(gap0);

    auto [block, substep] = scheme_steps(scheme, horizon);
    int substeps = static_cast<int>(std::llround(block / substep));
    out.trajectory.block = block;
    out.trajectory.substep = substep;
    if (gap0 <= out.capture_eps) {
        out.capture_time = t0;
        out.trajectory.termination = Termination::captured;
        out.trajectory.termination_time = t0;
        return out;
    }
    if (horizon == 0.0) return out;
    check_resolvent_step(f, substep);

    const auto whole = window_stats(target, x, t0, horizon, block);
    out.R = whole.max_upper;

    double origin = t0;
    std::size_t index = 0;
    double next_restart = t0;
    while (true) {
        const double tau = origin + static_cast<double>(index) * block;
        if (tau >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) break;
        const double len = std::min(block, t_end - tau);

        if (out.existence_verified && tau >= next_restart - 1e-12) {
            double T = t_end - tau;
            bool ok = false;
            WindowStats stats;
            while (T >= block) {
                stats = window_stats(target, x, tau, T, block);
                if (stats.min_lower > 2.0 * T) {
                    ok = true;
                    break;
                }
                T /= 2.0;
            }
            if (ok) {
                const auto c = pursuit_constants(stats.max_upper, T);
                out.segments.push_back({tau, T, stats.max_upper, c.B, c.B0, true});
                if (out.segments.size() == 1) out.constants = c;
                next_restart = tau + T;
            } else {
                const double rest = t_end - tau;
                const auto s = window_stats(target, x, tau, rest, block);
                out.segments.push_back({tau, rest, s.max_upper, 0.0, 0.0, false});
                if (out.segments.size() == 1) out.constants = pursuit_constants(s.max_upper, rest);
                out.existence_verified = false;
                if (std::holds_alternative<Dyadic>(scheme)) {
                    // Continue as euler_proximal at the resolvent step.
                    out.scheme_fallback = true;
                    origin = tau;
                    index = 0;
                    block = substep;
                    substeps = 1;
                    continue;
                }
            }
        }

        const auto contract = motion_contract_check(target, tau, tau + len, options.contract_slack);
        out.hausdorff_exact = out.hausdorff_exact && contract.exact;
        if (!contract.holds)
            throw ContractError("moving target violates d_H(Y_t, Y_t') <= |t - t'| on [" + std::to_string(tau) + ", " +
                                    std::to_string(tau + len) + "]: d_H = " + std::to_string(contract.hausdorff),
                                tau, tau + len);

        const ConvexTarget frozen = target.at(tau);
        const double h = len / substeps;
        for (int j = 0; j < substeps; ++j) {
            const double t_before = tau + j * h;
            const double t_after = j + 1 == substeps ? tau + len : tau + (j + 1) * h;
            const Point next = resolve(f, tau, x, h).point;
            const double travelled = space.distance(x, next);
            x = next;
            if (frozen.distance_to(x) <= out.capture_eps) {
                const double tc = t_before + travelled;
                out.trajectory.samples.push_back({tc, x});
                out.gaps.push_back(target.distance(tc, x));
                out.capture_time = tc;
                out.trajectory.termination = Termination::captured;
                out.trajectory.termination_time = tc;
                return out;
            }
            const double gap = target.distance(t_after, x);
            out.trajectory.samples.push_back({t_after, x});
            out.gaps.push_back(gap);
            if (gap <= out.capture_eps) {
                out.capture_time = t_after;
                out.trajectory.termination = Termination::captured;
                out.trajectory.termination_time = t_after;
                return out;
            }
        }
        ++index;
    }
    return out;
}

FootpointStability footpoint_stability_check(const MovingTarget& target, const Point& p, double t, double t_prime) {
    const Space& space = target.space();
    const Point q = target.footpoint(t, p);
    const Point q2 = target.footpoint(t_prime, p);
    const double dt = std::abs(t - t_prime);
    const double d = space.distance(p, q);
    FootpointStability out;
    out.distance_slack = dt - std::abs(d - space.distance(p, q2));
    const double bound = (std::sqrt(dt) + 2.0 * std::sqrt(d + dt)) * std::sqrt(dt);
    out.footpoint_slack = bound - space.distance(q, q2);
    out.holds = out.distance_slack >= -1e-9 && out.footpoint_slack >= -1e-9;
    return out;
}

Point barycenter(const SpacePtr& space, const std::vector<Point>& points, BarycenterInfo* info) {
    if (points.empty()) throw ValidationError("barycenter needs at least one point");
    const SumSquaredDistances g(space, points);
    auto finish = [&](Point b, int iterations) {
        if (info) {
            info->iterations = iterations;
            info->residual = norm(g.gradient(0.0, b));
        }
        return b;
    };
    if (points.size() == 1) return finish(space->canonical(points.front()), 0);
    if (dynamic_cast<const EuclideanSpace*>(space.get())) {
        Point::Coords mean(points.front().coords().size(), 0.0);
        for (const auto& p : points)
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += p.coords()[i];
        for (auto& m : mean) m /= static_cast<double>(points.size());
        return finish(Point(std::move(mean)), 0);
    }
    Point x = space->canonical(points.front());
    for (int it = 1; it <= 200; ++it) {
        const Point next = resolve(g, 0.0, x, 0.5).point;
        const double step = space->distance(x, next);
        x = next;
        if (step < 1e-10) return finish(x, it);
    }
    throw SolverError("barycenter iteration did not converge within 200 steps", x);
}

MovingTarget barycenter_target(const SpacePtr& space, const EvaderSet& evaders) {
    if (evaders.empty()) throw ValidationError("barycenter pursuit needs at least one evader");
    Json specs = Json::array();
    for (const auto& e : evaders) specs.push_back(e.spec());
    auto curve = [space, evaders](double t) {
        std::vector<Point> pts;
        pts.reserve(evaders.size());
        for (const auto& e : evaders) pts.push_back(std::get<PointShape>(e.at(t).shape()).p);
        return ConvexTarget(space, PointShape{barycenter(space, pts)});
    };
    return MovingTarget(space, "point", curve, Json{{"kind", "barycenter"}, {"evaders", specs}});
}

BarycenterLipschitz barycenter_lipschitz_check(const SpacePtr& space, const EvaderSet& evaders, double t,
                                               double t_prime, double tol) {
    const auto target = barycenter_target(space, evaders);
    const Point b = std::get<PointShape>(target.at(t).shape()).p;
    const Point b2 = std::get<PointShape>(target.at(t_prime).shape()).p;
    BarycenterLipschitz out;
    out.distance = space->distance(b, b2);
    for (const auto& e : evaders)
        out.coupling += space->distance(std::get<PointShape>(e.at(t).shape()).p, std::get<PointShape>(e.at(t_prime).shape()).p);
    out.coupling /= static_cast<double>(evaders.size());
    out.holds = out.distance <= out.coupling + tol && out.distance <= std::abs(t - t_prime) + tol;
    return out;
}

PursuitResult pursue_barycenter(const SpacePtr& space, const EvaderSet& evaders, const Point& x0, double t0,
                                double t_end, const Scheme& scheme, const PursuitOptions& options) {
    return pursue(barycenter_target(space, evaders), x0, t0, t_end, scheme, options);
}

}  // namespace hadflow
