#include <algorithm>
#include <cmath>
#include <limits>

#include "hadflow/oracles.hpp"
#include "hadflow/resolvent.hpp"

namespace hadflow {

namespace {

struct GridBest {
    Point point;
    double energy = std::numeric_limits<double>::infinity();
    bool on_boundary = false;
};

// Scan the (2K+1)^dim grid of the given pitch around `center`, clipped to the
// quadrant when needed. Flags an argmin on an unclipped edge of the window.
GridBest scan_box(const Functional& f, double t0, const Point& x0, double h, const Point::Coords& center, double pitch,
                  long K, bool quadrant) {
    const std::size_t dim = center.size();
    GridBest best;
    auto consider = [&](const Point::Coords& c, bool edge) {
        const Point p(c);
        const double e = step_energy(f, t0, x0, h, p);
        if (e < best.energy) {
            best.energy = e;
            best.point = p;
            best.on_boundary = edge;
        }
    };
    auto coord = [&](std::size_t i, long k, bool& edge, bool& valid) {
        double v = center[i] + static_cast<double>(k) * pitch;
        if (quadrant && v < 0.0) {
            valid = false;
            return v;
        }
        if (std::labs(k) == K) edge = true;
        return v;
    };
    if (dim == 1) {
        for (long k = -K; k <= K; ++k) {
            bool edge = false;
            bool valid = true;
            const double v = coord(0, k, edge, valid);
            if (valid) consider({v}, edge);
        }
        return best;
    }
    for (long a = -K; a <= K; ++a) {
        for (long b = -K; b <= K; ++b) {
            bool edge = false;
            bool valid = true;
            const double u = coord(0, a, edge, valid);
            const double v = coord(1, b, edge, valid);
            if (valid) consider({u, v}, edge);
        }
    }
    return best;
}

OracleResult flat_oracle(const Functional& f, double t0, const Point& x0, double h, double pitch, double radius,
                         bool strict) {
    const bool quadrant = f.space().kind() == "quadrant";
    const auto& c0 = x0.coords();
    for (int attempt = 0; attempt < 30; ++attempt) {
        double p = radius / 50.0;
        const long K0 = 50;
        GridBest best = scan_box(f, t0, x0, h, c0, p, K0, quadrant);
        if (best.on_boundary) {
            if (strict) throw RegionTooSmallError("grid oracle argmin lies on the search region boundary");
            radius *= 2.0;
            continue;
        }
        const double target = pitch / 10.0;
        while (p > target) {
            const double next = std::max(p / 5.0, target);
            const long K = static_cast<long>(std::ceil(10.0 * p / next));
            // Recentre while the refined argmin touches the refinement window.
            for (int r = 0; r < 50; ++r) {
                GridBest refined = scan_box(f, t0, x0, h, best.point.coords(), next, K, quadrant);
                const bool moved = refined.energy < best.energy;
                if (moved || refined.energy <= best.energy) best = refined;
                if (!refined.on_boundary) break;
            }
            p = next;
        }
        return OracleResult{best.point, pitch, radius, best.energy};
    }
    throw RegionTooSmallError("grid oracle region could not be inflated to contain the argmin");
}

OracleResult tree_oracle(const Functional& f, const TreeSpace& tree, double t0, const Point& x0, double h,
                         double pitch) {
    Point best_point = x0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
        const double len = tree.edges()[e].length;
        const auto steps = static_cast<long>(std::ceil(len / pitch));
        auto offset = [&](long k) { return std::min(len, static_cast<double>(k) * pitch); };
        long arg = 0;
        double edge_best = std::numeric_limits<double>::infinity();
        for (long k = 0; k <= steps; ++k) {
            const double en = step_energy(f, t0, x0, h, Point::tree(e, offset(k)));
            if (en < edge_best) {
                edge_best = en;
                arg = k;
            }
        }
        // Along one edge the energy is convex, so the minimizer lies within one
        // pitch of the grid argmin.
        double centre = offset(arg);
        double p = pitch;
        while (p > pitch / 10.0) {
            const double next = p / 10.0;
            double local_best = edge_best;
            double local_arg = centre;
            for (int k = -10; k <= 10; ++k) {
                const double s = std::clamp(centre + k * next, 0.0, len);
                const double en = step_energy(f, t0, x0, h, Point::tree(e, s));
                if (en < local_best) {
                    local_best = en;
                    local_arg = s;
                }
            }
            edge_best = local_best;
            centre = local_arg;
            p = next;
        }
        if (edge_best < best_energy) {
            best_energy = edge_best;
            best_point = tree.canonical(Point::tree(e, centre));
        }
    }
    return OracleResult{best_point, pitch, std::numeric_limits<double>::infinity(), best_energy};
}

// Product of the real line with a tree: each tree edge spans a flat strip
// (u, s) with s in [0, length], scanned coarse-to-fine like a flat box.
OracleResult product_oracle(const Functional& f, const ProductSpace& prod, double t0, const Point& x0, double h,
                            double pitch, double radius, bool strict) {
    const auto* left_flat = dynamic_cast<const EuclideanSpace*>(&prod.left());
    const auto* right_flat = dynamic_cast<const EuclideanSpace*>(&prod.right());
    const bool flat_left = left_flat && left_flat->kind() == "euclidean" && left_flat->dim() == 1;
    const bool flat_right = right_flat && right_flat->kind() == "euclidean" && right_flat->dim() == 1;
    const auto* tree = dynamic_cast<const TreeSpace*>(flat_left ? &prod.right() : &prod.left());
    if (!(flat_left || flat_right) || !tree)
        throw CapabilityError("grid oracle supports products of the real line with a tree");
    const double u0 = (flat_left ? x0.left() : x0.right()).coords()[0];
    auto make = [&](double u, std::size_t e, double s) {
        Point a = make_point({u});
        Point b = tree->canonical(Point::tree(e, s));
        return flat_left ? Point(std::move(a), std::move(b)) : Point(std::move(b), std::move(a));
    };
    const double target = pitch / 10.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
        GridBest best;
        bool inflate = false;
        for (std::size_t e = 0; e < tree->edges().size(); ++e) {
            const double len = tree->edges()[e].length;
            GridBest cell;
            double cu = u0;
            double cs = 0.0;
            double cu_best = cu;
            double cs_best = cs;
            // Flags an argmin on a window edge that is not an end of the edge.
            auto scan = [&](double pu, double ps, long Ku, long Ks, bool from_start) {
                GridBest out;
                for (long a = -Ku; a <= Ku; ++a) {
                    for (long b = from_start ? 0 : -Ks; b <= Ks; ++b) {
                        const double u = cu + static_cast<double>(a) * pu;
                        const double sv = cs + static_cast<double>(b) * ps;
                        if (sv < 0.0 || sv > len) continue;
                        const Point p = make(u, e, sv);
                        const double en = step_energy(f, t0, x0, h, p);
                        if (en < out.energy) {
                            out.energy = en;
                            out.point = p;
                            out.on_boundary = std::labs(a) == Ku || (!from_start && std::labs(b) == Ks && sv > 0.0 && sv < len);
                            cu_best = u;
                            cs_best = sv;
                        }
                    }
                }
                return out;
            };
            double pu = radius / 50.0;
            double ps = len / 50.0;
            cell = scan(pu, ps, 50, 50, true);
            if (cell.on_boundary) {
                inflate = true;
                break;
            }
            cu = cu_best;
            cs = cs_best;
            while (pu > target || ps > target) {
                const double nu = std::max(pu / 5.0, target);
                const double ns = std::max(ps / 5.0, target);
                const long Ku = static_cast<long>(std::ceil(10.0 * pu / nu));
                const long Ks = static_cast<long>(std::ceil(10.0 * ps / ns));
                for (int r = 0; r < 50; ++r) {
                    GridBest refined = scan(nu, ns, Ku, Ks, false);
                    if (refined.energy <= cell.energy) {
                        cell = refined;
                        cu = cu_best;
                        cs = cs_best;
                    }
                    if (!refined.on_boundary) break;
                }
                pu = nu;
                ps = ns;
            }
            if (cell.energy < best.energy) best = cell;
        }
        if (inflate) {
            if (strict) throw RegionTooSmallError("grid oracle argmin lies on the search region boundary");
            radius *= 2.0;
            continue;
        }
        return OracleResult{best.point, pitch, radius, best.energy};
    }
    throw RegionTooSmallError("grid oracle region could not be inflated to contain the argmin");
}

}  // namespace

OracleResult oracle_resolve(const Functional& f, double t0, const Point& x0, double h, double pitch,
                            std::optional<double> radius) {
    if (!(pitch > 0.0)) throw UsageError("oracle pitch must be positive");
    check_resolvent_step(f, h);
    const Point cx = f.space().canonical(x0);
    if (const auto* tree = dynamic_cast<const TreeSpace*>(&f.space())) return tree_oracle(f, *tree, t0, cx, h, pitch);
    const double r = radius ? *radius : h * (norm(f.gradient(t0, cx)) + 1.0) + pitch;
    if (const auto* prod = dynamic_cast<const ProductSpace*>(&f.space()))
        return product_oracle(f, *prod, t0, cx, h, pitch, r, radius.has_value());
    const auto* flat = dynamic_cast<const EuclideanSpace*>(&f.space());
    if (!flat || flat->dim() > 2)
        throw CapabilityError("grid oracle supports euclidean dim <= 2, the quadrant, trees, and line-tree products");
    return flat_oracle(f, t0, cx, h, pitch, r, radius.has_value());
}

Trajectory reference_trajectory(const Functional& f, double t0, const Point& x0, double s, double h_ref) {
    if (!(h_ref > 0.0) || h_ref > 1e-4 * s * (1.0 + 1e-12))
        throw UsageError("reference trajectory needs 0 < h_ref <= 1e-4 s");
    return time_dependent_curve(f, t0, x0, s, EulerProximal{h_ref}, CurveOptions{false, true});
}

double convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 3) throw DataError("convergence order needs at least 3 (h, err) points");
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [h, e] : errors) {
        if (!(h > 0.0)) throw DataError("step sizes must be positive");
        if (!(e > 0.0)) throw DataError("errors must be positive to take logarithms");
        mx += std::log(h);
        my += std::log(e);
    }
    const double n = static_cast<double>(errors.size());
    mx /= n;
    my /= n;
    double num = 0.0;
    double den = 0.0;
    for (const auto& [h, e] : errors) {
        num += (std::log(h) - mx) * (std::log(e) - my);
        den += (std::log(h) - mx) * (std::log(h) - mx);
    }
    if (den == 0.0) throw DataError("step sizes must not all be equal");
    return num / den;
}

}  // namespace hadflow
