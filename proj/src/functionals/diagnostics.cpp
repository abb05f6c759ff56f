#include <algorithm>
#include <cmath>
#include <optional>

#include "hadflow/functionals.hpp"

namespace hadflow {

double numeric_directional_derivative(const Functional& f, double t, const Point& x, const TangentVector& w,
                                      double initial_step) {
    if (w.is_vertex()) return 0.0;
    const Space& space = f.space();
    const Point cx = space.canonical(x);
    TangentVector u = w.unit();
    u.base = cx;
    const double fx = f.value(t, cx);
    // Shrink the step until the germ stays straight (tree edges end).
    double eps = initial_step;
    for (int k = 0; k < 60; ++k) {
        const Point p = space.exp_step(u.scaled(eps));
        if (space.distance(cx, p) >= eps * (1.0 - 1e-12)) break;
        eps /= 2.0;
    }
    auto quotient = [&](double e) { return (f.value(t, space.exp_step(u.scaled(e))) - fx) / e; };
    const double q1 = quotient(eps);
    const double q2 = quotient(eps / 2.0);
    const double q3 = quotient(eps / 4.0);
    // Two Richardson levels for a first-order error expansion.
    const double r1 = 2.0 * q2 - q1;
    const double r2 = 2.0 * q3 - q2;
    const double r = (4.0 * r2 - r1) / 3.0;
    return w.length * r;
}

SlackCheck lambda_convexity_check(const Functional& f, double t, const Point& x0, const Point& x1, double s) {
    const Space& space = f.space();
    const Point xs = space.geodesic_point(x0, x1, s);
    const double d = space.distance(x0, x1);
    const double rhs = (1.0 - s) * f.value(t, x0) + s * f.value(t, x1) - s * (1.0 - s) * f.lambda() * d * d / 2.0;
    const double slack = rhs - f.value(t, xs);
    return {slack >= -1e-9, slack};
}

SlackCheck gradient_pair_inequality_check(const Functional& f, double t, const Point& x, const Point& y) {
    const Space& space = f.space();
    const Point cx = space.canonical(x);
    const Point cy = space.canonical(y);
    const double d = space.distance(cx, cy);
    if (d == 0.0) throw DomainError("gradient pair inequality needs x != y");
    const TangentVector xi1 = space.log_direction(cx, cy).unit();
    const TangentVector xi2 = space.log_direction(cy, cx).unit();
    TangentVector gx = f.gradient(t, cx);
    TangentVector gy = f.gradient(t, cy);
    gx.base = cx;
    gy.base = cy;
    const double lhs = inner_product(xi1, gx) + inner_product(xi2, gy);
    const double slack = lhs - f.lambda() * d;
    return {slack >= -1e-9, slack};
}

SupportCheck gradient_support_check(const Functional& f, double t, const Point& x, const TangentVector& w) {
    const Point cx = f.space().canonical(x);
    TangentVector g = f.gradient(t, cx);
    g.base = cx;
    TangentVector rw = w;
    rw.base = cx;
    SupportCheck out;
    out.support_slack = numeric_directional_derivative(f, t, cx, rw) + inner_product(g, rw);
    out.self_gap = std::abs(numeric_directional_derivative(f, t, cx, g) + inner_product(g, g));
    return out;
}

double hoelder_ratio(const Functional& f, const HoelderData& data, const Point& x, double t, double t_prime) {
    const double dt = std::abs(t - t_prime);
    if (dt == 0.0) return 0.0;
    const Point cx = f.space().canonical(x);
    TangentVector a = f.gradient(t, cx);
    TangentVector b = f.gradient(t_prime, cx);
    a.base = cx;
    b.base = cx;
    return cone_distance(a, b) / std::pow(dt, data.alpha);
}

namespace {

// A random direction at a point: a unit vector on flat spaces, a germ on
// trees, an angle split between the factors of a product.
struct LocalDirection {
    std::vector<double> unit;
    TreeGerm germ;
    double phi = 0.0;
    std::vector<LocalDirection> parts;
};

LocalDirection random_direction(const Space& space, const Point& x, Rng& rng) {
    LocalDirection d;
    if (const auto* tree = dynamic_cast<const TreeSpace*>(&space)) {
        const auto germs = tree->germs_at(x);
        d.germ = germs[std::uniform_int_distribution<std::size_t>(0, germs.size() - 1)(rng)];
    } else if (const auto* prod = dynamic_cast<const ProductSpace*>(&space)) {
        d.phi = std::uniform_real_distribution<double>(0.0, std::acos(0.0))(rng);
        d.parts = {random_direction(prod->left(), x.left(), rng), random_direction(prod->right(), x.right(), rng)};
    } else {
        std::normal_distribution<double> gauss;
        double n = 0.0;
        while (n == 0.0) {
            d.unit.assign(x.coords().size(), 0.0);
            n = 0.0;
            for (auto& c : d.unit) {
                c = gauss(rng);
                n += c * c;
            }
        }
        for (auto& c : d.unit) c /= std::sqrt(n);
    }
    return d;
}

// The point at distance r from x along d, or nullopt when it leaves the space.
std::optional<Point> step_along(const Space& space, const Point& x, const LocalDirection& d, double r) {
    if (const auto* tree = dynamic_cast<const TreeSpace*>(&space))
        return tree->exp_step(TangentVector{x, d.germ, r});
    if (const auto* prod = dynamic_cast<const ProductSpace*>(&space)) {
        auto l = step_along(prod->left(), x.left(), d.parts[0], r * std::cos(d.phi));
        auto rt = step_along(prod->right(), x.right(), d.parts[1], r * std::sin(d.phi));
        if (!l || !rt) return std::nullopt;
        return Point(std::move(*l), std::move(*rt));
    }
    Point::Coords c = x.coords();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += r * d.unit[i];
    Point y(std::move(c));
    try {
        space.validate(y);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
    return y;
}

}  // namespace

double absolute_gradient_estimate(const Functional& f, double t, const Point& x, std::size_t samples,
                                  const std::vector<double>& radii, Rng& rng) {
    if (radii.empty()) throw UsageError("radius schedule must be nonempty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw UsageError("radii must be positive");
        if (i > 0 && !(radii[i] < radii[i - 1])) throw UsageError("radii must be strictly decreasing");
    }
    const Space& space = f.space();
    const Point cx = space.canonical(x);
    const double fx = f.value(t, cx);
    // One shared set of directions across radii keeps the estimates smooth in r.
    std::vector<LocalDirection> dirs;
    for (std::size_t k = 0; k < samples; ++k) dirs.push_back(random_direction(space, cx, rng));
    std::vector<double> slopes;
    for (double r : radii) {
        double best = 0.0;
        for (const auto& dir : dirs) {
            const auto y = step_along(space, cx, dir, r);
            if (!y) continue;
            const double dy = space.distance(cx, *y);
            if (dy == 0.0) continue;
            best = std::max(best, (fx - f.value(t, *y)) / dy);
        }
        slopes.push_back(best);
    }
    if (radii.size() == 1) return slopes.front();
    // Least-squares line in r, evaluated at r = 0.
    double mr = 0.0;
    double ms = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        mr += radii[i];
        ms += slopes[i];
    }
    mr /= static_cast<double>(radii.size());
    ms /= static_cast<double>(radii.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        num += (radii[i] - mr) * (slopes[i] - ms);
        den += (radii[i] - mr) * (radii[i] - mr);
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    return std::max(0.0, ms - slope * mr);
}

}  // namespace hadflow
