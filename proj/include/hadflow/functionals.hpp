#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hadflow/geometry.hpp"
#include "hadflow/targets.hpp"

namespace hadflow {

// Hoelder continuity of the gradient in time:
// rho(grad(-F_t), grad(-F_t')) <= B |t - t'|^alpha whenever |t - t'| <= B0.
struct HoelderData {
    double B = 0.0;
    double alpha = 1.0;
    double B0 = std::numeric_limits<double>::infinity();
};

struct ResolvedPoint {
    Point point;
    bool exact = true;
    double tolerance = 0.0;
};

// Time-dependent lambda-convex functional F(t, x) on a space.
class Functional {
public:
    explicit Functional(SpacePtr space) : space_(std::move(space)) {}
    virtual ~Functional() = default;

    const Space& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }

    virtual std::string kind() const = 0;
    virtual double value(double t, const Point& x) const = 0;

    // Downward gradient vector grad_x(-F_t); the cone vertex at minima.
    virtual TangentVector gradient(double t, const Point& x) const = 0;

    // One-sided directional derivative (d_x F_t)(w).
    virtual double directional_derivative(double t, const Point& x, const TangentVector& w) const = 0;

    virtual double lambda() const = 0;
    // L with |F(t,x) - F(t',x)| <= L |t - t'|, when globally available.
    virtual std::optional<double> lipschitz_t() const { return std::nullopt; }
    // Lipschitz constant of F_t on the ball B(center, radius).
    virtual double lipschitz_x(double t, const Point& center, double radius) const = 0;
    virtual std::optional<HoelderData> hoelder() const { return std::nullopt; }
    // Growth bound A(t0); zero selects the admissible interval (0, inf).
    virtual double growth() const { return 0.0; }
    virtual bool time_independent() const { return false; }

    // Closed-form minimizer of the step energy, when available.
    virtual std::optional<ResolvedPoint> specialized_resolvent(double t, const Point& x0, double h) const;
    // Geodesics known to contain the step-energy minimizer.
    virtual std::vector<GeodesicSegment> candidate_geodesics(double t, const Point& x0, double h) const;

    // Points where the gradient jumps and curves terminate.
    virtual bool has_singular_locus() const { return false; }
    virtual bool singular(double t, const Point& x) const;

    // True when (d_x F)(w) = -<grad, w> for every w, so gradients of sums
    // are cone sums.
    virtual bool differential_is_linear() const { return false; }

    virtual Json to_json() const = 0;

private:
    SpacePtr space_;
};

using FunctionalPtr = std::shared_ptr<const Functional>;

// F(t, x) = -(t + 1) x on the real line.
class LinearDrift : public Functional {
public:
    explicit LinearDrift(SpacePtr space);
    std::string kind() const override { return "linear_drift"; }
    double value(double t, const Point& x) const override;
    TangentVector gradient(double t, const Point& x) const override;
    double directional_derivative(double t, const Point& x, const TangentVector& w) const override;
    double lambda() const override { return 0.0; }
    double lipschitz_x(double t, const Point&, double) const override { return std::abs(t + 1.0); }
    std::optional<HoelderData> hoelder() const override { return HoelderData{1.0, 1.0}; }
    std::optional<ResolvedPoint> specialized_resolvent(double t, const Point& x0, double h) const override;
    bool differential_is_linear() const override { return true; }
    Json to_json() const override { return Json{{"kind", "linear_drift"}}; }
};

// F(t, x, y) = -min{x - shift(t), y} on the quadrant, with shift(t) = t for
// the moving variant and 0 for the time-independent one.
class MinFunctional : public Functional {
public:
    MinFunctional(SpacePtr space, bool moving);
    std::string kind() const override { return moving_ ? "moving_min" : "min_coordinate"; }
    double value(double t, const Point& x) const override;
    TangentVector gradient(double t, const Point& x) const override;
    double directional_derivative(double t, const Point& x, const TangentVector& w) const override;
    double lambda() const override { return 0.0; }
    std::optional<double> lipschitz_t() const override { return moving_ ? 1.0 : 0.0; }
    double lipschitz_x(double, const Point&, double) const override { return 1.0; }
    // Off the singular locus the gradient is locally constant in t.
    std::optional<HoelderData> hoelder() const override { return HoelderData{moving_ ? 1.0 : 0.0, 1.0}; }
    bool time_independent() const override { return !moving_; }
    std::optional<ResolvedPoint> specialized_resolvent(double t, const Point& x0, double h) const override;
    bool has_singular_locus() const override { return moving_; }
    bool singular(double t, const Point& x) const override;
    // Signed offset y - (x - shift(t)) from the locus.
    double locus_offset(double t, const Point& x) const;
    Json to_json() const override { return Json{{"kind", kind()}}; }

private:
    double shift(double t) const { return moving_ ? t : 0.0; }
    bool moving_;
};

// F(t, p) = d(p, Y_t) for a moving convex target.
class DistanceToMovingSet : public Functional {
public:
    DistanceToMovingSet(MovingTarget target, std::optional<HoelderData> hoelder = std::nullopt);
    std::string kind() const override { return "distance_to_target"; }
    double value(double t, const Point& x) const override;
    TangentVector gradient(double t, const Point& x) const override;
    double directional_derivative(double t, const Point& x, const TangentVector& w) const override;
    double lambda() const override { return 0.0; }
    std::optional<double> lipschitz_t() const override { return 1.0; }
    double lipschitz_x(double, const Point&, double) const override { return 1.0; }
    std::optional<HoelderData> hoelder() const override { return hoelder_; }
    std::optional<ResolvedPoint> specialized_resolvent(double t, const Point& x0, double h) const override;
    std::vector<GeodesicSegment> candidate_geodesics(double t, const Point& x0, double h) const override;
    Json to_json() const override;

    const MovingTarget& target() const { return target_; }
    // Same functional with a numeric-only resolvent, for cross-checks.
    std::shared_ptr<DistanceToMovingSet> without_closed_form() const;

private:
    MovingTarget target_;
    std::optional<HoelderData> hoelder_;
    bool closed_form_ = true;
};

// G(x) = (1/n) sum_i d^2(x, x_i).
class SumSquaredDistances : public Functional {
public:
    SumSquaredDistances(SpacePtr space, std::vector<Point> anchors);
    std::string kind() const override { return "sum_squared"; }
    double value(double t, const Point& x) const override;
    TangentVector gradient(double t, const Point& x) const override;
    double directional_derivative(double t, const Point& x, const TangentVector& w) const override;
    double lambda() const override { return 2.0; }
    std::optional<double> lipschitz_t() const override { return 0.0; }
    double lipschitz_x(double t, const Point& center, double radius) const override;
    std::optional<HoelderData> hoelder() const override { return HoelderData{0.0, 1.0}; }
    bool time_independent() const override { return true; }
    std::optional<ResolvedPoint> specialized_resolvent(double t, const Point& x0, double h) const override;
    bool differential_is_linear() const override { return true; }
    Json to_json() const override;

    const std::vector<Point>& anchors() const { return anchors_; }

private:
    std::vector<Point> anchors_;
};

struct WeightedTerm {
    double weight = 1.0;
    FunctionalPtr f;
};

// sum_i w_i F_i with w_i >= 0 over a shared space.
class WeightedSum : public Functional {
public:
    explicit WeightedSum(std::vector<WeightedTerm> terms);
    std::string kind() const override { return "weighted_sum"; }
    double value(double t, const Point& x) const override;
    TangentVector gradient(double t, const Point& x) const override;
    double directional_derivative(double t, const Point& x, const TangentVector& w) const override;
    double lambda() const override;
    std::optional<double> lipschitz_t() const override;
    double lipschitz_x(double t, const Point& center, double radius) const override;
    std::optional<HoelderData> hoelder() const override;
    double growth() const override;
    bool time_independent() const override;
    bool has_singular_locus() const override;
    bool singular(double t, const Point& x) const override;
    bool differential_is_linear() const override;
    Json to_json() const override;

    const std::vector<WeightedTerm>& terms() const { return terms_; }

private:
    std::vector<WeightedTerm> terms_;
};

FunctionalPtr functional_from_json(SpacePtr space, const Json& j);

// Diagnostics.

// (d_x F_t)(w) by one-sided difference quotients along the germ of w with
// step halving and Richardson extrapolation.
double numeric_directional_derivative(const Functional& f, double t, const Point& x, const TangentVector& w,
                                      double initial_step = 1e-3);

// Slack of F(t, x_s) <= (1-s) F(t, x0) + s F(t, x1) - s(1-s) lambda d^2(x0, x1) / 2.
SlackCheck lambda_convexity_check(const Functional& f, double t, const Point& x0, const Point& x1, double s);

// Slack of <xi1, grad_x(-F_t)> + <xi2, grad_y(-F_t)> >= lambda d(x, y).
SlackCheck gradient_pair_inequality_check(const Functional& f, double t, const Point& x, const Point& y);

// Slack of the support inequality (d_x F)(w) + <grad_x(-F), w> >= 0 with a
// numeric differential, and of (d_x F)(v) = -<v, v> at v = gradient.
struct SupportCheck {
    double support_slack = 0.0;
    double self_gap = 0.0;
};
SupportCheck gradient_support_check(const Functional& f, double t, const Point& x, const TangentVector& w);

// Largest observed rho(grad(-F_t), grad(-F_t')) / |t - t'|^alpha at x.
double hoelder_ratio(const Functional& f, const HoelderData& data, const Point& x, double t, double t_prime);

// Descent slope max_y (F(x) - F(y)) / d(x, y) over `samples` random
// directions at x, stepped to each radius and extrapolated linearly in the
// radius toward 0.
double absolute_gradient_estimate(const Functional& f, double t, const Point& x, std::size_t samples,
                                  const std::vector<double>& radii, Rng& rng);

}  // namespace hadflow
