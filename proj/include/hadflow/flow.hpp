#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hadflow/functionals.hpp"
#include "hadflow/resolvent.hpp"

namespace hadflow {

// x_{i+1} = J(t_i, x_i, h), t_{i+1} = t_i + h.
struct EulerProximal {
    double h = 1e-3;
};

// Freeze time on blocks of length s / 2^level and flow the frozen
// functional across each block with `substeps` resolvent steps.
struct Dyadic {
    int level = 10;
    int substeps = 8;
};

using Scheme = std::variant<EulerProximal, Dyadic>;

Json scheme_to_json(const Scheme& scheme);
// {"euler_proximal": {"h": ...}} | {"dyadic": {"n": ..., "m": ...}}
Scheme scheme_from_json(const Json& j);

enum class Termination { completed, singular_locus, captured, step_error };

std::string termination_name(Termination t);

struct Sample {
    double t = 0.0;
    Point x;
};

struct Trajectory {
    std::vector<Sample> samples;
    Scheme scheme;
    double block = 0.0;    // h for euler_proximal, s / 2^n for dyadic
    double substep = 0.0;  // resolvent step
    Termination termination = Termination::completed;
    std::optional<double> termination_time;
    std::string message;

    const Point& final_point() const { return samples.back().x; }
    double final_time() const { return samples.back().t; }
};

// The constant T of the Distance II estimate: 1.25/|lambda| for lambda < 0,
// unbounded otherwise.
double t_est(double lambda);

// Throws StepSizeError unless the resolvent step is admissible and the
// block length is at most B0 and T_est.
void check_scheme_admissible(const Functional& f, double block, double substep);

// x^n_n(s) with x^n_i = J(t0, x^n_{i-1}, s/n). `path` receives all iterates.
Point fixed_time_curve(const Functional& f, double t0, const Point& x0, double s, int n,
                       std::vector<Point>* path = nullptr);

// Phi(t, l, x): the time-t frozen flow for duration l with n steps.
Point flow_map(const Functional& f, double t, double ell, const Point& x, int n);

struct CurveOptions {
    bool stop_at_singular = true;
    bool record_substeps = true;
};

Trajectory time_dependent_curve(const Functional& f, double t0, const Point& x0, double s_total, const Scheme& scheme,
                                const CurveOptions& options = {});

// Block length and resolvent step of a scheme over a horizon s.
std::pair<double, double> scheme_steps(const Scheme& scheme, double s);

// B' s^(1+alpha) 2^(-alpha n) e^(-lambda0 s), B' = B / (1 - 2^-alpha), lambda0 = min(0, lambda).
double dyadic_error_bound(int n, double s, double B, double alpha, double lambda);

// B s e^(-lambda0 s) (s / 2^(n+1))^alpha: consecutive-level distance bound.
double consecutive_level_bound(int n, double s, double B, double alpha, double lambda);

// Ratio d(sigma_1(t0+s), sigma_2(t0+s)) / d(x1, x2) against e^(-lambda s) + 10 h.
RatioCheck contraction_check(const Functional& f, double t0, const Point& x1, const Point& x2, double s,
                             const Scheme& scheme);

struct DistanceIICheck {
    bool holds = true;
    double measured = 0.0;
    double bound = 0.0;
};

// Fixed-time curves frozen at t1 and t2 from x0 (n steps each) against
// 2 B s |t1 - t2|^alpha + slack.
DistanceIICheck distance_II_check(const Functional& f, const Point& x0, double t1, double t2, double s, int n,
                                  double slack = 1e-9);

struct SemigroupCheck {
    bool holds = true;
    // Restart on the same block grid; the scheme is an exact semigroup there.
    double shared_gap = 0.0;
    // Each leg on its own grid at the same level.
    double independent_gap = 0.0;
    double slack = 0.0;
};

SemigroupCheck semigroup_check(const Functional& f, double t0, const Point& x0, double s, double s2,
                               const Scheme& scheme, double slack);

struct RefinementRow {
    int n = 0;
    double measured = 0.0;
    double predicted = 0.0;
};

struct RefinementStudy {
    std::vector<RefinementRow> rows;
    double fitted_order = 0.0;
    double decay_ratio = 0.0;
};

// Consecutive-level distances d(p^n, p^{n+1}) for n in [n_lo, n_hi]. All
// levels share the resolvent step s / (2^(n_hi+1) substeps).
RefinementStudy refinement_study(const Functional& f, double t0, const Point& x0, double s, int n_lo, int n_hi,
                                 int substeps = 8);

}  // namespace hadflow
