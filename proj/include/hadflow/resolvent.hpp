#pragma once

#include <string>

#include "hadflow/functionals.hpp"

namespace hadflow {

// E(x) = F(t0, x) + d^2(x0, x) / 2h.
double step_energy(const Functional& f, double t0, const Point& x0, double h, const Point& x);

// Throws StepSizeError unless h > 0, h < -1/(2 lambda) when lambda < 0, and
// h <= 1/(16 A) when the growth bound A is positive.
void check_resolvent_step(const Functional& f, double h);

struct ResolveOptions {
    double tol = 1e-10;
    int max_iter = 200;
    bool allow_closed_form = true;
};

struct ResolveResult {
    Point point;
    std::string method;  // "analytic" or "numeric"
    double tolerance = 0.0;
    double energy = 0.0;
};

// Minimizer J(t0, x0, h) of the step energy.
ResolveResult resolve(const Functional& f, double t0, const Point& x0, double h, const ResolveOptions& options = {});

// Numeric minimization along candidate geodesics (the functional's, or the
// space's search family on a ball that must contain the minimizer), by
// bisection on the sign of the one-sided derivative of E. Throws
// CapabilityError when no candidate family exists and SolverError when the
// iteration cap is hit.
ResolveResult resolve_numeric(const Functional& f, double t0, const Point& x0, double h, double tol = 1e-10,
                              int max_iter = 200);

struct RatioCheck {
    bool holds = true;
    double ratio = 0.0;
    double bound = 0.0;
};

// d(J x, J y) <= (1 + lambda h)^-1 d(x, y), with 1e-9 relative slack plus
// 2 tol additive slack for numeric resolvents.
RatioCheck resolvent_contraction_check(const Functional& f, double t0, const Point& x, const Point& y, double h);

}  // namespace hadflow
