#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hadflow/flow.hpp"
#include "hadflow/functionals.hpp"

namespace hadflow {

struct OracleResult {
    Point point;
    double pitch = 0.0;
    double radius = 0.0;  // search region radius actually used
    double energy = 0.0;
};

// Grid argmin of the step energy. Euclidean/quadrant (dim <= 2): the box of
// half-width `radius` around x0, scanned coarse-to-fine down to pitch / 10.
// Trees: every edge scanned at the pitch, then refined. Products of the line
// with a tree: each edge strip scanned like a flat box. Without an explicit
// radius the region starts at h (|grad| + 1) + pitch and doubles while the
// argmin sits on its boundary; with one, a boundary argmin throws
// RegionTooSmallError.
OracleResult oracle_resolve(const Functional& f, double t0, const Point& x0, double h, double pitch,
                            std::optional<double> radius = std::nullopt);

// euler_proximal at h_ref <= 1e-4 s.
Trajectory reference_trajectory(const Functional& f, double t0, const Point& x0, double s, double h_ref);

// Least-squares slope of log(err) against log(h). Needs >= 3 points with
// positive errors (DataError otherwise).
double convergence_order(const std::vector<std::pair<double, double>>& errors);

}  // namespace hadflow
