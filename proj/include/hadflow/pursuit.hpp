#pragma once

#include <optional>
#include <vector>

#include "hadflow/flow.hpp"
#include "hadflow/functionals.hpp"
#include "hadflow/targets.hpp"

namespace hadflow {

// Existence-interval bookkeeping for one restart of the pursuit curve from
// x_k at time `start`: min_{t in [start, start+T]} d(x_k, Y_t) > 2T.
struct PursuitSegment {
    double start = 0.0;
    double T = 0.0;
    double R = 0.0;
    double B = 0.0;
    double B0 = 0.0;
    bool verified = true;
};

// Constants of the distance functional on an existence interval of length T
// with R = max_t d(x, Y_t): alpha = 1/2, B = 10 sqrt(R) / (sqrt(3) T),
// B0 = min(R, T^2 / (100 R)).
HoelderData pursuit_constants(double R, double T);

struct PursuitOptions {
    // Capture threshold; <= 0 selects 1e-6 times the initial gap.
    double capture_eps = 0.0;
    double contract_slack = 1e-6;
};

struct PursuitResult {
    Trajectory trajectory;
    std::vector<double> gaps;  // d(P(t), Y_t) per sample
    std::optional<double> capture_time;
    double capture_eps = 0.0;
    double R = 0.0;  // max_t d(x0, Y_t) over the horizon
    HoelderData constants;
    std::vector<PursuitSegment> segments;
    bool existence_verified = true;
    bool scheme_fallback = false;
    bool hausdorff_exact = true;
};

// Simple pursuit curve of Y_t from x0 over [t0, t_end]: the time-dependent
// gradient curve of F(t, p) = d(p, Y_t). Throws ContractError when
// d_H(Y_t, Y_t') > |t - t'| on a block of the scheme.
PursuitResult pursue(const MovingTarget& target, const Point& x0, double t0, double t_end, const Scheme& scheme,
                     const PursuitOptions& options = {});

struct FootpointStability {
    bool holds = true;
    double distance_slack = 0.0;   // |t - t'| - |d(p, q_t) - d(p, q_t')|
    double footpoint_slack = 0.0;  // bound - d(q_t, q_t')
};

FootpointStability footpoint_stability_check(const MovingTarget& target, const Point& p, double t, double t_prime);

struct BarycenterInfo {
    int iterations = 0;
    double residual = 0.0;  // gradient norm at the result
};

// Minimizer of (1/n) sum d^2(., x_i): the mean on flat spaces, otherwise the
// fixed point of the resolvent with h = 0.5 (step < 1e-10, cap 200).
Point barycenter(const SpacePtr& space, const std::vector<Point>& points, BarycenterInfo* info = nullptr);

// The moving point target b(t) = barycenter of E_i(t).
MovingTarget barycenter_target(const SpacePtr& space, const EvaderSet& evaders);

struct BarycenterLipschitz {
    bool holds = true;
    double distance = 0.0;   // d(b(t), b(t'))
    double coupling = 0.0;   // (1/n) sum d(E_i(t), E_i(t'))
};

BarycenterLipschitz barycenter_lipschitz_check(const SpacePtr& space, const EvaderSet& evaders, double t,
                                               double t_prime, double tol = 1e-9);

PursuitResult pursue_barycenter(const SpacePtr& space, const EvaderSet& evaders, const Point& x0, double t0,
                                double t_end, const Scheme& scheme, const PursuitOptions& options = {});

}  // namespace hadflow
