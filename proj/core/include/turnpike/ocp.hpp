#pragma once

#include "turnpike/model.hpp"
#include "turnpike/steady.hpp"

namespace turnpike {

/// Exact zero-order-hold discretization of the dynamics plus the quadrature
/// weights used on the running cost: trapezoidal weights on the state term,
/// exact weight dt on each piecewise-constant control interval.
struct Discretization {
    Matrix ad;             ///< exp(A dt)
    Matrix bd;             ///< int_0^dt exp(A s) B ds
    double dt = 0.0;
    int steps = 0;
    Vector state_weights;  ///< length N+1: dt/2, dt, ..., dt, dt/2
};

Discretization discretize(const LqProblem& problem, double horizon, int steps);

struct SolveOptions {
    int steps = 400;       ///< time steps N (>= 2)
    double tol = 1e-9;     ///< exit threshold on the projected-gradient norm
    int max_iter = 20000;
    int restarts = 8;      ///< extra random starts, used when g is nonconvex
    unsigned seed = 0;
};

/// A discretized control-state pair with its cost breakdown.
struct Trajectory {
    double horizon = 0.0;
    double dt = 0.0;
    Vector times;     ///< N+1 node times
    Matrix states;    ///< (N+1) x n, exact ZOH flow of the controls
    Matrix controls;  ///< N x m, piecewise constant, every row in U
    double running_cost = 0.0;
    double final_cost = 0.0;
    double total_cost = 0.0;
    double pg_residual = 0.0;  ///< projected-gradient norm at exit
    int iterations = 0;
    bool converged = true;
    double multistart_spread = 0.0;  ///< max-min cost over starts (0 if single)
};

/// Simulates the exact ZOH flow of a piecewise-constant control.
Matrix simulate_states(const Discretization& d, const Vector& x, const Matrix& controls);

/// Builds the Trajectory (states + cost breakdown) of a given control without
/// optimizing; controls are projected onto U first.
Trajectory evaluate_control(const LqProblem& problem, const Vector& x, double horizon,
                            const Matrix& controls);

/// Minimizes the discretized functional by FISTA with per-node projection
/// onto U and adjoint-recursion gradients. The step is 1/L with L from power
/// iteration on the quadratic-part Hessian (times 1.1), increased by
/// backtracking when a nonconvex final cost demands it; momentum restarts on
/// function-value increase. Nonconvex g triggers multi-start: `restarts`
/// seeded random initializations plus the zero control, lowest cost wins.
Trajectory solve_finite_horizon(const LqProblem& problem, const Vector& x, double horizon,
                                const SolveOptions& opts = SolveOptions());

/// V(x,T): total cost of solve_finite_horizon.
double value(const LqProblem& problem, const Vector& x, double horizon,
             const SolveOptions& opts = SolveOptions());

/// Half-horizon estimator of the infinite-horizon value W(x): solves with
/// g = 0 on [0,T], integrates the running cost over [0,T/2] only and
/// subtracts (T/2) V_s. Converges as T grows; compare at T and 2T for a
/// Cauchy gap.
double estimate_w(const LqProblem& problem, const SteadySolution& steady, const Vector& x,
                  double horizon, const SolveOptions& opts = SolveOptions());

/// Dynamic-programming gap |V(x,T) - (cost on [0,T/2] + V(y(T/2), T/2))|.
double dpp_check(const LqProblem& problem, const Vector& x, double horizon,
                 const SolveOptions& opts = SolveOptions());

/// Max relative error between the adjoint gradient and central finite
/// differences of the discretized functional, over `probes` random
/// control/direction draws.
double gradient_check(const LqProblem& problem, const Vector& x, double horizon,
                      const SolveOptions& opts = SolveOptions(), int probes = 10);

struct NonuniquenessResult {
    Trajectory plus;
    Trajectory minus;
    double cost_zero_control = 0.0;
};

/// Double-well construction: from x = 0 with an even nonconvex final cost and
/// z = 0, multi-start finds a minimizer with negative cost, and the mirrored
/// control -u has the mirrored trajectory and identical cost, exhibiting two
/// distinct global candidates. Requires (A,B) controllable.
NonuniquenessResult reproduce_nonuniqueness(const LqProblem& problem, double horizon,
                                            const SolveOptions& opts = SolveOptions());

}  // namespace turnpike
