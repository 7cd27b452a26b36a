#pragma once

#include "turnpike/ocp.hpp"
#include "turnpike/steady.hpp"

#include <optional>
#include <vector>

namespace turnpike {

struct ExponentialFit {
    double k = 0.0;       ///< envelope amplitude
    double mu = 0.0;      ///< decay rate of K [e^{-mu t} + e^{-mu (T-t)}]
    double fit_rms = 0.0;
    bool degenerate = false;  ///< deviation at floor on most nodes, fit meaningless
};

/// Epsilon-containment certificate of a solved trajectory around the steady
/// optimum, plus the uniform integral and sup bounds the theory predicts.
struct TurnpikeReport {
    double epsilon = 0.0;
    double tau_in = 0.0;   ///< first node time with |y - y_bar| < eps (NaN if never)
    double tau_out = 0.0;  ///< last such node time (NaN if never)
    double mid_max_deviation = 0.0;  ///< sup of |y - y_bar| on [tau_in, tau_out]
    double integral_deviation = 0.0;  ///< int |u-u_bar|^2 + |y-y_bar|^2, trapezoid
    double sup_state_norm = 0.0;
    bool pass = false;
    bool epsilon_warning = false;  ///< eps outside the (0,1) range of the statement
    std::optional<ExponentialFit> exp_fit;
};

/// Containment scan: entry/exit times of the eps-tube around y_bar and the
/// uniform bounds. Deviations never below eps yield NaN times and pass=false.
TurnpikeReport diagnose(const Trajectory& traj, const SteadySolution& steady, double epsilon);

/// int_0^T |u - u_bar|^2 + |y - y_bar|^2: trapezoid on the state deviation,
/// exact dt weights on the piecewise-constant control deviation.
double integral_deviation(const Trajectory& traj, const SteadySolution& steady);

struct RepresentationCheck {
    double identity_gap = 0.0;     ///< |J - turnpike-centered expansion|
    double inequality_slack = 0.0; ///< J - lower bound; >= -tol for feasible u
};

/// Evaluates the turnpike-centered cost expansion on a trajectory:
///   J = T V_s + 1/2 int(|u-u_bar|^2 + |C(y-y_bar)|^2)
///       + int((u_bar, u-u_bar) + (C y_bar - z, C(y-y_bar))) + g(y(T))
/// and the lower bound with the linear terms replaced by (p_bar, x - y(T)).
/// All integrals are computed exactly for the piecewise-constant control and
/// ZOH flow (matrix-exponential Gramians per interval), so the identity gap
/// is round-off and the slack is nonnegative up to the steady KKT residual
/// for any feasible control, optimal or not. Requires A invertible.
RepresentationCheck representation_check(const Trajectory& traj, const SteadySolution& steady,
                                         const LqProblem& problem);

/// Solves the problem at each horizon and reports the integral deviation
/// int(|u - u_bar|^2 + |y - y_bar|^2) per horizon; uniform boundedness in T
/// shows as a plateau.
std::vector<double> integral_uniformity_probe(const LqProblem& problem,
                                              const SteadySolution& steady, const Vector& x,
                                              const std::vector<double>& horizons,
                                              const SolveOptions& opts = SolveOptions());

/// Least-squares fit of log(|u - u_bar| + |y - y_bar|) against the two-sided
/// envelope K [e^{-mu t} + e^{-mu(T-t)}] on the first and last quarters of
/// [0, T]; the middle half sits at the noise floor and is excluded.
/// Meaningful for unconstrained problems, informational otherwise.
ExponentialFit fit_exponential_envelope(const Trajectory& traj, const SteadySolution& steady);

/// Empirical constant of the detectability estimate
///   |y(t)|^2 + int|y|^2  <=  K [ |y(0)|^2 + int|Cy|^2 + int|f|^2 ]
/// for dy/ds = A y + f: simulates random (y(0), piecewise-constant f) draws
/// and returns the largest observed ratio. Repeating with larger T must not
/// blow up. Throws HypothesisViolation when (A,C) is not detectable.
double observability_constant_probe(const Matrix& a, const Matrix& c, int trials,
                                    double horizon, unsigned seed = 0);

}  // namespace turnpike
