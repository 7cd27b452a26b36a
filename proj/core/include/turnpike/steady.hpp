#pragma once

#include "turnpike/model.hpp"

namespace turnpike {

/// The steady optimum (turnpike) and its multiplier.
///
/// Satisfies, up to solver tolerance,
///   A y_bar + B u_bar = 0
///   A' p_bar + C'(C y_bar - z) = 0
///   u_bar = proj_U(-B' p_bar)
///   v_s = 1/2 |u_bar|^2 + 1/2 |C y_bar - z|^2.
struct SteadySolution {
    Vector u_bar;
    Vector y_bar;
    Vector p_bar;
    double v_s = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// Minimizes the reduced steady cost
///   phi(u) = 1/2 |u|^2 + 1/2 |-C A^{-1} B u - z|^2
/// over U by projected gradient with fixed step 1/L, L = 1 + |C A^{-1} B|_2^2.
/// phi is 1-strongly convex, so the minimizer is unique and the iteration
/// converges linearly from any start; the initial iterate is proj_U(0)
/// unless u0 is supplied.
///
/// When z = 0 and 0 in U the zero pair attains J_s = 0 and is returned
/// directly, for any A. Otherwise a numerically singular A throws
/// HypothesisViolation, and an exhausted max_iter throws a diagnostic
/// NumericalFailure.
SteadySolution solve_steady(const LqProblem& problem, double tol = 1e-12,
                            int max_iter = 100000, const Vector* u0 = nullptr);

/// Empirical check of the steady variational inequality
///   (p_bar, B(u - u_bar)) >= -(u_bar, u - u_bar)   for all u in U.
/// Draws `samples` points of U (uniform in a bounding box, projected) and
/// returns the largest violation -[(p_bar, B(u-u_bar)) + (u_bar, u-u_bar)];
/// a correct solution stays at or below solver tolerance.
double verify_steady_variational_inequality(const SteadySolution& sol,
                                            const LqProblem& problem,
                                            int samples = 1000,
                                            unsigned seed = 0);

}  // namespace turnpike
