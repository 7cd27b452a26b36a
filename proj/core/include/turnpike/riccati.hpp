#pragma once

#include "turnpike/model.hpp"
#include "turnpike/steady.hpp"

namespace turnpike {

/// Solves F X + X F' = Q by Kronecker vectorization into an n^2 x n^2 linear
/// system. Dense and O(n^6), fine for the n <= 50 problems targeted here.
Matrix solve_lyapunov(const Matrix& f, const Matrix& q);

/// Solution bundle of the algebraic Riccati equation
///   -E A - A' E + E B B' E = C' C
/// together with the Lyapunov companion S of the similarity transform that
/// block-diagonalizes the Hamiltonian matrix.
struct AreSolution {
    Matrix e_hat;        ///< symmetric PSD stabilizing solution
    Matrix closed_loop;  ///< A - B B' E, strictly stable
    Matrix s;            ///< S (A-BB'E)' + (A-BB'E) S = B B'
    Matrix hamiltonian;  ///< [[A, -BB'], [-C'C, -A']]
    double are_residual = 0.0;       ///< relative Frobenius residual of the ARE
    double lyapunov_residual = 0.0;  ///< relative residual of the Lyapunov solve
    double closed_loop_spectral_abscissa = 0.0;  ///< max Re sigma(A - BB'E)
};

/// Stabilizing ARE solution via the ordered-Schur invariant subspace of the
/// Hamiltonian, plus one Newton (Lyapunov) refinement sweep. Requires (A,B)
/// stabilizable and (A,C) detectable; throws HypothesisViolation otherwise,
/// or when the Hamiltonian has spectrum on the imaginary axis.
AreSolution solve_are(const LqProblem& problem, double tol = 1e-9);

/// Forms Lambda = [[I, S], [E, E S + I]] and returns the Frobenius norm of
/// the off-diagonal blocks of Lambda^{-1} Ham Lambda. Also asserts that the
/// diagonal blocks match A - BB'E and -(A - BB'E)' to 1e-8.
double lambda_similarity_check(const AreSolution& are);

struct RiccatiSweep {
    double value = 0.0;  ///< 1/2 x'P(0)x + q(0)'x + s(0)
    Matrix p0;
    Vector q0;
    double s0 = 0.0;
};

/// Unconstrained finite-horizon oracle: integrates the matrix Riccati ODE
///   -dP/dt = A'P + PA - P BB' P + C'C,        P(T) = Q_T
///   -dq/dt = (A - BB'P)' q - C' z,            q(T) = -Q_T z_T
///   -ds/dt = -1/2 q' BB' q + 1/2 |z|^2,       s(T) = 1/2 z_T' Q_T z_T
/// backward with classical RK4 on `steps` uniform steps and evaluates the
/// value function at (x, T). Valid only for U equal to the full space and a
/// Zero or Quadratic final cost.
RiccatiSweep riccati_ode_value(const LqProblem& problem, const Vector& x, double horizon,
                               int steps = 0);

/// W(x) = 1/2 (x - y_bar)' E (x - y_bar) + (p_bar, x - y_bar); the
/// infinite-horizon value function of the unconstrained problem.
double w_closed_form(const AreSolution& are, const SteadySolution& steady, const Vector& x);

/// Gradient of the closed-form W: E (x - y_bar) + p_bar.
Vector w_closed_form_gradient(const AreSolution& are, const SteadySolution& steady,
                              const Vector& x);

/// Optimal stationary feedback y -> -B'E (y - y_bar) + u_bar for the
/// unconstrained infinite-horizon problem.
class FeedbackLaw {
public:
    FeedbackLaw(const AreSolution& are, const SteadySolution& steady, const Matrix& b);

    Vector operator()(const Vector& y) const;
    const Matrix& gain() const { return gain_; }

private:
    Matrix gain_;  ///< -B'E
    Vector y_bar_;
    Vector u_bar_;
};

FeedbackLaw feedback_gain(const AreSolution& are, const SteadySolution& steady,
                          const LqProblem& problem);

}  // namespace turnpike
