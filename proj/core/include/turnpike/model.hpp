#pragma once

#include "turnpike/linalg.hpp"

#include <complex>
#include <variant>
#include <vector>

namespace turnpike {

// ---------------------------------------------------------------------------
// Control constraint set U: nonempty, closed, convex by construction.
// ---------------------------------------------------------------------------

struct FullSpace {};

/// Componentwise bounds lo_i < hi_i; +-infinity entries are allowed.
struct Box {
    Vector lo;
    Vector hi;
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

class ConstraintSet {
public:
    ConstraintSet() : set_(FullSpace{}) {}
    ConstraintSet(FullSpace s) : set_(s) {}
    ConstraintSet(Box b);
    ConstraintSet(Ball b);

    static ConstraintSet full_space() { return ConstraintSet(); }
    static ConstraintSet box(Vector lo, Vector hi) { return ConstraintSet(Box{std::move(lo), std::move(hi)}); }
    static ConstraintSet ball(Vector center, double radius) { return ConstraintSet(Ball{std::move(center), radius}); }

    /// Euclidean projection onto the set. Idempotent and nonexpansive.
    Vector project(const Vector& v) const;

    /// Distance-to-set of v, zero iff v is a member.
    double distance(const Vector& v) const { return (v - project(v)).norm(); }

    bool is_full_space() const { return std::holds_alternative<FullSpace>(set_); }
    /// Dimension the set constrains, or -1 when any dimension is accepted.
    int dimension() const;

    const std::variant<FullSpace, Box, Ball>& variant() const { return set_; }

private:
    std::variant<FullSpace, Box, Ball> set_;
};

// ---------------------------------------------------------------------------
// Final cost g: a closed enumeration so that every instance is locally
// Lipschitz and bounded from below by construction.
// ---------------------------------------------------------------------------

struct ZeroCost {};

/// g(y) = 1/2 (y - z_T)' Q_T (y - z_T), Q_T symmetric PSD.
struct QuadraticCost {
    Matrix q_t;
    Vector z_t;
};

/// g(y) = (|y|^4 - |y|^2) / eps. Two distinguished global minimizer shells at
/// |y| = 1/sqrt(2); bounded below by -1/(4 eps).
struct QuarticDoubleWell {
    double eps = 1.0;
};

struct FinalCostValue {
    double value = 0.0;
    Vector gradient;
};

class FinalCost {
public:
    FinalCost() : cost_(ZeroCost{}) {}
    FinalCost(ZeroCost c) : cost_(c) {}
    FinalCost(QuadraticCost c);
    FinalCost(QuarticDoubleWell c);

    static FinalCost zero() { return FinalCost(); }
    static FinalCost quadratic(Matrix q_t, Vector z_t) { return FinalCost(QuadraticCost{std::move(q_t), std::move(z_t)}); }
    static FinalCost quartic_double_well(double eps) { return FinalCost(QuarticDoubleWell{eps}); }

    /// Value and analytic gradient at y.
    FinalCostValue evaluate(const Vector& y) const;

    bool is_zero() const { return std::holds_alternative<ZeroCost>(cost_); }
    bool is_quadratic() const { return std::holds_alternative<QuadraticCost>(cost_); }
    bool is_nonconvex() const { return std::holds_alternative<QuarticDoubleWell>(cost_); }
    /// g is even (g(-y) = g(y)); relied upon by the non-uniqueness construction.
    bool is_even() const;

    const std::variant<ZeroCost, QuadraticCost, QuarticDoubleWell>& variant() const { return cost_; }

private:
    std::variant<ZeroCost, QuadraticCost, QuarticDoubleWell> cost_;
};

// ---------------------------------------------------------------------------
// Problem data
// ---------------------------------------------------------------------------

/// The constrained linear-quadratic problem
///   minimize 1/2 int_0^T [ |u|^2 + |C y - z|^2 ] ds + g(y(T))
///   subject to  dy/ds = A y + B u,  y(0) = x,  u(s) in U.
class LqProblem {
public:
    LqProblem(Matrix a, Matrix b, Matrix c, Vector z,
              ConstraintSet constraints = ConstraintSet(),
              FinalCost final_cost = FinalCost());

    /// Observation C = I, target z = 0, unconstrained, zero final cost.
    LqProblem(Matrix a, Matrix b);

    int n() const { return static_cast<int>(a_.rows()); }
    int m() const { return static_cast<int>(b_.cols()); }
    int q() const { return static_cast<int>(c_.rows()); }

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& c() const { return c_; }
    const Vector& z() const { return z_; }
    const ConstraintSet& constraints() const { return constraints_; }
    const FinalCost& final_cost() const { return final_cost_; }

    LqProblem with_constraints(ConstraintSet u) const;
    LqProblem with_final_cost(FinalCost g) const;
    LqProblem with_target(Vector z) const;

private:
    Matrix a_, b_, c_;
    Vector z_;
    ConstraintSet constraints_;
    FinalCost final_cost_;
};

// ---------------------------------------------------------------------------
// Linear-systems predicates
// ---------------------------------------------------------------------------

struct SystemReport {
    bool stabilizable = false;   ///< Hautus: rank [A - l I, B] = n for Re l >= 0
    bool detectable = false;     ///< dual Hautus test on (A', C')
    bool controllable = false;   ///< Kalman rank of [B, AB, ..., A^{n-1}B]
    bool a_invertible = false;
    double min_singular_value_a = 0.0;
    std::vector<std::complex<double>> unstable_eigenvalues;
};

/// Rank decisions use the threshold tol * max(1, sigma_max); eigenvalues
/// within tol of the imaginary axis count as unstable.
SystemReport analyze_system(const LqProblem& problem, double tol = 1e-9);

/// Hautus tests on a bare pair, without wrapping it in a problem.
bool is_stabilizable_pair(const Matrix& a, const Matrix& b, double tol = 1e-9);
bool is_detectable_pair(const Matrix& a, const Matrix& c, double tol = 1e-9);

struct SpectralSplit {
    Matrix basis_stable;      ///< orthonormal basis of the Re < 0 subspace
    Matrix basis_antistable;  ///< orthonormal basis of the Re >= 0 subspace
    bool boundary_eigenvalue = false;  ///< some |Re lambda| <= tol; assigned antistable
};

/// Invariant-subspace split of A along the imaginary axis, via ordered Schur.
SpectralSplit stable_antistable_split(const Matrix& a, double tol = 1e-9);

}  // namespace turnpike
