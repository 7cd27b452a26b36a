#include "turnpike/model.hpp"

#include "turnpike/errors.hpp"
#include "turnpike/schur.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace turnpike {

// --------------------------------------------------------------------------
// ConstraintSet
// --------------------------------------------------------------------------

ConstraintSet::ConstraintSet(Box b) : set_(std::move(b)) {
    const Box& box = std::get<Box>(set_);
    if (box.lo.size() != box.hi.size())
        throw InvalidArgument("Box: lo and hi must have the same dimension");
    if (box.lo.size() == 0) throw InvalidArgument("Box: empty bound vectors");
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
        if (std::isnan(box.lo(i)) || std::isnan(box.hi(i)))
            throw InvalidArgument("Box: NaN bound");
        if (!(box.lo(i) < box.hi(i)))
            throw InvalidArgument("Box: requires lo_i < hi_i componentwise");
    }
}

ConstraintSet::ConstraintSet(Ball b) : set_(std::move(b)) {
    const Ball& ball = std::get<Ball>(set_);
    if (!all_finite(ball.center)) throw InvalidArgument("Ball: non-finite center");
    if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
        throw InvalidArgument("Ball: radius must be positive and finite");
}

int ConstraintSet::dimension() const {
    if (std::holds_alternative<Box>(set_)) return static_cast<int>(std::get<Box>(set_).lo.size());
    if (std::holds_alternative<Ball>(set_)) return static_cast<int>(std::get<Ball>(set_).center.size());
    return -1;
}

Vector ConstraintSet::project(const Vector& v) const {
    const int dim = dimension();
    if (dim >= 0 && v.size() != dim)
        throw InvalidArgument("ConstraintSet::project: dimension mismatch");

    if (std::holds_alternative<FullSpace>(set_)) return v;

    if (const Box* box = std::get_if<Box>(&set_)) {
        return v.cwiseMax(box->lo).cwiseMin(box->hi);
    }

    const Ball& ball = std::get<Ball>(set_);
    const Vector d = v - ball.center;
    const double dist = d.norm();
    if (dist <= ball.radius) return v;
    return ball.center + (ball.radius / dist) * d;
}

// --------------------------------------------------------------------------
// FinalCost
// --------------------------------------------------------------------------

FinalCost::FinalCost(QuadraticCost c) : cost_(std::move(c)) {
    const QuadraticCost& q = std::get<QuadraticCost>(cost_);
    if (q.q_t.rows() != q.q_t.cols()) throw InvalidArgument("QuadraticCost: Q_T must be square");
    if (q.z_t.size() != q.q_t.rows()) throw InvalidArgument("QuadraticCost: z_T dimension mismatch");
    if (!all_finite(q.q_t) || !all_finite(q.z_t))
        throw InvalidArgument("QuadraticCost: non-finite entries");
    if ((q.q_t - q.q_t.transpose()).norm() > 1e-10 * (1.0 + q.q_t.norm()))
        throw InvalidArgument("QuadraticCost: Q_T must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(q.q_t);
    if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + q.q_t.norm()))
        throw InvalidArgument("QuadraticCost: Q_T must be positive semidefinite");
}

FinalCost::FinalCost(QuarticDoubleWell c) : cost_(c) {
    if (!(c.eps > 0.0) || !std::isfinite(c.eps))
        throw InvalidArgument("QuarticDoubleWell: eps must be positive");
}

FinalCostValue FinalCost::evaluate(const Vector& y) const {
    if (!all_finite(y)) throw InvalidArgument("FinalCost::evaluate: non-finite state");
    FinalCostValue out;
    out.gradient = Vector::Zero(y.size());

    if (std::holds_alternative<ZeroCost>(cost_)) return out;

    if (const QuadraticCost* q = std::get_if<QuadraticCost>(&cost_)) {
        if (y.size() != q->z_t.size())
            throw InvalidArgument("FinalCost::evaluate: dimension mismatch");
        const Vector d = y - q->z_t;
        const Vector qd = q->q_t * d;
        out.value = 0.5 * d.dot(qd);
        out.gradient = qd;
        return out;
    }

    const QuarticDoubleWell& quartic = std::get<QuarticDoubleWell>(cost_);
    const double r2 = y.squaredNorm();
    out.value = (r2 * r2 - r2) / quartic.eps;
    out.gradient = ((4.0 * r2 - 2.0) / quartic.eps) * y;
    return out;
}

bool FinalCost::is_even() const {
    // All variants are even in y: zero, |y|-dependent quartic, and the
    // quadratic exactly when z_T = 0.
    if (const QuadraticCost* q = std::get_if<QuadraticCost>(&cost_))
        return q->z_t.norm() == 0.0;
    return true;
}

// --------------------------------------------------------------------------
// LqProblem
// --------------------------------------------------------------------------

LqProblem::LqProblem(Matrix a, Matrix b, Matrix c, Vector z,
                     ConstraintSet constraints, FinalCost final_cost)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), z_(std::move(z)),
      constraints_(std::move(constraints)), final_cost_(std::move(final_cost)) {
    if (a_.rows() < 1 || a_.rows() != a_.cols())
        throw InvalidArgument("LqProblem: A must be square with n >= 1");
    if (b_.rows() != a_.rows() || b_.cols() < 1)
        throw InvalidArgument("LqProblem: B must be n x m with m >= 1");
    if (c_.cols() != a_.rows() || c_.rows() < 1)
        throw InvalidArgument("LqProblem: C must be q x n with q >= 1");
    if (z_.size() != c_.rows())
        throw InvalidArgument("LqProblem: z must have length q");
    if (!all_finite(a_) || !all_finite(b_) || !all_finite(c_) || !all_finite(z_))
        throw InvalidArgument("LqProblem: non-finite matrix entries");

    const int set_dim = constraints_.dimension();
    if (set_dim >= 0 && set_dim != m())
        throw InvalidArgument("LqProblem: constraint set dimension differs from m");

    if (const QuadraticCost* q = std::get_if<QuadraticCost>(&final_cost_.variant())) {
        if (q->z_t.size() != n())
            throw InvalidArgument("LqProblem: quadratic final cost dimension differs from n");
    }
}

LqProblem::LqProblem(Matrix a, Matrix b)
    : LqProblem(a, std::move(b), Matrix::Identity(a.rows(), a.rows()),
                Vector::Zero(a.rows())) {}

LqProblem LqProblem::with_constraints(ConstraintSet u) const {
    return LqProblem(a_, b_, c_, z_, std::move(u), final_cost_);
}

LqProblem LqProblem::with_final_cost(FinalCost g) const {
    return LqProblem(a_, b_, c_, z_, constraints_, std::move(g));
}

LqProblem LqProblem::with_target(Vector z) const {
    return LqProblem(a_, b_, c_, std::move(z), constraints_, final_cost_);
}

// --------------------------------------------------------------------------
// System predicates
// --------------------------------------------------------------------------

namespace {

double rank_threshold(const Matrix& m, double tol) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return tol * std::max(1.0, smax);
}

// Hautus test: rank [A - lambda I, B] = n at every eigenvalue with
// Re lambda >= -boundary_tol.
bool hautus_stabilizable(const Matrix& a, const Matrix& b, double tol,
                         std::vector<std::complex<double>>* unstable) {
    const int n = static_cast<int>(a.rows());
    Eigen::EigenSolver<Matrix> es(a);
    const double boundary = tol * std::max(1.0, a.norm());
    const double thresh = rank_threshold(a, tol);

    bool ok = true;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> lambda = es.eigenvalues()(i);
        if (lambda.real() < -boundary) continue;
        if (unstable) unstable->push_back(lambda);

        ComplexMatrix pencil(n, n + b.cols());
        pencil.leftCols(n) = a.cast<std::complex<double>>() - lambda * ComplexMatrix::Identity(n, n);
        pencil.rightCols(b.cols()) = b.cast<std::complex<double>>();
        Eigen::JacobiSVD<ComplexMatrix> svd(pencil);
        if (svd.singularValues()(n - 1) <= thresh) ok = false;
    }
    return ok;
}

}  // namespace

bool is_stabilizable_pair(const Matrix& a, const Matrix& b, double tol) {
    return hautus_stabilizable(a, b, tol, nullptr);
}

bool is_detectable_pair(const Matrix& a, const Matrix& c, double tol) {
    return hautus_stabilizable(a.transpose(), c.transpose(), tol, nullptr);
}

SystemReport analyze_system(const LqProblem& problem, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("analyze_system: tol must be positive");
    const Matrix& a = problem.a();
    const Matrix& b = problem.b();
    const Matrix& c = problem.c();
    const int n = problem.n();

    SystemReport report;
    report.stabilizable = hautus_stabilizable(a, b, tol, &report.unstable_eigenvalues);
    report.detectable = hautus_stabilizable(a.transpose(), c.transpose(), tol, nullptr);

    Matrix kalman(n, n * problem.m());
    Matrix power = b;
    for (int k = 0; k < n; ++k) {
        kalman.middleCols(k * problem.m(), problem.m()) = power;
        power = a * power;
    }
    Eigen::JacobiSVD<Matrix> ksvd(kalman);
    report.controllable = ksvd.singularValues()(std::min(kalman.rows(), kalman.cols()) - 1) >
                          rank_threshold(kalman, tol);

    Eigen::JacobiSVD<Matrix> asvd(a);
    report.min_singular_value_a = asvd.singularValues()(n - 1);
    report.a_invertible =
        report.min_singular_value_a > tol * std::max(1.0, asvd.singularValues()(0));
    return report;
}

SpectralSplit stable_antistable_split(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) throw InvalidArgument("stable_antistable_split: A must be square");
    if (!all_finite(a)) throw InvalidArgument("stable_antistable_split: non-finite entries");

    const double boundary = tol * std::max(1.0, a.norm());
    const auto stable = [boundary](const std::complex<double>& l) { return l.real() < -boundary; };
    const auto antistable = [boundary](const std::complex<double>& l) { return l.real() >= -boundary; };

    SpectralSplit split;
    split.basis_stable = invariant_subspace(a, stable);
    split.basis_antistable = invariant_subspace(a, antistable);

    Eigen::EigenSolver<Matrix> es(a);
    for (int i = 0; i < a.rows(); ++i)
        if (std::abs(es.eigenvalues()(i).real()) <= boundary) split.boundary_eigenvalue = true;
    return split;
}

}  // namespace turnpike
