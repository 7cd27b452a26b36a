#include "turnpike/riccati.hpp"

#include "turnpike/errors.hpp"
#include "turnpike/schur.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace turnpike {

Matrix solve_lyapunov(const Matrix& f, const Matrix& q) {
    const int n = static_cast<int>(f.rows());
    if (f.cols() != n || q.rows() != n || q.cols() != n)
        throw InvalidArgument("solve_lyapunov: dimension mismatch");

    // vec(F X + X F') = (I (x) F + F (x) I) vec(X), column-major vec.
    Matrix op = Matrix::Zero(n * n, n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < n; ++r) {
                op(j * n + i, j * n + r) += f(i, r);  // I (x) F
                op(r * n + i, j * n + i) += f(r, j);  // F (x) I, uses F(r,j) on block (r,j)
            }

    Eigen::FullPivLU<Matrix> lu(op);
    if (!lu.isInvertible())
        throw NumericalFailure("solve_lyapunov: singular Lyapunov operator");

    Vector vec_q(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) vec_q(j * n + i) = q(i, j);
    const Vector vec_x = lu.solve(vec_q);

    Matrix x(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = vec_x(j * n + i);
    return x;
}

namespace {

double are_residual_norm(const LqProblem& p, const Matrix& e) {
    const Matrix bbt = p.b() * p.b().transpose();
    const Matrix ctc = p.c().transpose() * p.c();
    const Matrix res = -e * p.a() - p.a().transpose() * e + e * bbt * e - ctc;
    return res.norm() / (1.0 + ctc.norm());
}

}  // namespace

AreSolution solve_are(const LqProblem& problem, double tol) {
    const SystemReport sys = analyze_system(problem);
    if (!sys.stabilizable)
        throw HypothesisViolation("solve_are: (A,B) is not stabilizable");
    if (!sys.detectable)
        throw HypothesisViolation("solve_are: (A,C) is not detectable");

    const int n = problem.n();
    const Matrix bbt = problem.b() * problem.b().transpose();
    const Matrix ctc = problem.c().transpose() * problem.c();

    AreSolution out;
    out.hamiltonian = Matrix::Zero(2 * n, 2 * n);
    out.hamiltonian.topLeftCorner(n, n) = problem.a();
    out.hamiltonian.topRightCorner(n, n) = -bbt;
    out.hamiltonian.bottomLeftCorner(n, n) = -ctc;
    out.hamiltonian.bottomRightCorner(n, n) = -problem.a().transpose();

    const double axis_tol = tol * std::max(1.0, out.hamiltonian.norm());
    const OrderedSchur schur =
        ordered_schur(out.hamiltonian,
                      [](const std::complex<double>& l) { return l.real() < 0.0; });
    for (int i = 0; i < 2 * n; ++i)
        if (std::abs(schur.t(i, i).real()) <= axis_tol)
            throw HypothesisViolation(
                "solve_are: Hamiltonian spectrum touches the imaginary axis; "
                "stabilizability/detectability is violated up to tolerance");
    if (schur.selected != n)
        throw NumericalFailure("solve_are: stable subspace has unexpected dimension");

    // Real basis [X1; X2] of the stable invariant subspace; E = X2 X1^{-1}.
    const Matrix basis = invariant_subspace(
        out.hamiltonian, [](const std::complex<double>& l) { return l.real() < 0.0; });
    const Matrix x1 = basis.topRows(n);
    const Matrix x2 = basis.bottomRows(n);

    Eigen::FullPivLU<Matrix> lu(x1);
    {
        Eigen::JacobiSVD<Matrix> svd(x1);
        const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
        if (!std::isfinite(cond) || cond > 1e12)
            throw NumericalFailure("solve_are: subspace basis X1 is numerically singular");
    }
    Matrix e = x2 * lu.inverse();
    e = 0.5 * (e + e.transpose());

    // One Newton sweep tightens the subspace solution to near machine
    // precision: solve Delta F' + F Delta = R(E) with F the closed loop.
    {
        const Matrix f = problem.a() - bbt * e;
        const Matrix res = -e * problem.a() - problem.a().transpose() * e + e * bbt * e - ctc;
        const Matrix delta = solve_lyapunov(f.transpose(), res);
        const Matrix refined = 0.5 * ((e + delta) + (e + delta).transpose());
        if (are_residual_norm(problem, refined) < are_residual_norm(problem, e)) e = refined;
    }

    out.e_hat = e;
    out.closed_loop = problem.a() - bbt * e;
    out.are_residual = are_residual_norm(problem, e);

    Matrix s = solve_lyapunov(out.closed_loop, bbt);
    out.s = 0.5 * (s + s.transpose());
    out.lyapunov_residual =
        (out.s * out.closed_loop.transpose() + out.closed_loop * out.s - bbt).norm() /
        (1.0 + bbt.norm());

    Eigen::EigenSolver<Matrix> es(out.closed_loop);
    out.closed_loop_spectral_abscissa = es.eigenvalues().real().maxCoeff();
    return out;
}

double lambda_similarity_check(const AreSolution& are) {
    const int n = static_cast<int>(are.e_hat.rows());

    Matrix lambda(2 * n, 2 * n);
    lambda.topLeftCorner(n, n) = Matrix::Identity(n, n);
    lambda.topRightCorner(n, n) = are.s;
    lambda.bottomLeftCorner(n, n) = are.e_hat;
    lambda.bottomRightCorner(n, n) = are.e_hat * are.s + Matrix::Identity(n, n);

    Eigen::FullPivLU<Matrix> lu(lambda);
    if (!lu.isInvertible())
        throw NumericalFailure("lambda_similarity_check: Lambda is singular");

    const Matrix d = lu.solve(are.hamiltonian * lambda);
    const double off =
        std::sqrt(d.topRightCorner(n, n).squaredNorm() + d.bottomLeftCorner(n, n).squaredNorm());

    const double scale = 1.0 + are.hamiltonian.norm();
    if ((d.topLeftCorner(n, n) - are.closed_loop).norm() > 1e-8 * scale ||
        (d.bottomRightCorner(n, n) + are.closed_loop.transpose()).norm() > 1e-8 * scale)
        throw NumericalFailure(
            "lambda_similarity_check: diagonal blocks do not match the closed loop");
    return off;
}

RiccatiSweep riccati_ode_value(const LqProblem& problem, const Vector& x, double horizon,
                               int steps) {
    if (!problem.constraints().is_full_space())
        throw InvalidArgument("riccati_ode_value: oracle is valid only for U = R^m");
    if (problem.final_cost().is_nonconvex())
        throw InvalidArgument("riccati_ode_value: final cost must be Zero or Quadratic");
    if (!(horizon > 0.0)) throw InvalidArgument("riccati_ode_value: horizon must be positive");
    if (x.size() != problem.n()) throw InvalidArgument("riccati_ode_value: state dimension");

    if (steps <= 0) steps = std::max(200, static_cast<int>(std::ceil(50.0 * horizon)));

    const int n = problem.n();
    const Matrix& a = problem.a();
    const Matrix bbt = problem.b() * problem.b().transpose();
    const Matrix ctc = problem.c().transpose() * problem.c();
    const Vector ctz = problem.c().transpose() * problem.z();
    const double zz = problem.z().squaredNorm();

    Matrix p = Matrix::Zero(n, n);
    Vector q = Vector::Zero(n);
    double s = 0.0;
    if (const QuadraticCost* g = std::get_if<QuadraticCost>(&problem.final_cost().variant())) {
        p = g->q_t;
        q = -g->q_t * g->z_t;
        s = 0.5 * g->z_t.dot(g->q_t * g->z_t);
    }

    // Backward sweep in tau = T - t: dP/dtau = A'P + PA - P BB' P + C'C, etc.
    const auto dp = [&](const Matrix& pp) -> Matrix {
        return a.transpose() * pp + pp * a - pp * bbt * pp + ctc;
    };
    const auto dq = [&](const Matrix& pp, const Vector& qq) -> Vector {
        return (a - bbt * pp).transpose() * qq - ctz;
    };
    const auto ds = [&](const Vector& qq) -> double {
        return -0.5 * qq.dot(bbt * qq) + 0.5 * zz;
    };

    const double h = horizon / steps;
    for (int k = 0; k < steps; ++k) {
        const Matrix k1p = dp(p);
        const Vector k1q = dq(p, q);
        const double k1s = ds(q);

        const Matrix p2 = p + 0.5 * h * k1p;
        const Vector q2 = q + 0.5 * h * k1q;
        const Matrix k2p = dp(p2);
        const Vector k2q = dq(p2, q2);
        const double k2s = ds(q2);

        const Matrix p3 = p + 0.5 * h * k2p;
        const Vector q3 = q + 0.5 * h * k2q;
        const Matrix k3p = dp(p3);
        const Vector k3q = dq(p3, q3);
        const double k3s = ds(q3);

        const Matrix p4 = p + h * k3p;
        const Vector q4 = q + h * k3q;
        const Matrix k4p = dp(p4);
        const Vector k4q = dq(p4, q4);
        const double k4s = ds(q4);

        p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        s += (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    }

    RiccatiSweep out;
    out.p0 = 0.5 * (p + p.transpose());
    out.q0 = q;
    out.s0 = s;
    out.value = 0.5 * x.dot(out.p0 * x) + q.dot(x) + s;
    return out;
}

double w_closed_form(const AreSolution& are, const SteadySolution& steady, const Vector& x) {
    const Vector d = x - steady.y_bar;
    return 0.5 * d.dot(are.e_hat * d) + steady.p_bar.dot(d);
}

Vector w_closed_form_gradient(const AreSolution& are, const SteadySolution& steady,
                              const Vector& x) {
    return are.e_hat * (x - steady.y_bar) + steady.p_bar;
}

FeedbackLaw::FeedbackLaw(const AreSolution& are, const SteadySolution& steady, const Matrix& b)
    : gain_(-b.transpose() * are.e_hat), y_bar_(steady.y_bar), u_bar_(steady.u_bar) {}

Vector FeedbackLaw::operator()(const Vector& y) const {
    return gain_ * (y - y_bar_) + u_bar_;
}

FeedbackLaw feedback_gain(const AreSolution& are, const SteadySolution& steady,
                          const LqProblem& problem) {
    if (!problem.constraints().is_full_space())
        throw InvalidArgument("feedback_gain: stationary feedback law requires U = R^m");
    return FeedbackLaw(are, steady, problem.b());
}

}  // namespace turnpike
