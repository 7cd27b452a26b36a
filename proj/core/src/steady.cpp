#include "turnpike/steady.hpp"

#include "turnpike/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace turnpike {

SteadySolution solve_steady(const LqProblem& problem, double tol, int max_iter,
                            const Vector* u0) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_steady: tol must be positive");
    if (max_iter < 1) throw InvalidArgument("solve_steady: max_iter must be positive");

    // z = 0 with 0 admissible: the zero pair attains the global minimum
    // J_s = 0 for any A, singular or not.
    if (problem.z().norm() == 0.0 &&
        problem.constraints().project(Vector::Zero(problem.m())).norm() == 0.0) {
        SteadySolution zero;
        zero.u_bar = Vector::Zero(problem.m());
        zero.y_bar = Vector::Zero(problem.n());
        zero.p_bar = Vector::Zero(problem.n());
        zero.v_s = 0.0;
        zero.kkt_residual = 0.0;
        return zero;
    }

    const Matrix& a = problem.a();
    Eigen::FullPivLU<Matrix> lu(a);
    {
        Eigen::JacobiSVD<Matrix> svd(a);
        const double smin = svd.singularValues()(problem.n() - 1);
        if (smin <= tol * std::max(1.0, svd.singularValues()(0)))
            throw HypothesisViolation(
                "solve_steady: A is singular; the steady problem requires invertible A");
    }

    // Reduced map u -> C y with y = -A^{-1} B u.
    const Matrix g = -problem.c() * lu.solve(problem.b());
    const Vector& z = problem.z();
    const ConstraintSet& u_set = problem.constraints();

    const double g_norm = Eigen::JacobiSVD<Matrix>(g).singularValues()(0);
    const double lip = 1.0 + g_norm * g_norm;
    const double step = 1.0 / lip;

    Vector u = u0 ? u_set.project(*u0) : u_set.project(Vector::Zero(problem.m()));

    SteadySolution sol;
    int it = 0;
    for (; it < max_iter; ++it) {
        const Vector grad = u + g.transpose() * (g * u - z);
        // Unit-step fixed-point residual; at the optimum u = proj_U(u - grad)
        // coincides with the projection condition u = proj_U(-B' p).
        const double residual = (u - u_set.project(u - grad)).norm();
        if (residual <= tol) break;
        u = u_set.project(u - step * grad);
    }
    if (it == max_iter) {
        const Vector grad = u + g.transpose() * (g * u - z);
        const double residual = (u - u_set.project(u - grad)).norm();
        throw NumericalFailure("solve_steady: no convergence in " + std::to_string(max_iter) +
                               " iterations, last residual " + std::to_string(residual));
    }

    sol.u_bar = u;
    sol.y_bar = -lu.solve(problem.b() * u);
    const Vector mis = problem.c() * sol.y_bar - z;
    sol.p_bar = -a.transpose().fullPivLu().solve(problem.c().transpose() * mis);
    sol.v_s = 0.5 * u.squaredNorm() + 0.5 * mis.squaredNorm();
    sol.kkt_residual = (u - u_set.project(-problem.b().transpose() * sol.p_bar)).norm();
    sol.iterations = it;
    return sol;
}

double verify_steady_variational_inequality(const SteadySolution& sol,
                                            const LqProblem& problem,
                                            int samples, unsigned seed) {
    if (samples < 1) throw InvalidArgument("verify_steady_variational_inequality: samples >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // Sampling box centered at u_bar; wide enough to exercise the whole set
    // for bounded sets and a representative neighborhood otherwise.
    const double radius = 2.0 * (1.0 + sol.u_bar.norm());
    const Vector bp = problem.b().transpose() * sol.p_bar;

    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Vector u(problem.m());
        for (int i = 0; i < problem.m(); ++i) u(i) = sol.u_bar(i) + radius * unit(rng);
        u = problem.constraints().project(u);
        const Vector d = u - sol.u_bar;
        const double violation = -(sol.p_bar.dot(problem.b() * d) + sol.u_bar.dot(d));
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace turnpike
