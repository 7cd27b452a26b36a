#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "turnpike/asymptotics.hpp"
#include "turnpike/errors.hpp"
#include "turnpike/problem_io.hpp"

#include <cmath>
#include <random>

using namespace turnpike;
using oracles::scalar;
using oracles::scalar_matrix;

namespace {

SolveOptions quick(int steps, double tol = 1e-10) {
    SolveOptions o;
    o.steps = steps;
    o.tol = tol;
    o.max_iter = 50000;
    return o;
}

SteadySolution trivial_steady() {
    SteadySolution s;
    s.u_bar = scalar(0.0);
    s.y_bar = scalar(0.0);
    s.p_bar = scalar(0.0);
    s.v_s = 0.0;
    return s;
}

LqProblem integrator() { return LqProblem(scalar_matrix(0.0), scalar_matrix(1.0)); }

}  // namespace

TEST_CASE("Hamiltonian closed forms") {
    SUBCASE("unconstrained scalar") {
        const HamiltonianValue h = hamiltonian(integrator(), scalar(3.0), scalar(2.0));
        CHECK(h.h == doctest::Approx(2.0));
        CHECK(h.u_star(0) == doctest::Approx(-2.0));
    }
    SUBCASE("box saturation") {
        const LqProblem p(scalar_matrix(0.0), scalar_matrix(1.0), scalar_matrix(1.0),
                          scalar(0.0), ConstraintSet::box(scalar(-1.0), scalar(1.0)));
        const HamiltonianValue h = hamiltonian(p, scalar(0.0), scalar(2.0));
        CHECK(h.u_star(0) == doctest::Approx(-1.0));
        CHECK(h.h == doctest::Approx(1.5));
    }
    SUBCASE("zero momentum") {
        const LqProblem p(scalar_matrix(1.0), scalar_matrix(1.0), scalar_matrix(1.0),
                          scalar(0.0), ConstraintSet::box(scalar(-2.0), scalar(3.0)));
        const HamiltonianValue h = hamiltonian(p, scalar(5.0), scalar(0.0));
        CHECK(h.u_star(0) == doctest::Approx(0.0));
        CHECK(h.h == doctest::Approx(0.0));
    }
}

TEST_CASE("Hamiltonian agrees with brute force over every constraint variant") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix a(2, 2);
    a << 0.3, -1.0, 0.5, -0.7;
    Matrix b(2, 2);
    b << 1.0, 0.2, 0.0, 0.8;
    Vector lo(2), hi(2);
    lo << -0.7, -0.3;
    hi << 0.4, 0.9;
    Vector center(2);
    center << 0.2, -0.1;
    const std::vector<ConstraintSet> sets{ConstraintSet::full_space(),
                                          ConstraintSet::box(lo, hi),
                                          ConstraintSet::ball(center, 0.8)};

    for (const auto& u_set : sets) {
        const LqProblem p(a, b, Matrix::Identity(2, 2), Vector::Zero(2), u_set);
        for (int trial = 0; trial < 200; ++trial) {
            Vector x(2), pv(2);
            for (int i = 0; i < 2; ++i) {
                x(i) = gauss(rng);
                pv(i) = gauss(rng);
            }
            const HamiltonianValue h = hamiltonian(p, x, pv);
            // The brute-force grid never beats the analytic maximizer by more
            // than its resolution, and the maximizer attains h exactly.
            const double brute = oracles::hamiltonian_brute_force(p, x, pv, 4.0, 81);
            CHECK(brute <= h.h + 1e-6);
            const double at_u_star =
                -pv.dot(p.a() * x + p.b() * h.u_star) - 0.5 * h.u_star.squaredNorm();
            CHECK(std::abs(at_u_star - h.h) <= 1e-9);
        }
    }
}

TEST_CASE("unconstrained Hamiltonian reduction") {
    const LqProblem p = example_problem("planar");
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x(2), pv(2);
        for (int i = 0; i < 2; ++i) {
            x(i) = gauss(rng);
            pv(i) = gauss(rng);
        }
        const double reduced =
            0.5 * (p.b().transpose() * pv).squaredNorm() - pv.dot(p.a() * x);
        CHECK(std::abs(hamiltonian(p, x, pv).h - reduced) <= 1e-12);
    }
}

TEST_CASE("maximizer depends on p only through B'p") {
    Matrix b(2, 1);
    b << 1.0, 0.0;  // ker(B') = span{e2}
    const LqProblem p(Matrix::Identity(2, 2) * -1.0, b, Matrix::Identity(2, 2),
                      Vector::Zero(2), ConstraintSet::box(scalar(-0.5), scalar(0.5)));
    std::mt19937_64 rng(6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x(2), pv(2);
        for (int i = 0; i < 2; ++i) {
            x(i) = gauss(rng);
            pv(i) = gauss(rng);
        }
        Vector w(2);
        w << 0.0, gauss(rng);  // B'w = 0
        const Vector u1 = hamiltonian(p, x, pv).u_star;
        const Vector u2 = hamiltonian(p, x, pv + w).u_star;
        CHECK((u1 - u2).norm() == 0.0);
    }
}

TEST_CASE("lambda sweep on the analytic integrator is identically zero") {
    const LambdaSweep sweep =
        estimate_lambda(integrator(), trivial_steady(), {5.0, 10.0, 20.0}, quick(500));
    CHECK(std::abs(sweep.estimate) <= 1e-6);
    for (double v : sweep.sequence) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("lambda sweep decreases for the stable scalar tracker") {
    const LqProblem p = example_problem("scalar_stable");
    const SteadySolution steady = solve_steady(p, 1e-13);
    const LambdaSweep sweep =
        estimate_lambda(p, steady, {5.0, 10.0, 20.0, 40.0}, quick(500));
    CHECK(sweep.estimate <= 0.0);
    for (size_t i = 1; i < sweep.sequence.size(); ++i)
        CHECK(sweep.sequence[i] <= sweep.sequence[i - 1] + 1e-9);
    CHECK(sweep.cauchy_gap <= 1e-3);
}

TEST_CASE("lambda sweep converges with a bounded-below quadratic final cost") {
    const LqProblem p = example_problem("scalar_saturated")
                            .with_final_cost(FinalCost::quadratic(
                                Matrix::Identity(1, 1), scalar(0.2)));
    const SteadySolution steady = solve_steady(p, 1e-12);
    const LambdaSweep sweep =
        estimate_lambda(p, steady, {5.0, 10.0, 20.0, 40.0}, quick(500));
    CHECK(std::isfinite(sweep.estimate));
    CHECK(sweep.cauchy_gap <= 1e-3);
}

TEST_CASE("lambda sweep validates its horizon list") {
    CHECK_THROWS_AS(estimate_lambda(integrator(), trivial_steady(), {5.0, 4.0, 20.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(estimate_lambda(integrator(), trivial_steady(), {1.0, 2.0}),
                    InvalidArgument);
}

TEST_CASE("decomposition certificate on the analytic chain") {
    std::vector<Vector> points;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) points.push_back(scalar(x));
    // The continuous error x^2 (1 - tanh T)/2 is ~1e-17 at T = 20; what is
    // measured is the solver's O(dt^2) quadrature bias, so dt must be fine
    // enough for the 1e-6 target.
    const AsymptoticsReport report = certify_decomposition(
        integrator(), trivial_steady(), points, {10.0, 20.0}, quick(8000));

    CHECK(report.pass);
    CHECK(report.decomposition_errors.col(1).maxCoeff() <= 1e-6);
    for (size_t i = 0; i < points.size(); ++i)
        CHECK(report.w_estimates[i] ==
              doctest::Approx(0.5 * points[i](0) * points[i](0)).epsilon(1e-9));
}

TEST_CASE("decomposition certificate on the saturated tracker") {
    const LqProblem p = example_problem("scalar_saturated");
    const SteadySolution steady = solve_steady(p, 1e-12);
    std::vector<Vector> points{scalar(0.0), scalar(1.0)};
    const AsymptoticsReport report =
        certify_decomposition(p, steady, points, {10.0, 20.0, 40.0}, quick(1000));
    CHECK(report.pass);
    // Errors shrink with the horizon at the tail of the sweep.
    for (int i = 0; i < report.decomposition_errors.rows(); ++i)
        CHECK(report.decomposition_errors(i, 2) <=
              report.decomposition_errors(i, 0) + 5e-3);
}

TEST_CASE("decomposition certificate on the planar tracker") {
    const LqProblem p = example_problem("planar");
    const SteadySolution steady = solve_steady(p, 1e-13);
    std::vector<Vector> points;
    Vector x(2);
    x << 1.0, -0.5;
    points.push_back(steady.y_bar);
    points.push_back(x);
    const AsymptoticsReport report =
        certify_decomposition(p, steady, points, {10.0, 20.0}, quick(1000));
    CHECK(report.pass);
}

TEST_CASE("Lipschitz ratios stay bounded across horizons") {
    SUBCASE("analytic scalar family") {
        const LipschitzProbe probe =
            lipschitz_probe(integrator(), trivial_steady(), scalar(0.0), 2.0, {5.0, 10.0},
                            12, quick(400));
        // |V(x2,T)-V(x1,T)|/|x2-x1| = |x1+x2| tanh(T)/2 <= 2 on the box.
        CHECK(probe.max_ratio_v <= 2.0 + 1e-6);
        const double lo = *std::min_element(probe.max_ratio_v_per_horizon.begin(),
                                            probe.max_ratio_v_per_horizon.end());
        const double hi = *std::max_element(probe.max_ratio_v_per_horizon.begin(),
                                            probe.max_ratio_v_per_horizon.end());
        CHECK(hi / lo <= 2.0);
        CHECK(probe.max_ratio_w <= 2.0 + 1e-6);
    }
    SUBCASE("constrained tracker") {
        const LqProblem p = example_problem("scalar_saturated");
        const SteadySolution steady = solve_steady(p, 1e-12);
        const LipschitzProbe probe =
            lipschitz_probe(p, steady, steady.y_bar, 1.5, {5.0, 10.0}, 12, quick(400));
        CHECK(std::isfinite(probe.max_ratio_v));
        const double lo = *std::min_element(probe.max_ratio_v_per_horizon.begin(),
                                            probe.max_ratio_v_per_horizon.end());
        const double hi = *std::max_element(probe.max_ratio_v_per_horizon.begin(),
                                            probe.max_ratio_v_per_horizon.end());
        CHECK(hi / lo <= 2.0);
    }
}

TEST_CASE("ergodic residual with closed-form W vanishes identically") {
    SUBCASE("integrator") {
        const LqProblem p = integrator();
        const AreSolution are = solve_are(p);
        std::vector<Vector> grid;
        for (double x = -2.0; x <= 2.0; x += 0.25) grid.push_back(scalar(x));
        const HjbResidualReport report = ergodic_residual(p, trivial_steady(), are, grid);
        CHECK(report.sup_ergodic() <= 1e-12);
    }
    SUBCASE("stable tracker, including at the turnpike") {
        const LqProblem p = example_problem("scalar_stable");
        const SteadySolution steady = solve_steady(p, 1e-13);
        const AreSolution are = solve_are(p);
        std::vector<Vector> grid{steady.y_bar};
        for (double x = -1.0; x <= 2.0; x += 0.5) grid.push_back(scalar(x));
        const HjbResidualReport report = ergodic_residual(p, steady, are, grid);
        CHECK(report.sup_ergodic() <= 1e-10);
    }
    SUBCASE("planar tracker") {
        const LqProblem p = example_problem("planar");
        const SteadySolution steady = solve_steady(p, 1e-13);
        const AreSolution are = solve_are(p);
        std::vector<Vector> grid;
        for (double s : {-1.0, 0.0, 1.0}) {
            Vector x(2);
            x << s, -s + 0.3;
            grid.push_back(x);
        }
        const HjbResidualReport report = ergodic_residual(p, steady, are, grid);
        CHECK(report.sup_ergodic() <= 1e-10);
    }
}

TEST_CASE("ergodic residual from a finite-difference W table") {
    const LqProblem p = example_problem("scalar_saturated");
    const SteadySolution steady = solve_steady(p, 1e-12);
    const double h = 0.05;
    const WTable table = build_w_table(p, steady, -1.0 - 2 * h, 1.5 + 2 * h, h, 30.0,
                                       quick(3000, 1e-11));
    const HjbResidualReport report = ergodic_residual(p, steady, table);
    CHECK(report.grid.size() == table.xs.size() - 2);
    CHECK(report.sup_ergodic(false) <= 5e-3);
}

TEST_CASE("evolution residual on the analytic value table") {
    // V(x,T) = x^2 tanh(T)/2 solves dV/dT + (dV/dx)^2/2 = x^2/2 exactly; a
    // table filled with the closed form isolates the finite-difference error.
    const LqProblem p = integrator();
    const int nx = 21, nt = 21;
    ValueTable table;
    table.xs = Vector::LinSpaced(nx, -2.0, 2.0);
    table.ts = Vector::LinSpaced(nt, 0.0, 2.0);
    table.v.resize(nx, nt);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            table.v(i, j) = 0.5 * table.xs(i) * table.xs(i) * std::tanh(table.ts(j));

    const HjbResidualReport report = evolution_residual(p, table);
    CHECK(report.boundary_error == 0.0);  // tanh(0) = 0 = g
    CHECK(report.evolution_residuals.cwiseAbs().maxCoeff() <= 5e-2);

    // Refining both grids by 2 shrinks the residual at second order.
    ValueTable fine;
    fine.xs = Vector::LinSpaced(2 * nx - 1, -2.0, 2.0);
    fine.ts = Vector::LinSpaced(2 * nt - 1, 0.0, 2.0);
    fine.v.resize(fine.xs.size(), fine.ts.size());
    for (int i = 0; i < fine.xs.size(); ++i)
        for (int j = 0; j < fine.ts.size(); ++j)
            fine.v(i, j) = 0.5 * fine.xs(i) * fine.xs(i) * std::tanh(fine.ts(j));
    const HjbResidualReport fine_report = evolution_residual(p, fine);
    const double order = std::log2(report.evolution_residuals.cwiseAbs().maxCoeff() /
                                   fine_report.evolution_residuals.cwiseAbs().maxCoeff());
    CHECK(order >= 1.6);
}

TEST_CASE("evolution residual from solver-built tables stays finite") {
    const LqProblem p = example_problem("scalar_saturated");
    const ValueTable table = build_value_table(
        p, Vector::LinSpaced(9, -0.5, 1.5), Vector::LinSpaced(6, 0.0, 5.0), quick(400));
    const HjbResidualReport report = evolution_residual(p, table);
    CHECK(report.boundary_error == 0.0);
    CHECK(report.evolution_residuals.allFinite());
}

TEST_CASE("wrong ergodic constants are rejected at exactly their offset") {
    const LqProblem p = example_problem("scalar_stable");
    const SteadySolution steady = solve_steady(p, 1e-13);
    const AreSolution are = solve_are(p);
    std::vector<Vector> grid;
    for (double x = -1.0; x <= 1.5; x += 0.1) grid.push_back(scalar(x));

    const std::vector<double> probe =
        wrong_constant_probe(p, steady, are, {0.0, 0.1, -0.05}, grid);
    CHECK(probe[0] <= 1e-10);
    CHECK(probe[1] == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(probe[2] == doctest::Approx(0.05).epsilon(1e-8));
}
