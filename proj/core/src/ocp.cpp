#include "turnpike/ocp.hpp"

#include "turnpike/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>

namespace turnpike {

Discretization discretize(const LqProblem& problem, double horizon, int steps) {
    if (!(horizon > 0.0)) throw InvalidArgument("discretize: horizon must be positive");
    if (steps < 2) throw InvalidArgument("discretize: need at least 2 steps");

    const int n = problem.n();
    const int m = problem.m();
    Discretization d;
    d.steps = steps;
    d.dt = horizon / steps;

    // Augmented matrix exponential: exp(dt [[A, B],[0, 0]]) = [[Ad, Bd],[0, I]].
    Matrix aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = problem.a();
    aug.topRightCorner(n, m) = problem.b();
    const Matrix e = (aug * d.dt).exp();
    d.ad = e.topLeftCorner(n, n);
    d.bd = e.topRightCorner(n, m);

    d.state_weights = Vector::Constant(steps + 1, d.dt);
    d.state_weights(0) = 0.5 * d.dt;
    d.state_weights(steps) = 0.5 * d.dt;
    return d;
}

Matrix simulate_states(const Discretization& d, const Vector& x, const Matrix& controls) {
    const int n = static_cast<int>(d.ad.rows());
    if (controls.rows() != d.steps)
        throw InvalidArgument("simulate_states: controls must have N rows");
    Matrix states(d.steps + 1, n);
    states.row(0) = x.transpose();
    Vector y = x;
    for (int k = 0; k < d.steps; ++k) {
        y = d.ad * y + d.bd * controls.row(k).transpose();
        states.row(k + 1) = y.transpose();
    }
    return states;
}

namespace {

struct CostBreakdown {
    double running = 0.0;
    double final_cost = 0.0;
    double total = 0.0;
};

CostBreakdown evaluate_cost(const LqProblem& p, const Discretization& d, const Matrix& states,
                            const Matrix& controls) {
    CostBreakdown out;
    for (int k = 0; k <= d.steps; ++k) {
        const Vector mis = p.c() * states.row(k).transpose() - p.z();
        out.running += d.state_weights(k) * 0.5 * mis.squaredNorm();
    }
    for (int k = 0; k < d.steps; ++k)
        out.running += d.dt * 0.5 * controls.row(k).squaredNorm();
    out.final_cost = p.final_cost().evaluate(states.row(d.steps).transpose()).value;
    out.total = out.running + out.final_cost;
    return out;
}

// Gradient of the discretized functional by the backward adjoint recursion.
Matrix adjoint_gradient(const LqProblem& p, const Discretization& d, const Matrix& states,
                        const Matrix& controls) {
    Matrix grad(d.steps, p.m());
    Vector lambda = d.state_weights(d.steps) * p.c().transpose() *
                        (p.c() * states.row(d.steps).transpose() - p.z()) +
                    p.final_cost().evaluate(states.row(d.steps).transpose()).gradient;
    for (int k = d.steps - 1; k >= 0; --k) {
        grad.row(k) = (d.dt * controls.row(k).transpose() + d.bd.transpose() * lambda).transpose();
        lambda = d.state_weights(k) * p.c().transpose() *
                     (p.c() * states.row(k).transpose() - p.z()) +
                 d.ad.transpose() * lambda;
    }
    return grad;
}

// Hessian action of the quadratic cost part (running cost plus a quadratic
// final cost if present), used to estimate the gradient Lipschitz constant.
Matrix quadratic_hessian_apply(const LqProblem& p, const Discretization& d, const Matrix& du) {
    const Matrix dy = simulate_states(d, Vector::Zero(p.n()), du);
    Matrix out(d.steps, p.m());
    Vector lambda = d.state_weights(d.steps) * p.c().transpose() *
                    (p.c() * dy.row(d.steps).transpose());
    if (const QuadraticCost* g = std::get_if<QuadraticCost>(&p.final_cost().variant()))
        lambda += g->q_t * dy.row(d.steps).transpose();
    for (int k = d.steps - 1; k >= 0; --k) {
        out.row(k) = (d.dt * du.row(k).transpose() + d.bd.transpose() * lambda).transpose();
        lambda = d.state_weights(k) * p.c().transpose() * (p.c() * dy.row(k).transpose()) +
                 d.ad.transpose() * lambda;
    }
    return out;
}

double estimate_lipschitz(const LqProblem& p, const Discretization& d, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix v(d.steps, p.m());
    for (int k = 0; k < d.steps; ++k)
        for (int j = 0; j < p.m(); ++j) v(k, j) = gauss(rng);
    v /= v.norm();

    double lip = d.dt;
    for (int it = 0; it < 40; ++it) {
        const Matrix hv = quadratic_hessian_apply(p, d, v);
        const double nrm = hv.norm();
        if (nrm <= 0.0) break;
        lip = nrm;
        v = hv / nrm;
    }
    return lip;
}

Matrix project_rows(const ConstraintSet& u_set, const Matrix& controls) {
    if (u_set.is_full_space()) return controls;
    Matrix out = controls;
    for (int k = 0; k < controls.rows(); ++k)
        out.row(k) = u_set.project(controls.row(k).transpose()).transpose();
    return out;
}

struct FistaResult {
    Matrix controls;
    Matrix states;
    CostBreakdown cost;
    double pg_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

FistaResult fista(const LqProblem& p, const Discretization& d, const Vector& x,
                  const Matrix& u_init, double lip0, double tol, int max_iter) {
    const ConstraintSet& u_set = p.constraints();

    Matrix u = project_rows(u_set, u_init);
    Matrix v = u;
    double t = 1.0;
    double lip = lip0;

    Matrix states = simulate_states(d, x, u);
    CostBreakdown cost = evaluate_cost(p, d, states, u);

    FistaResult res;
    int it = 0;
    for (; it < max_iter && !res.converged; ++it) {
        const Matrix states_v = simulate_states(d, x, v);
        const CostBreakdown cost_v = evaluate_cost(p, d, states_v, v);
        const Matrix grad_v = adjoint_gradient(p, d, states_v, v);
        if (!grad_v.allFinite())
            throw NumericalFailure("solve_finite_horizon: NaN in gradient iterates");

        // Backtracking keeps the majorization valid when the nonconvex final
        // cost is locally stiffer than the quadratic-part estimate.
        Matrix u_new;
        Matrix states_new;
        CostBreakdown cost_new;
        for (;;) {
            u_new = project_rows(u_set, v - grad_v / lip);
            states_new = simulate_states(d, x, u_new);
            cost_new = evaluate_cost(p, d, states_new, u_new);
            const Matrix du = u_new - v;
            const double quad_bound = cost_v.total + grad_v.cwiseProduct(du).sum() +
                                      0.5 * lip * du.squaredNorm();
            if (cost_new.total <= quad_bound + 1e-12 * (1.0 + std::abs(cost_v.total))) break;
            lip *= 2.0;
            if (lip > 1e18)
                throw NumericalFailure("solve_finite_horizon: backtracking step collapsed");
        }
        if (!u_new.allFinite())
            throw NumericalFailure("solve_finite_horizon: NaN in control iterates");

        if (cost_new.total > cost.total) {
            // Function-value restart: drop momentum and retry from the best
            // point. A restart from the best point itself means the step can
            // no longer improve the cost in double precision; stop there.
            if (v == u) break;
            v = u;
            t = 1.0;
            continue;
        }

        const bool no_movement = (u_new == u);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        v = u_new + ((t - 1.0) / t_next) * (u_new - u);
        t = t_next;
        u = u_new;
        states = states_new;
        cost = cost_new;

        // Unit-step projected-gradient residual at the accepted iterate.
        const Matrix grad_u = adjoint_gradient(p, d, states, u);
        const double pg = (u - project_rows(u_set, u - grad_u)).norm();
        if (pg <= tol) {
            res.pg_residual = pg;
            res.converged = true;
        } else if (no_movement) {
            break;  // fixed point of the update map at this precision
        }
    }

    if (!res.converged) {
        const Matrix grad_u = adjoint_gradient(p, d, states, u);
        res.pg_residual = (u - project_rows(u_set, u - grad_u)).norm();
        res.converged = res.pg_residual <= tol;
    }
    res.controls = u;
    res.states = states;
    res.cost = cost;
    res.iterations = it;
    return res;
}

Trajectory assemble(const Discretization& d, double horizon,
                    const FistaResult& r) {
    Trajectory traj;
    traj.horizon = horizon;
    traj.dt = d.dt;
    traj.times = Vector::LinSpaced(d.steps + 1, 0.0, horizon);
    traj.states = r.states;
    traj.controls = r.controls;
    traj.running_cost = r.cost.running;
    traj.final_cost = r.cost.final_cost;
    traj.total_cost = r.cost.total;
    traj.pg_residual = r.pg_residual;
    traj.iterations = r.iterations;
    traj.converged = r.converged;
    return traj;
}

}  // namespace

Trajectory evaluate_control(const LqProblem& problem, const Vector& x, double horizon,
                            const Matrix& controls) {
    if (x.size() != problem.n()) throw InvalidArgument("evaluate_control: state dimension");
    const Discretization d = discretize(problem, horizon, static_cast<int>(controls.rows()));
    FistaResult r;
    r.controls = project_rows(problem.constraints(), controls);
    r.states = simulate_states(d, x, r.controls);
    r.cost = evaluate_cost(problem, d, r.states, r.controls);
    const Matrix g = adjoint_gradient(problem, d, r.states, r.controls);
    r.pg_residual = (r.controls - project_rows(problem.constraints(), r.controls - g)).norm();
    return assemble(d, horizon, r);
}

Trajectory solve_finite_horizon(const LqProblem& problem, const Vector& x, double horizon,
                                const SolveOptions& opts) {
    if (x.size() != problem.n())
        throw InvalidArgument("solve_finite_horizon: state dimension mismatch");
    if (opts.steps < 2) throw InvalidArgument("solve_finite_horizon: opts.steps >= 2");
    if (!(opts.tol > 0.0)) throw InvalidArgument("solve_finite_horizon: opts.tol > 0");

    const Discretization d = discretize(problem, horizon, opts.steps);
    const double lip0 = 1.1 * estimate_lipschitz(problem, d, opts.seed);

    const bool multistart = problem.final_cost().is_nonconvex() && opts.restarts > 0;
    const Matrix zero_init = Matrix::Zero(d.steps, problem.m());

    FistaResult best = fista(problem, d, x, zero_init, lip0, opts.tol, opts.max_iter);
    double worst_cost = best.cost.total;

    if (multistart) {
        // Random starts live in a box whose radius tracks the steady control
        // scale when the steady problem is solvable.
        double radius = 1.0;
        try {
            radius = 1.0 + solve_steady(problem).u_bar.norm();
        } catch (const std::exception&) {
        }
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int r = 0; r < opts.restarts; ++r) {
            Matrix init(d.steps, problem.m());
            for (int k = 0; k < d.steps; ++k)
                for (int j = 0; j < problem.m(); ++j) init(k, j) = radius * unif(rng);
            FistaResult cand = fista(problem, d, x, init, lip0, opts.tol, opts.max_iter);
            worst_cost = std::max(worst_cost, cand.cost.total);
            if (cand.cost.total < best.cost.total) best = std::move(cand);
        }
    }

    Trajectory traj = assemble(d, horizon, best);
    if (multistart) traj.multistart_spread = worst_cost - best.cost.total;
    return traj;
}

double value(const LqProblem& problem, const Vector& x, double horizon,
             const SolveOptions& opts) {
    return solve_finite_horizon(problem, x, horizon, opts).total_cost;
}

namespace {

// Running cost of the leading half of a trajectory: exact dt weights on the
// controls, trapezoid on the states, split at node N/2.
double half_running_cost(const LqProblem& p, const Trajectory& traj) {
    const int half = static_cast<int>(traj.controls.rows()) / 2;
    const double dt = traj.dt;
    double cost = 0.0;
    for (int k = 0; k <= half; ++k) {
        const double w = (k == 0 || k == half) ? 0.5 * dt : dt;
        const Vector mis = p.c() * traj.states.row(k).transpose() - p.z();
        cost += w * 0.5 * mis.squaredNorm();
    }
    for (int k = 0; k < half; ++k) cost += dt * 0.5 * traj.controls.row(k).squaredNorm();
    return cost;
}

int even_steps(int steps) { return steps % 2 == 0 ? steps : steps + 1; }

}  // namespace

double estimate_w(const LqProblem& problem, const SteadySolution& steady, const Vector& x,
                  double horizon, const SolveOptions& opts) {
    SolveOptions o = opts;
    o.steps = even_steps(opts.steps);
    const LqProblem free_end = problem.with_final_cost(FinalCost::zero());
    const Trajectory traj = solve_finite_horizon(free_end, x, horizon, o);
    return half_running_cost(problem, traj) - 0.5 * horizon * steady.v_s;
}

double dpp_check(const LqProblem& problem, const Vector& x, double horizon,
                 const SolveOptions& opts) {
    SolveOptions o = opts;
    o.steps = even_steps(opts.steps);
    const Trajectory traj = solve_finite_horizon(problem, x, horizon, o);

    const int half = o.steps / 2;
    const Vector y_mid = traj.states.row(half).transpose();
    SolveOptions o_half = o;
    o_half.steps = half;
    const double v_tail = value(problem, y_mid, 0.5 * horizon, o_half);
    return std::abs(traj.total_cost - (half_running_cost(problem, traj) + v_tail));
}

double gradient_check(const LqProblem& problem, const Vector& x, double horizon,
                      const SolveOptions& opts, int probes) {
    if (probes < 1) throw InvalidArgument("gradient_check: probes >= 1");
    const Discretization d = discretize(problem, horizon, opts.steps);
    std::mt19937_64 rng(opts.seed + 17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    double worst = 0.0;
    for (int pr = 0; pr < probes; ++pr) {
        Matrix u(d.steps, problem.m());
        Matrix dir(d.steps, problem.m());
        for (int k = 0; k < d.steps; ++k)
            for (int j = 0; j < problem.m(); ++j) {
                u(k, j) = unif(rng);
                dir(k, j) = unif(rng);
            }
        dir /= dir.norm();

        const Matrix states = simulate_states(d, x, u);
        const Matrix grad = adjoint_gradient(problem, d, states, u);
        const double directional = grad.cwiseProduct(dir).sum();

        const double h = 1e-5;
        const auto cost_at = [&](const Matrix& uu) {
            return evaluate_cost(problem, d, simulate_states(d, x, uu), uu).total;
        };
        const double fd = (cost_at(u + h * dir) - cost_at(u - h * dir)) / (2.0 * h);
        const double err = std::abs(directional - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
    }
    return worst;
}

NonuniquenessResult reproduce_nonuniqueness(const LqProblem& problem, double horizon,
                                            const SolveOptions& opts) {
    if (!problem.final_cost().is_nonconvex() || !problem.final_cost().is_even())
        throw InvalidArgument("reproduce_nonuniqueness: needs the even double-well final cost");
    if (problem.z().norm() != 0.0)
        throw InvalidArgument("reproduce_nonuniqueness: requires target z = 0");
    if (!analyze_system(problem).controllable)
        throw HypothesisViolation("reproduce_nonuniqueness: (A,B) must be controllable");

    SolveOptions o = opts;
    o.restarts = std::max(opts.restarts, 4);
    const Vector x0 = Vector::Zero(problem.n());

    NonuniquenessResult out;
    out.plus = solve_finite_horizon(problem, x0, horizon, o);
    out.cost_zero_control =
        evaluate_control(problem, x0, horizon, Matrix::Zero(o.steps, problem.m())).total_cost;

    if (out.plus.total_cost >= 0.0)
        throw NumericalFailure(
            "reproduce_nonuniqueness: best cost is nonnegative; eps is too large for the "
            "double well to beat u = 0 on this horizon");

    out.minus = evaluate_control(problem, x0, horizon, -out.plus.controls);
    return out;
}

}  // namespace turnpike
