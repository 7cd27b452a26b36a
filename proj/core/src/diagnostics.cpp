#include "turnpike/diagnostics.hpp"

#include "turnpike/errors.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <random>

namespace turnpike {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// int_0^h exp(M's) Q exp(Ms) ds via the Van Loan block-exponential.
Matrix gramian(const Matrix& m, const Matrix& q, double h) {
    const int n = static_cast<int>(m.rows());
    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -m.transpose();
    block.topRightCorner(n, n) = q;
    block.bottomRightCorner(n, n) = m;
    const Matrix e = (block * h).exp();
    const Matrix f2 = e.bottomRightCorner(n, n);   // exp(M h)
    const Matrix g1 = e.topRightCorner(n, n);      // exp(-M'h) * Gram
    Matrix g = f2.transpose() * g1;
    return 0.5 * (g + g.transpose());
}

}  // namespace

double integral_deviation(const Trajectory& traj, const SteadySolution& steady) {
    const int nodes = static_cast<int>(traj.states.rows());
    double integral = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double w = (k == 0 || k == nodes - 1) ? 0.5 * traj.dt : traj.dt;
        integral += w * (traj.states.row(k).transpose() - steady.y_bar).squaredNorm();
    }
    for (int k = 0; k < traj.controls.rows(); ++k)
        integral += traj.dt * (traj.controls.row(k).transpose() - steady.u_bar).squaredNorm();
    return integral;
}

TurnpikeReport diagnose(const Trajectory& traj, const SteadySolution& steady, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("diagnose: epsilon must be positive");

    const int nodes = static_cast<int>(traj.states.rows());

    TurnpikeReport report;
    report.epsilon = epsilon;
    report.epsilon_warning = epsilon >= 1.0;

    Vector deviation(nodes);
    for (int k = 0; k < nodes; ++k)
        deviation(k) = (traj.states.row(k).transpose() - steady.y_bar).norm();
    report.sup_state_norm = traj.states.rowwise().norm().maxCoeff();
    report.integral_deviation = integral_deviation(traj, steady);

    int first = -1, last = -1;
    for (int k = 0; k < nodes; ++k) {
        if (deviation(k) < epsilon) {
            if (first < 0) first = k;
            last = k;
        }
    }
    if (first < 0) {
        report.tau_in = kNaN;
        report.tau_out = kNaN;
        report.mid_max_deviation = deviation.maxCoeff();
        report.pass = false;
        return report;
    }
    report.tau_in = traj.times(first);
    report.tau_out = traj.times(last);
    report.mid_max_deviation = deviation.segment(first, last - first + 1).maxCoeff();
    report.pass = report.mid_max_deviation < epsilon;
    return report;
}

RepresentationCheck representation_check(const Trajectory& traj, const SteadySolution& steady,
                                         const LqProblem& problem) {
    const Matrix& a = problem.a();
    const Matrix& b = problem.b();
    const Matrix& c = problem.c();
    const int n = problem.n();
    const int m = problem.m();
    const int steps = static_cast<int>(traj.controls.rows());
    const double dt = traj.dt;

    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw HypothesisViolation("representation_check: requires invertible A");

    // Exact interval Gramians for the ZOH flow.
    Matrix aug = Matrix::Zero(n + m, n + m);  // state [w; v], w' = A w + B v
    aug.topLeftCorner(n, n) = a;
    aug.topRightCorner(n, m) = b;
    Matrix q_dev = Matrix::Zero(n + m, n + m);  // |C w|^2
    q_dev.topLeftCorner(n, n) = c.transpose() * c;
    const Matrix gram_dev = gramian(aug, q_dev, dt);

    Matrix aug1 = Matrix::Zero(n + m + 1, n + m + 1);  // state [y; u; 1]
    aug1.topLeftCorner(n, n) = a;
    aug1.block(0, n, n, m) = b;
    Matrix lrow(c.rows(), n + m + 1);  // |C y - z|^2 = |L [y; u; 1]|^2
    lrow.setZero();
    lrow.leftCols(n) = c;
    lrow.rightCols(1) = -problem.z();
    const Matrix gram_direct = gramian(aug1, lrow.transpose() * lrow, dt);

    const Vector cz_mis = c.transpose() * (c * steady.y_bar - problem.z());
    const double g_end = problem.final_cost().evaluate(traj.states.row(steps).transpose()).value;
    const double horizon = traj.horizon;

    double j_direct = 0.0;        // 1/2 int |u|^2 + 1/2 int |Cy - z|^2
    double quad_dev = 0.0;        // int |u - u_bar|^2 + |C(y - y_bar)|^2
    double linear_terms = 0.0;    // int (u_bar, u-u_bar) + (C y_bar - z, C(y - y_bar))
    for (int k = 0; k < steps; ++k) {
        const Vector y = traj.states.row(k).transpose();
        const Vector y_next = traj.states.row(k + 1).transpose();
        const Vector u = traj.controls.row(k).transpose();
        const Vector w = y - steady.y_bar;
        const Vector w_next = y_next - steady.y_bar;
        const Vector v = u - steady.u_bar;

        Vector zeta(n + m + 1);
        zeta << y, u, 1.0;
        j_direct += dt * 0.5 * u.squaredNorm() + 0.5 * zeta.dot(gram_direct * zeta);

        Vector xi(n + m);
        xi << w, v;
        quad_dev += dt * v.squaredNorm() + xi.dot(gram_dev * xi);

        // int w ds over the interval, exact for the ZOH flow.
        const Vector w_int = lu.solve(w_next - w - dt * (b * v));
        linear_terms += dt * steady.u_bar.dot(v) + cz_mis.dot(w_int);
    }

    const double expansion = horizon * steady.v_s + 0.5 * quad_dev + linear_terms + g_end;
    const double lower_bound =
        horizon * steady.v_s + 0.5 * quad_dev +
        steady.p_bar.dot(traj.states.row(0).transpose() - traj.states.row(steps).transpose()) +
        g_end;

    RepresentationCheck out;
    out.identity_gap = std::abs((j_direct + g_end) - expansion);
    out.inequality_slack = (j_direct + g_end) - lower_bound;
    return out;
}

std::vector<double> integral_uniformity_probe(const LqProblem& problem,
                                              const SteadySolution& steady, const Vector& x,
                                              const std::vector<double>& horizons,
                                              const SolveOptions& opts) {
    for (size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw InvalidArgument("integral_uniformity_probe: horizons must increase");

    std::vector<double> deviations(horizons.size());
    for (size_t i = 0; i < horizons.size(); ++i) {
        SolveOptions o = opts;
        // Keep dt roughly fixed across the sweep rather than the step count.
        o.steps = std::max(opts.steps, static_cast<int>(std::ceil(
                                           horizons[i] * opts.steps / horizons.front())));
        const Trajectory traj = solve_finite_horizon(problem, x, horizons[i], o);
        deviations[i] = integral_deviation(traj, steady);
    }
    return deviations;
}

ExponentialFit fit_exponential_envelope(const Trajectory& traj, const SteadySolution& steady) {
    const int nodes = static_cast<int>(traj.states.rows());
    const int last_control = static_cast<int>(traj.controls.rows()) - 1;
    const double horizon = traj.horizon;

    const auto deviation = [&](int k) {
        const int uk = std::min(k, last_control);
        return (traj.states.row(k).transpose() - steady.y_bar).norm() +
               (traj.controls.row(uk).transpose() - steady.u_bar).norm();
    };

    // Nodes at the numerical floor carry no rate information. Six decades
    // below the peak deviation is past any honest exponential fit and below
    // typical solver floors, so everything quieter is excluded.
    double max_dev = 0.0;
    for (int k = 0; k < nodes; ++k) max_dev = std::max(max_dev, deviation(k));
    const double floor = std::max(1e-16, 1e-6 * max_dev);

    std::vector<double> ts, logs;
    int candidates = 0;
    for (int k = 0; k < nodes; ++k) {
        const double t = traj.times(k);
        const bool head = t <= 0.25 * horizon;
        const bool tail = t >= 0.75 * horizon;
        if (!head && !tail) continue;  // middle half sits at the noise floor
        ++candidates;
        const double dev = deviation(k);
        if (dev <= floor) continue;
        ts.push_back(head ? t : horizon - t);
        logs.push_back(std::log(dev));
    }

    ExponentialFit fit;
    const int count = static_cast<int>(ts.size());
    if (count < 3 || 4 * count < candidates) {  // most nodes at the floor
        fit.degenerate = true;
        return fit;
    }

    // log d = log K - mu * s with s the distance to the nearer endpoint.
    Matrix design(count, 2);
    Vector rhs(count);
    for (int i = 0; i < count; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = -ts[i];
        rhs(i) = logs[i];
    }
    const Vector sol = design.colPivHouseholderQr().solve(rhs);
    fit.k = std::exp(sol(0));
    fit.mu = sol(1);
    fit.fit_rms = std::sqrt((design * sol - rhs).squaredNorm() / count);
    fit.degenerate = !(fit.mu > 0.0);
    return fit;
}

double observability_constant_probe(const Matrix& a, const Matrix& c, int trials,
                                    double horizon, unsigned seed) {
    if (trials < 1) throw InvalidArgument("observability_constant_probe: trials >= 1");
    if (!(horizon > 0.0)) throw InvalidArgument("observability_constant_probe: horizon > 0");
    if (!is_detectable_pair(a, c))
        throw HypothesisViolation("observability_constant_probe: (A,C) is not detectable");

    const int n = static_cast<int>(a.rows());
    const int pieces = std::max(10, static_cast<int>(std::ceil(4.0 * horizon)));
    const double piece_len = horizon / pieces;
    const int substeps = std::max(4, static_cast<int>(std::ceil(piece_len / 0.02)));
    const double h = piece_len / substeps;

    // ZOH propagators for dy = A y + f with f constant on each piece.
    Matrix aug = Matrix::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = a;
    aug.topRightCorner(n, n) = Matrix::Identity(n, n);
    const Matrix e = (aug * h).exp();
    const Matrix ad = e.topLeftCorner(n, n);
    const Matrix fd = e.topRightCorner(n, n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double k_emp = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Vector y(n);
        for (int i = 0; i < n; ++i) y(i) = gauss(rng);
        Matrix f(pieces, n);
        for (int p = 0; p < pieces; ++p)
            for (int i = 0; i < n; ++i) f(p, i) = gauss(rng);

        double sup_y2 = y.squaredNorm();
        double int_f2 = 0.0;
        const double y0_2 = y.squaredNorm();

        // Trapezoid on the fine grid: half weights at both endpoints.
        double acc_y2 = 0.5 * y.squaredNorm();
        double acc_cy2 = 0.5 * (c * y).squaredNorm();
        for (int p = 0; p < pieces; ++p) {
            const Vector fp = f.row(p).transpose();
            int_f2 += piece_len * fp.squaredNorm();
            for (int s = 0; s < substeps; ++s) {
                y = ad * y + fd * fp;
                const bool last = (p == pieces - 1 && s == substeps - 1);
                const double weight = last ? 0.5 : 1.0;
                acc_y2 += weight * y.squaredNorm();
                acc_cy2 += weight * (c * y).squaredNorm();
                sup_y2 = std::max(sup_y2, y.squaredNorm());
            }
        }
        const double int_y2 = h * acc_y2;
        const double int_cy2 = h * acc_cy2;

        const double rhs = y0_2 + int_cy2 + int_f2;
        if (rhs < 1e-12) continue;  // trivial draw
        k_emp = std::max(k_emp, (sup_y2 + int_y2) / rhs);
    }
    return k_emp;
}

}  // namespace turnpike
