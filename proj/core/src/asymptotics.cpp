#include "turnpike/asymptotics.hpp"

#include "turnpike/errors.hpp"
#include "turnpike/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace turnpike {

namespace {

double running_target_cost(const LqProblem& p, const Vector& x) {
    return 0.5 * (p.c() * x - p.z()).squaredNorm();
}

// Horizon-proportional step count so dt stays fixed across a sweep.
SolveOptions scaled_options(const SolveOptions& opts, double horizon, double base_horizon) {
    SolveOptions o = opts;
    const double scale = horizon / base_horizon;
    o.steps = std::max(2, static_cast<int>(std::llround(opts.steps * scale)));
    if (o.steps % 2) ++o.steps;
    return o;
}

void check_horizons(const std::vector<double>& horizons, double min_largest) {
    if (horizons.empty()) throw InvalidArgument("horizons list is empty");
    for (size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0)) throw InvalidArgument("horizons must be positive");
        if (i && !(horizons[i] > horizons[i - 1]))
            throw InvalidArgument("horizons must be strictly increasing");
    }
    if (horizons.back() < min_largest)
        throw InvalidArgument("largest horizon must be at least " + std::to_string(min_largest));
}

}  // namespace

HamiltonianValue hamiltonian(const LqProblem& problem, const Vector& x, const Vector& p) {
    if (x.size() != problem.n() || p.size() != problem.n())
        throw InvalidArgument("hamiltonian: dimension mismatch");
    HamiltonianValue out;
    out.u_star = problem.constraints().project(-problem.b().transpose() * p);
    out.h = -p.dot(problem.a() * x + problem.b() * out.u_star) - 0.5 * out.u_star.squaredNorm();
    return out;
}

LambdaSweep estimate_lambda(const LqProblem& problem, const SteadySolution& steady,
                            const std::vector<double>& horizons, const SolveOptions& opts) {
    check_horizons(horizons, 10.0);

    LambdaSweep sweep;
    sweep.horizons = horizons;
    sweep.sequence.resize(horizons.size());

    parallel_for(static_cast<int>(horizons.size()), [&](int i) {
        const SolveOptions o = scaled_options(opts, horizons[i], horizons.front());
        sweep.sequence[i] =
            value(problem, steady.y_bar, horizons[i], o) - steady.v_s * horizons[i];
    });

    double scale = 1.0;
    for (double v : sweep.sequence) scale = std::max(scale, std::abs(v));
    for (size_t i = 1; i < sweep.sequence.size(); ++i)
        if (sweep.sequence[i] > sweep.sequence[i - 1] + 1e-6 * scale)
            throw NumericalFailure(
                "estimate_lambda: sequence V(y_bar,T) - V_s T increased beyond tolerance; "
                "solver accuracy is insufficient for this sweep");

    sweep.estimate = sweep.sequence.back();
    sweep.cauchy_gap = sweep.sequence.size() > 1
                           ? std::abs(sweep.sequence.back() - sweep.sequence[sweep.sequence.size() - 2])
                           : 0.0;
    return sweep;
}

AsymptoticsReport certify_decomposition(const LqProblem& problem, const SteadySolution& steady,
                                        const std::vector<Vector>& sample_points,
                                        const std::vector<double>& horizons,
                                        const SolveOptions& opts) {
    check_horizons(horizons, 10.0);
    if (sample_points.empty())
        throw InvalidArgument("certify_decomposition: no sample points");

    AsymptoticsReport report;
    report.horizons = horizons;
    report.sample_points = sample_points;

    const LambdaSweep sweep = estimate_lambda(problem, steady, horizons, opts);
    report.lambda_sequence = sweep.sequence;
    report.lambda_estimate = sweep.estimate;
    report.cauchy_gap = sweep.cauchy_gap;

    // W from the Riccati closed form when unconstrained, from the
    // half-horizon estimator at the largest horizon otherwise.
    const int points = static_cast<int>(sample_points.size());
    report.w_estimates.resize(points);
    if (problem.constraints().is_full_space()) {
        const AreSolution are = solve_are(problem);
        for (int i = 0; i < points; ++i)
            report.w_estimates[i] = w_closed_form(are, steady, sample_points[i]);
    } else {
        const SolveOptions o = scaled_options(opts, horizons.back(), horizons.front());
        std::vector<double> west(points);
        parallel_for(points, [&](int i) {
            west[i] = estimate_w(problem, steady, sample_points[i], horizons.back(), o);
        });
        for (int i = 0; i < points; ++i) report.w_estimates[i] = west[i];
    }

    const int nh = static_cast<int>(horizons.size());
    report.values.resize(points, nh);
    report.decomposition_errors.resize(points, nh);
    report.time_average_errors.resize(points, nh);
    parallel_for(points * nh, [&](int idx) {
        const int i = idx / nh;
        const int j = idx % nh;
        const SolveOptions o = scaled_options(opts, horizons[j], horizons.front());
        report.values(i, j) = value(problem, sample_points[i], horizons[j], o);
    });
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < nh; ++j) {
            const double v = report.values(i, j);
            const double t = horizons[j];
            report.decomposition_errors(i, j) =
                std::abs(v - steady.v_s * t - report.w_estimates[i] - report.lambda_estimate);
            report.time_average_errors(i, j) = std::abs(v / t - steady.v_s);
        }

    report.pass_threshold = std::max(5e-3, 3.0 * report.cauchy_gap);
    report.pass = report.decomposition_errors.col(nh - 1).maxCoeff() <= report.pass_threshold;
    return report;
}

LipschitzProbe lipschitz_probe(const LqProblem& problem, const SteadySolution& steady,
                               const Vector& center, double radius,
                               const std::vector<double>& horizons, int pairs,
                               const SolveOptions& opts) {
    if (pairs < 10) throw InvalidArgument("lipschitz_probe: pairs >= 10");
    check_horizons(horizons, 0.0);
    if (center.size() != problem.n()) throw InvalidArgument("lipschitz_probe: center dimension");

    std::mt19937_64 rng(opts.seed + 101);
    std::uniform_real_distribution<double> unif(-radius, radius);

    std::vector<std::pair<Vector, Vector>> draws;
    draws.reserve(pairs);
    while (static_cast<int>(draws.size()) < pairs) {
        Vector x1(problem.n()), x2(problem.n());
        for (int i = 0; i < problem.n(); ++i) {
            x1(i) = center(i) + unif(rng);
            x2(i) = center(i) + unif(rng);
        }
        if ((x2 - x1).norm() < 1e-8) continue;  // coincident draws carry no slope
        draws.emplace_back(std::move(x1), std::move(x2));
    }

    LipschitzProbe probe;
    probe.horizons = horizons;
    probe.max_ratio_v_per_horizon.assign(horizons.size(), 0.0);

    const int nh = static_cast<int>(horizons.size());
    Matrix ratio(pairs, nh);
    parallel_for(pairs * nh, [&](int idx) {
        const int i = idx / nh;
        const int j = idx % nh;
        const SolveOptions o = scaled_options(opts, horizons[j], horizons.front());
        const double v1 = value(problem, draws[i].first, horizons[j], o);
        const double v2 = value(problem, draws[i].second, horizons[j], o);
        ratio(i, j) = std::abs(v2 - v1) / (draws[i].second - draws[i].first).norm();
    });
    for (int j = 0; j < nh; ++j) probe.max_ratio_v_per_horizon[j] = ratio.col(j).maxCoeff();
    probe.max_ratio_v = ratio.maxCoeff();

    std::vector<double> wratio(pairs);
    parallel_for(pairs, [&](int i) {
        const SolveOptions o = scaled_options(opts, horizons.back(), horizons.front());
        const double w1 = estimate_w(problem, steady, draws[i].first, horizons.back(), o);
        const double w2 = estimate_w(problem, steady, draws[i].second, horizons.back(), o);
        wratio[i] = std::abs(w2 - w1) / (draws[i].second - draws[i].first).norm();
    });
    probe.max_ratio_w = *std::max_element(wratio.begin(), wratio.end());
    return probe;
}

WTable build_w_table(const LqProblem& problem, const SteadySolution& steady, double lo,
                     double hi, double h, double horizon, const SolveOptions& opts) {
    if (problem.n() != 1)
        throw InvalidArgument("build_w_table: finite-difference W tables are 1-D only");
    if (!(h > 0.0) || !(hi > lo)) throw InvalidArgument("build_w_table: bad grid");

    const int count = static_cast<int>(std::floor((hi - lo) / h + 0.5)) + 1;
    WTable table;
    table.h = h;
    table.xs = Vector::LinSpaced(count, lo, lo + h * (count - 1));
    table.values.resize(count);
    parallel_for(count, [&](int i) {
        Vector x(1);
        x << table.xs(i);
        table.values(i) = estimate_w(problem, steady, x, horizon, opts);
    });
    return table;
}

double HjbResidualReport::sup_ergodic(bool include_kinks) const {
    double sup = 0.0;
    for (size_t i = 0; i < ergodic_residuals.size(); ++i) {
        if (!include_kinks && i < kink_flags.size() && kink_flags[i]) continue;
        sup = std::max(sup, std::abs(ergodic_residuals[i]));
    }
    return sup;
}

HjbResidualReport ergodic_residual(const LqProblem& problem, const SteadySolution& steady,
                                   const AreSolution& are, const std::vector<Vector>& grid) {
    if (!problem.constraints().is_full_space())
        throw InvalidArgument("ergodic_residual: closed-form W requires U = R^m");

    HjbResidualReport report;
    report.gradient_scheme = "closed-form gradient E(x - y_bar) + p_bar";
    report.grid = grid;
    report.ergodic_residuals.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const Vector grad = w_closed_form_gradient(are, steady, grid[i]);
        report.ergodic_residuals[i] =
            steady.v_s + hamiltonian(problem, grid[i], grad).h - running_target_cost(problem, grid[i]);
    }
    return report;
}

HjbResidualReport ergodic_residual(const LqProblem& problem, const SteadySolution& steady,
                                   const WTable& table) {
    const int count = static_cast<int>(table.xs.size());
    if (count < 3) throw InvalidArgument("ergodic_residual: table needs >= 3 points");

    HjbResidualReport report;
    report.gradient_scheme =
        "central differences, step h = " + std::to_string(table.h);

    // Kink detection: second differences spiking above 10x their median mark
    // suspected nonsmooth points of W; those residuals are reported, not
    // certified.
    std::vector<double> second(count - 2);
    for (int i = 1; i + 1 < count; ++i)
        second[i - 1] =
            std::abs(table.values(i + 1) - 2.0 * table.values(i) + table.values(i - 1));
    std::vector<double> sorted = second;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];

    for (int i = 1; i + 1 < count; ++i) {
        Vector x(1);
        x << table.xs(i);
        Vector grad(1);
        grad << (table.values(i + 1) - table.values(i - 1)) / (2.0 * table.h);
        report.grid.push_back(x);
        report.ergodic_residuals.push_back(
            steady.v_s + hamiltonian(problem, x, grad).h - running_target_cost(problem, x));
        report.kink_flags.push_back(second[i - 1] > 10.0 * std::max(median, 1e-300) ? 1 : 0);
    }
    return report;
}

ValueTable build_value_table(const LqProblem& problem, const Vector& xs, const Vector& ts,
                             const SolveOptions& opts) {
    if (problem.n() != 1)
        throw InvalidArgument("build_value_table: tensor value tables are 1-D only");
    ValueTable table;
    table.xs = xs;
    table.ts = ts;
    table.v.resize(xs.size(), ts.size());

    const int nx = static_cast<int>(xs.size());
    const int nt = static_cast<int>(ts.size());
    parallel_for(nx * nt, [&](int idx) {
        const int i = idx / nt;
        const int j = idx % nt;
        Vector x(1);
        x << xs(i);
        if (ts(j) == 0.0) {
            table.v(i, j) = problem.final_cost().evaluate(x).value;  // V(x,0) = g(x)
        } else {
            SolveOptions o = opts;
            o.steps = std::max(2, static_cast<int>(std::ceil(opts.steps * ts(j) / ts(nt - 1))));
            table.v(i, j) = value(problem, x, ts(j), o);
        }
    });
    return table;
}

HjbResidualReport evolution_residual(const LqProblem& problem, const ValueTable& table) {
    const int nx = static_cast<int>(table.xs.size());
    const int nt = static_cast<int>(table.ts.size());
    if (nx < 3 || nt < 3) throw InvalidArgument("evolution_residual: degenerate grid");

    HjbResidualReport report;
    report.gradient_scheme = "central differences in x and T";
    report.evolution_residuals.resize(nx - 2, nt - 2);

    for (int i = 1; i + 1 < nx; ++i) {
        Vector x(1);
        x << table.xs(i);
        report.grid.push_back(x);
        for (int j = 1; j + 1 < nt; ++j) {
            const double hx = 0.5 * (table.xs(i + 1) - table.xs(i - 1));
            const double ht = 0.5 * (table.ts(j + 1) - table.ts(j - 1));
            Vector dvdx(1);
            dvdx << (table.v(i + 1, j) - table.v(i - 1, j)) / (2.0 * hx);
            const double dvdt = (table.v(i, j + 1) - table.v(i, j - 1)) / (2.0 * ht);
            report.evolution_residuals(i - 1, j - 1) =
                dvdt + hamiltonian(problem, x, dvdx).h - running_target_cost(problem, x);
        }
    }

    // The T = 0 column must hold the final cost itself when present.
    for (int i = 0; i < nx; ++i) {
        if (table.ts(0) != 0.0) break;
        Vector x(1);
        x << table.xs(i);
        report.boundary_error = std::max(
            report.boundary_error,
            std::abs(table.v(i, 0) - problem.final_cost().evaluate(x).value));
    }
    return report;
}

std::vector<double> wrong_constant_probe(const LqProblem& problem, const SteadySolution& steady,
                                         const AreSolution& are,
                                         const std::vector<double>& offsets,
                                         const std::vector<Vector>& grid) {
    const HjbResidualReport base = ergodic_residual(problem, steady, are, grid);
    std::vector<double> out(offsets.size());
    for (size_t k = 0; k < offsets.size(); ++k) {
        double min_abs = std::numeric_limits<double>::infinity();
        for (double r : base.ergodic_residuals)
            min_abs = std::min(min_abs, std::abs(r + offsets[k]));
        out[k] = min_abs;
    }
    return out;
}

}  // namespace turnpike
