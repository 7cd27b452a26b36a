// Command-line driver: parses a problem file, dispatches one command and
// writes CSV artifacts into the output directory.
//
// Exit status: 0 all checks passed, 1 a report-level assertion failed,
// 2 parse/usage errors, 3 violated solver hypotheses, 4 numerical failures.

#include "turnpike/asymptotics.hpp"
#include "turnpike/csv.hpp"
#include "turnpike/diagnostics.hpp"
#include "turnpike/errors.hpp"
#include "turnpike/model.hpp"
#include "turnpike/ocp.hpp"
#include "turnpike/parallel.hpp"
#include "turnpike/problem_io.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/steady.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace turnpike;

namespace {

struct RunConfig {
    std::string problem_path;
    std::string command;
    std::string output_dir = ".";
    std::vector<double> horizons;
    std::vector<double> initial_state;
    double epsilon = 0.05;
    int steps = 400;
    double tol = 1e-9;
    int max_iter = 20000;
    int restarts = 8;
    unsigned seed = 0;
};

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(std::stod(token));
    }
    return out;
}

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opts;
    opts.steps = cfg.steps;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.restarts = cfg.restarts;
    opts.seed = cfg.seed;
    return opts;
}

Vector initial_state(const RunConfig& cfg, const LqProblem& p) {
    if (cfg.initial_state.empty())
        throw InvalidArgument("this command needs --x with " + std::to_string(p.n()) +
                              " components");
    if (static_cast<int>(cfg.initial_state.size()) != p.n())
        throw InvalidArgument("--x needs " + std::to_string(p.n()) + " components");
    return to_vector(cfg.initial_state);
}

std::vector<double> horizons_or(const RunConfig& cfg, std::vector<double> fallback) {
    return cfg.horizons.empty() ? fallback : cfg.horizons;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

void append(std::vector<double>& row, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
}

void append(std::vector<double>& row, const Matrix& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    CsvWriter csv(path);
    csv.comment("t, y_1..y_n, u_1..u_m (final row repeats the last control)");
    const int last_control = static_cast<int>(traj.controls.rows()) - 1;
    for (int k = 0; k < traj.states.rows(); ++k) {
        std::vector<double> row{traj.times(k)};
        append(row, Vector(traj.states.row(k).transpose()));
        append(row, Vector(traj.controls.row(std::min(k, last_control)).transpose()));
        csv.row(row);
    }
}

void write_turnpike_row(CsvWriter& csv, double horizon, const TurnpikeReport& report) {
    std::vector<double> row{horizon,
                            report.epsilon,
                            report.tau_in,
                            report.tau_out,
                            report.mid_max_deviation,
                            report.integral_deviation,
                            report.sup_state_norm,
                            report.pass ? 1.0 : 0.0};
    if (report.exp_fit) {
        row.push_back(report.exp_fit->k);
        row.push_back(report.exp_fit->mu);
        row.push_back(report.exp_fit->fit_rms);
        row.push_back(report.exp_fit->degenerate ? 1.0 : 0.0);
    } else {
        row.insert(row.end(), {0.0, 0.0, 0.0, 1.0});
    }
    csv.row(row);
}

int cmd_check(const RunConfig& cfg, const ProblemFile& file) {
    const SystemReport report = analyze_system(file.problem, file.tol);
    std::cout << "stabilizable:        " << (report.stabilizable ? "yes" : "no") << "\n"
              << "detectable:          " << (report.detectable ? "yes" : "no") << "\n"
              << "controllable:        " << (report.controllable ? "yes" : "no") << "\n"
              << "A invertible:        " << (report.a_invertible ? "yes" : "no") << "\n"
              << "sigma_min(A):        " << report.min_singular_value_a << "\n"
              << "unstable eigenvalues:";
    for (const auto& l : report.unstable_eigenvalues)
        std::cout << " (" << l.real() << (l.imag() < 0 ? "" : "+") << l.imag() << "i)";
    std::cout << "\n";

    CsvWriter csv(out_path(cfg, "system_report.csv"));
    csv.comment("stabilizable, detectable, controllable, a_invertible, min_singular_value_a");
    csv.row({report.stabilizable ? 1.0 : 0.0, report.detectable ? 1.0 : 0.0,
             report.controllable ? 1.0 : 0.0, report.a_invertible ? 1.0 : 0.0,
             report.min_singular_value_a});
    return 0;
}

int cmd_steady(const RunConfig& cfg, const ProblemFile& file) {
    const SteadySolution sol = solve_steady(file.problem, file.tol);
    std::cout << "u_bar = [" << sol.u_bar.transpose() << "]\n"
              << "y_bar = [" << sol.y_bar.transpose() << "]\n"
              << "p_bar = [" << sol.p_bar.transpose() << "]\n"
              << "V_s = " << sol.v_s << ", KKT residual = " << sol.kkt_residual << "\n";

    CsvWriter csv(out_path(cfg, "steady.csv"));
    csv.comment("u_bar (m), y_bar (n), p_bar (n), v_s, kkt_residual");
    std::vector<double> row;
    append(row, sol.u_bar);
    append(row, sol.y_bar);
    append(row, sol.p_bar);
    row.push_back(sol.v_s);
    row.push_back(sol.kkt_residual);
    csv.row(row);
    return 0;
}

int cmd_are(const RunConfig& cfg, const ProblemFile& file) {
    const AreSolution are = solve_are(file.problem, file.tol);
    const double off = lambda_similarity_check(are);
    std::cout << "ARE residual:           " << are.are_residual << "\n"
              << "Lyapunov residual:      " << are.lyapunov_residual << "\n"
              << "closed-loop abscissa:   " << are.closed_loop_spectral_abscissa << "\n"
              << "similarity off-blocks:  " << off << "\n";

    CsvWriter csv(out_path(cfg, "are.csv"));
    csv.comment(
        "n, E row-major (n*n), closed_loop (n*n), S (n*n), are_residual, lyapunov_residual, "
        "closed_loop_spectral_abscissa, similarity_off_block_norm");
    std::vector<double> row{static_cast<double>(file.problem.n())};
    append(row, are.e_hat);
    append(row, are.closed_loop);
    append(row, are.s);
    row.insert(row.end(), {are.are_residual, are.lyapunov_residual,
                           are.closed_loop_spectral_abscissa, off});
    csv.row(row);
    return 0;
}

int cmd_solve(const RunConfig& cfg, const ProblemFile& file) {
    const Vector x = initial_state(cfg, file.problem);
    const double horizon = horizons_or(cfg, {10.0}).front();
    const Trajectory traj = solve_finite_horizon(file.problem, x, horizon, solve_options(cfg));
    write_trajectory_csv(out_path(cfg, "trajectory.csv"), traj);

    const SteadySolution steady = solve_steady(file.problem, file.tol);
    TurnpikeReport report = diagnose(traj, steady, cfg.epsilon);
    report.exp_fit = fit_exponential_envelope(traj, steady);

    CsvWriter csv(out_path(cfg, "turnpike_report.csv"));
    csv.comment(
        "T, epsilon, tau_in, tau_out, mid_max_deviation, integral_deviation, sup_state_norm, "
        "pass, exp_K, exp_mu, exp_rms, exp_degenerate");
    write_turnpike_row(csv, horizon, report);

    std::cout << "total cost " << traj.total_cost << " (pg residual " << traj.pg_residual
              << ", " << traj.iterations << " iterations)\n"
              << "turnpike containment: " << (report.pass ? "pass" : "FAIL") << " on ["
              << report.tau_in << ", " << report.tau_out << "]\n";
    return report.pass ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, const ProblemFile& file) {
    const SteadySolution steady = solve_steady(file.problem, file.tol);
    const Vector x0 = initial_state(cfg, file.problem);
    const std::vector<double> horizons = horizons_or(cfg, {5.0, 10.0, 20.0, 40.0});

    // Sample points along the segment through x0, centered on the turnpike.
    std::vector<Vector> points;
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0})
        points.push_back(steady.y_bar + s * (x0 - steady.y_bar));

    const AsymptoticsReport report =
        certify_decomposition(file.problem, steady, points, horizons, solve_options(cfg));

    {
        CsvWriter csv(out_path(cfg, "lambda_sweep.csv"));
        csv.comment("T, lambda_T = V(y_bar,T) - V_s T");
        for (size_t i = 0; i < report.horizons.size(); ++i)
            csv.row({report.horizons[i], report.lambda_sequence[i]});
    }
    {
        CsvWriter csv(out_path(cfg, "decomposition.csv"));
        csv.comment("x_1..x_n, T, V, V_minus_VsT, W_est, error");
        for (size_t i = 0; i < points.size(); ++i)
            for (size_t j = 0; j < report.horizons.size(); ++j) {
                std::vector<double> row;
                append(row, points[i]);
                const double t = report.horizons[j];
                const double v = report.values(i, j);
                row.push_back(t);
                row.push_back(v);
                row.push_back(v - steady.v_s * t);
                row.push_back(report.w_estimates[i]);
                row.push_back(report.decomposition_errors(i, j));
                csv.row(row);
            }
    }
    {
        CsvWriter csv(out_path(cfg, "time_average.csv"));
        csv.comment("x_1..x_n, T, abs(V/T - V_s)");
        for (size_t i = 0; i < points.size(); ++i)
            for (size_t j = 0; j < report.horizons.size(); ++j) {
                std::vector<double> row;
                append(row, points[i]);
                row.push_back(report.horizons[j]);
                row.push_back(report.time_average_errors(i, j));
                csv.row(row);
            }
    }

    std::cout << "lambda = " << report.lambda_estimate << " (Cauchy gap " << report.cauchy_gap
              << ")\n"
              << "decomposition error at T = " << horizons.back() << ": "
              << report.decomposition_errors.col(report.horizons.size() - 1).maxCoeff()
              << " (threshold " << report.pass_threshold << ")\n"
              << (report.pass ? "pass" : "FAIL") << "\n";
    return report.pass ? 0 : 1;
}

int cmd_turnpike(const RunConfig& cfg, const ProblemFile& file) {
    const SteadySolution steady = solve_steady(file.problem, file.tol);
    const Vector x = initial_state(cfg, file.problem);
    const std::vector<double> horizons = horizons_or(cfg, {10.0, 20.0, 40.0});

    std::vector<TurnpikeReport> reports(horizons.size());
    const SolveOptions base = solve_options(cfg);
    parallel_for(static_cast<int>(horizons.size()), [&](int i) {
        SolveOptions o = base;
        o.steps = std::max(base.steps, static_cast<int>(std::ceil(
                                           horizons[i] / horizons.front() * base.steps)));
        const Trajectory traj = solve_finite_horizon(file.problem, x, horizons[i], o);
        reports[i] = diagnose(traj, steady, cfg.epsilon);
        reports[i].exp_fit = fit_exponential_envelope(traj, steady);
    });

    CsvWriter csv(out_path(cfg, "turnpike_reports.csv"));
    csv.comment(
        "T, epsilon, tau_in, tau_out, mid_max_deviation, integral_deviation, sup_state_norm, "
        "pass, exp_K, exp_mu, exp_rms, exp_degenerate");
    bool all_pass = true;
    for (size_t i = 0; i < horizons.size(); ++i) {
        write_turnpike_row(csv, horizons[i], reports[i]);
        all_pass = all_pass && reports[i].pass;
        std::cout << "T = " << horizons[i] << ": " << (reports[i].pass ? "pass" : "FAIL")
                  << ", containment [" << reports[i].tau_in << ", " << reports[i].tau_out
                  << "], integral deviation " << reports[i].integral_deviation << "\n";
    }
    return all_pass ? 0 : 1;
}

void write_evolution_residual(const RunConfig& cfg, const LqProblem& p,
                              const SteadySolution& steady, double radius, double horizon) {
    if (p.n() != 1) return;  // tensor value tables are scalar-state only
    const Vector xs = Vector::LinSpaced(21, steady.y_bar(0) - radius, steady.y_bar(0) + radius);
    Vector ts(6);
    ts << 0.0, 0.2 * horizon, 0.4 * horizon, 0.6 * horizon, 0.8 * horizon, horizon;
    const ValueTable table = build_value_table(p, xs, ts, solve_options(cfg));
    const HjbResidualReport report = evolution_residual(p, table);

    CsvWriter csv(out_path(cfg, "evolution_residual.csv"));
    csv.comment("x, T, residual of dV/dT + H(x, dV/dx) - l(x) at interior nodes");
    for (int i = 0; i < report.evolution_residuals.rows(); ++i)
        for (int j = 0; j < report.evolution_residuals.cols(); ++j)
            csv.row({table.xs(i + 1), table.ts(j + 1), report.evolution_residuals(i, j)});
    std::cout << "max |evolution residual|: "
              << report.evolution_residuals.cwiseAbs().maxCoeff()
              << " (boundary error " << report.boundary_error << ")\n";
}

int cmd_hjb(const RunConfig& cfg, const ProblemFile& file) {
    const LqProblem& p = file.problem;
    const SteadySolution steady = solve_steady(p, file.tol);
    const double horizon = horizons_or(cfg, {30.0}).front();

    double radius = 1.0;
    if (!cfg.initial_state.empty())
        radius = 2.0 * (initial_state(cfg, p) - steady.y_bar).norm() + 1.0;

    if (p.constraints().is_full_space()) {
        const AreSolution are = solve_are(p, file.tol);
        std::vector<Vector> grid;
        const int count = 41;
        for (int i = 0; i < count; ++i)
            grid.push_back(steady.y_bar +
                           Vector::Constant(p.n(), -radius + 2.0 * radius * i / (count - 1)));
        const HjbResidualReport report = ergodic_residual(p, steady, are, grid);

        CsvWriter csv(out_path(cfg, "ergodic_residual.csv"));
        csv.comment("x_1..x_n, residual (closed-form gradient)");
        for (size_t i = 0; i < report.grid.size(); ++i) {
            std::vector<double> row;
            append(row, report.grid[i]);
            row.push_back(report.ergodic_residuals[i]);
            csv.row(row);
        }
        std::cout << "sup ergodic residual (closed form): " << report.sup_ergodic() << "\n";

        const std::vector<double> offsets{-0.1, -0.05, 0.05, 0.1};
        const std::vector<double> probe = wrong_constant_probe(p, steady, are, offsets, grid);
        CsvWriter wcsv(out_path(cfg, "wrong_constant.csv"));
        wcsv.comment("delta, min abs residual of the ergodic equation with constant V_s+delta");
        for (size_t i = 0; i < offsets.size(); ++i) wcsv.row({offsets[i], probe[i]});

        write_evolution_residual(cfg, p, steady, radius, std::min(horizon, 5.0));
        return 0;
    }

    if (p.n() != 1) {
        std::cerr << "hjb: finite-difference W tables are implemented for scalar state only\n";
        return 2;
    }
    const double h = 0.025;
    const double lo = steady.y_bar(0) - radius;
    const double hi = steady.y_bar(0) + radius;
    const WTable table =
        build_w_table(p, steady, lo - 2 * h, hi + 2 * h, h, horizon, solve_options(cfg));
    const HjbResidualReport report = ergodic_residual(p, steady, table);

    CsvWriter csv(out_path(cfg, "ergodic_residual.csv"));
    csv.comment("x, residual (central differences, h = " + CsvWriter::format(h) +
                "), kink_flag");
    for (size_t i = 0; i < report.grid.size(); ++i)
        csv.row({report.grid[i](0), report.ergodic_residuals[i],
                 static_cast<double>(report.kink_flags[i])});
    std::cout << "sup ergodic residual (fd table, non-kink): " << report.sup_ergodic(false)
              << "\n";

    write_evolution_residual(cfg, p, steady, radius, std::min(horizon, 5.0));
    return 0;
}

int cmd_nonuniq(const RunConfig& cfg, const ProblemFile& file) {
    const double horizon = horizons_or(cfg, {3.0}).front();
    const NonuniquenessResult result =
        reproduce_nonuniqueness(file.problem, horizon, solve_options(cfg));

    write_trajectory_csv(out_path(cfg, "trajectory_plus.csv"), result.plus);
    write_trajectory_csv(out_path(cfg, "trajectory_minus.csv"), result.minus);

    CsvWriter csv(out_path(cfg, "costs.csv"));
    csv.comment("cost_plus, cost_minus, cost_zero_control, abs_cost_difference");
    csv.row({result.plus.total_cost, result.minus.total_cost, result.cost_zero_control,
             std::abs(result.plus.total_cost - result.minus.total_cost)});

    std::cout << "two minimizers with costs " << result.plus.total_cost << " and "
              << result.minus.total_cost << "; zero control costs "
              << result.cost_zero_control << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string horizon_list, state_list;

    CLI::App app{"constrained LQ optimal control: turnpike and value-function asymptotics"};
    app.add_option("--problem", cfg.problem_path, "problem file")->required();
    app.add_option("--command", cfg.command,
                   "one of: check, steady, are, solve, sweep, turnpike, hjb, nonuniq")
        ->required();
    app.add_option("--out", cfg.output_dir, "output directory for CSV artifacts");
    app.add_option("--T", horizon_list, "comma-separated horizon list");
    app.add_option("--x", state_list, "comma-separated initial state");
    app.add_option("--eps", cfg.epsilon, "containment tolerance for turnpike reports");
    app.add_option("--N", cfg.steps, "time steps at the smallest horizon");
    app.add_option("--seed", cfg.seed, "RNG seed for solver restarts and probes");
    app.add_option("--tol", cfg.tol, "projected-gradient exit tolerance");
    app.add_option("--max-iter", cfg.max_iter, "solver iteration cap");
    app.add_option("--restarts", cfg.restarts, "multi-start count for nonconvex final costs");

    try {
        app.parse(argc, argv);
        if (!horizon_list.empty()) cfg.horizons = parse_number_list(horizon_list);
        if (!state_list.empty()) cfg.initial_state = parse_number_list(state_list);

        const ProblemFile file = parse_problem_file(cfg.problem_path);

        if (cfg.command == "check") return cmd_check(cfg, file);
        if (cfg.command == "steady") return cmd_steady(cfg, file);
        if (cfg.command == "are") return cmd_are(cfg, file);
        if (cfg.command == "solve") return cmd_solve(cfg, file);
        if (cfg.command == "sweep") return cmd_sweep(cfg, file);
        if (cfg.command == "turnpike") return cmd_turnpike(cfg, file);
        if (cfg.command == "hjb") return cmd_hjb(cfg, file);
        if (cfg.command == "nonuniq") return cmd_nonuniq(cfg, file);
        std::cerr << "unknown command: " << cfg.command << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << "problem file: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
}
