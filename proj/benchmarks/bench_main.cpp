#include "turnpike/asymptotics.hpp"
#include "turnpike/ocp.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/steady.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace turnpike;

namespace {

LqProblem random_problem(int n, int m, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(n, n), b(n, m), c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = gauss(rng);
            c(i, j) = gauss(rng);
        }
    a -= (0.5 + 0.5 * n) * Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = gauss(rng);
    Vector z(n);
    for (int i = 0; i < n; ++i) z(i) = gauss(rng);
    return LqProblem(a, b, c, z);
}

void bm_solve_are(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const LqProblem p = random_problem(n, std::max(1, n / 2), 42 + n);
    for (auto _ : state) benchmark::DoNotOptimize(solve_are(p));
}
BENCHMARK(bm_solve_are)->Arg(2)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

void bm_solve_steady(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const LqProblem p = random_problem(n, std::max(1, n / 2), 7 + n);
    for (auto _ : state) benchmark::DoNotOptimize(solve_steady(p, 1e-10));
}
BENCHMARK(bm_solve_steady)->Arg(2)->Arg(10)->Arg(40);

void bm_finite_horizon(benchmark::State& state) {
    const LqProblem p = random_problem(4, 2, 11);
    SolveOptions opts;
    opts.steps = static_cast<int>(state.range(0));
    opts.tol = 1e-8;
    const Vector x = Vector::Ones(4);
    for (auto _ : state) benchmark::DoNotOptimize(solve_finite_horizon(p, x, 10.0, opts));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_finite_horizon)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void bm_riccati_sweep(benchmark::State& state) {
    const LqProblem p = random_problem(4, 2, 11);
    const Vector x = Vector::Ones(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(riccati_ode_value(p, x, 10.0, static_cast<int>(state.range(0))));
}
BENCHMARK(bm_riccati_sweep)->Arg(500)->Arg(2000);

void bm_hamiltonian(benchmark::State& state) {
    const LqProblem p =
        random_problem(6, 3, 3).with_constraints(ConstraintSet::ball(Vector::Zero(3), 1.0));
    const Vector x = Vector::Ones(6);
    const Vector pv = -Vector::Ones(6);
    for (auto _ : state) benchmark::DoNotOptimize(hamiltonian(p, x, pv));
}
BENCHMARK(bm_hamiltonian);

}  // namespace

BENCHMARK_MAIN();
