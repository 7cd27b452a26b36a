#pragma once

// Test-only oracles, independent of the solver paths they check: dense grid
// minimization, brute-force Hamiltonian maximization, finite differences and
// random system generators.

#include "turnpike/model.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <utility>

namespace turnpike::oracles {

/// Dense 1-D grid search; returns (argmin, min).
inline std::pair<double, double> grid_min_1d(const std::function<double(double)>& f, double lo,
                                             double hi, double step) {
    double best_x = lo;
    double best = f(lo);
    const long count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long i = 1; i <= count; ++i) {
        const double x = lo + i * step;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return {best_x, best};
}

/// Brute-force maximization of u -> -p.(Ax+Bu) - |u|^2/2 over a grid of the
/// constraint set (components meshed over a bounding box, then projected).
inline double hamiltonian_brute_force(const LqProblem& p, const Vector& x, const Vector& pvec,
                                      double radius, int per_axis) {
    const int m = p.m();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(m, 0);
    for (;;) {
        Vector u(m);
        for (int j = 0; j < m; ++j)
            u(j) = -radius + 2.0 * radius * idx[j] / (per_axis - 1);
        u = p.constraints().project(u);
        best = std::max(best, -pvec.dot(p.a() * x + p.b() * u) - 0.5 * u.squaredNorm());

        int j = 0;
        for (; j < m; ++j) {
            if (++idx[j] < per_axis) break;
            idx[j] = 0;
        }
        if (j == m) break;
    }
    return best;
}

/// Central finite difference of a scalar function of a vector.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-6) {
    Vector g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Vector hi = x, lo = x;
        hi(i) += h;
        lo(i) -= h;
        g(i) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

/// Random system with a stable A shift plus rank-sufficient B and C; such
/// draws are stabilizable and detectable (checked by the caller if needed).
/// Near-singular A draws are rejected to keep conditioning reasonable.
inline LqProblem random_system(std::mt19937_64& rng, int n, int m, int q) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto fill = [&](int rows, int cols) {
        Matrix out(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out(i, j) = gauss(rng);
        return out;
    };
    Matrix a;
    do {
        a = fill(n, n);
        a -= (0.5 + 0.5 * n) * Matrix::Identity(n, n);  // push the spectrum left
    } while (Eigen::JacobiSVD<Matrix>(a).singularValues()(n - 1) < 0.2);
    const Matrix b = fill(n, m);
    const Matrix c = fill(q, n);
    Vector z(q);
    for (int i = 0; i < q; ++i) z(i) = gauss(rng);
    return LqProblem(a, b, c, z);
}

inline Vector scalar(double v) {
    Vector out(1);
    out << v;
    return out;
}

inline Matrix scalar_matrix(double v) {
    Matrix out(1, 1);
    out << v;
    return out;
}

}  // namespace turnpike::oracles
