#include "turnpike/schur.hpp"

#include "turnpike/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace turnpike {
namespace {

// Swaps the diagonal entries t(k,k) and t(k+1,k+1) of an upper triangular T
// by a 2x2 unitary similarity, updating U accordingly. The rotation maps the
// eigenvector [t12, l2 - l1] of the trailing eigenvalue onto e1.
void swap_adjacent(ComplexMatrix& t, ComplexMatrix& u, int k) {
    const std::complex<double> l1 = t(k, k);
    const std::complex<double> l2 = t(k + 1, k + 1);
    const std::complex<double> t12 = t(k, k + 1);

    const std::complex<double> x1 = t12;
    const std::complex<double> x2 = l2 - l1;
    const double nrm = std::sqrt(std::norm(x1) + std::norm(x2));
    if (nrm == 0.0) return;  // equal eigenvalues, nothing to reorder

    Eigen::Matrix2cd q;
    q << x1 / nrm, -std::conj(x2) / nrm,
         x2 / nrm,  std::conj(x1) / nrm;

    t.middleRows(k, 2) = q.adjoint() * t.middleRows(k, 2);
    t.middleCols(k, 2) = t.middleCols(k, 2) * q;
    u.middleCols(k, 2) = u.middleCols(k, 2) * q;
    t(k + 1, k) = 0.0;
}

}  // namespace

OrderedSchur ordered_schur(const Matrix& m, const EigenvalueSelector& select) {
    if (m.rows() != m.cols()) throw InvalidArgument("ordered_schur: matrix must be square");
    if (!all_finite(m)) throw InvalidArgument("ordered_schur: matrix has non-finite entries");

    const int n = static_cast<int>(m.rows());
    Eigen::ComplexSchur<ComplexMatrix> schur(m.cast<std::complex<double>>(), true);
    if (schur.info() != Eigen::Success)
        throw NumericalFailure("ordered_schur: Schur iteration failed to converge");

    OrderedSchur out;
    out.t = schur.matrixT();
    out.u = schur.matrixU();

    // Selection sort over diagonal positions; each selected eigenvalue is
    // bubbled to the front with adjacent swaps.
    int front = 0;
    for (int i = 0; i < n; ++i) {
        if (!select(out.t(i, i))) continue;
        for (int k = i; k > front; --k) swap_adjacent(out.t, out.u, k - 1);
        ++front;
    }
    out.selected = front;
    return out;
}

Matrix invariant_subspace(const Matrix& m, const EigenvalueSelector& select) {
    const OrderedSchur s = ordered_schur(m, select);
    const int n = static_cast<int>(m.rows());
    const int k = s.selected;
    if (k == 0) return Matrix::Zero(n, 0);

    // The leading k Schur vectors span the subspace over C. For a
    // conjugation-closed eigenvalue set it is a real subspace of real
    // dimension k; an orthonormal real basis falls out of the SVD of
    // [Re(U1) Im(U1)].
    ComplexMatrix u1 = s.u.leftCols(k);
    Matrix stacked(n, 2 * k);
    stacked.leftCols(k) = u1.real();
    stacked.rightCols(k) = u1.imag();

    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    if (svd.rank() < k && svd.singularValues()(k - 1) < 1e-12 * svd.singularValues()(0))
        throw NumericalFailure("invariant_subspace: real basis extraction is rank deficient");
    return svd.matrixU().leftCols(k);
}

}  // namespace turnpike
