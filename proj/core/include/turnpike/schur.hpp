#pragma once

#include "turnpike/linalg.hpp"

#include <functional>

namespace turnpike {

/// Predicate on eigenvalues used to pick an invariant subspace.
using EigenvalueSelector = std::function<bool(const std::complex<double>&)>;

struct OrderedSchur {
    ComplexMatrix t;  ///< upper triangular, selected eigenvalues leading
    ComplexMatrix u;  ///< unitary, M = U T U^H
    int selected = 0; ///< number of selected eigenvalues
};

/// Complex Schur decomposition of a real matrix, reordered by adjacent Givens
/// swaps so that the eigenvalues satisfying `select` occupy the leading
/// diagonal positions.
OrderedSchur ordered_schur(const Matrix& m, const EigenvalueSelector& select);

/// Real orthonormal basis (n x k) of the invariant subspace spanned by the
/// selected eigenvalues. Requires the selected set to be closed under complex
/// conjugation, which holds for any selector depending only on the real part.
Matrix invariant_subspace(const Matrix& m, const EigenvalueSelector& select);

}  // namespace turnpike
