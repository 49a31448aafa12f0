#pragma once

#include <vector>

#include "graphtx/matrix.hpp"

namespace gtx {

/// Eigendecomposition of a symmetric matrix: S = U diag(values) U^T.
struct EigResult {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthonormal columns, column i pairs with values[i]
};

/// Compact SVD: A = U diag(values) V^T with values descending, nonnegative.
struct SvdResult {
  Matrix u;                    // m x k
  std::vector<double> values;  // k = min(m, n)
  Matrix v;                    // n x k
};

/// Cyclic Jacobi on a symmetric matrix. Eigenvalues ascending; each
/// eigenvector sign-canonicalized (largest-magnitude entry positive, ties
/// broken by lowest index). Rejects non-symmetric input (tolerance 1e-10).
EigResult sym_eig(const Matrix& s);

/// SVD via sym_eig of A^T A with left vectors recovered as A v / sigma;
/// zero-singular-value columns of U completed by orthonormalization.
/// Signs canonicalized jointly per (u_i, v_i) pair, driven by u_i.
SvdResult svd(const Matrix& a);

/// || A - U diag(w) V^T ||_F, for reconstruction checks.
double reconstruction_error(const Matrix& a, const Matrix& u, const std::vector<double>& w,
                            const Matrix& v);

}  // namespace gtx
