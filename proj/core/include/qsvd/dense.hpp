#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qsvd/dense_matrix.hpp"

namespace qsvd {

/// Thin SVD A = U diag(sigmas) V^T with p = min(rows, cols) triplets.
struct SvdResult {
    DenseMatrix U;               ///< rows x p, orthonormal columns
    std::vector<double> sigmas;  ///< descending, >= 0
    DenseMatrix V;               ///< cols x p, orthonormal columns
};

/// One-sided Jacobi SVD.
///
/// Singular values are returned in descending order; ties (within
/// Tolerances::sigma_tie * sigma_max) keep their original column order. Signs are
/// fixed so the first significant entry of every left singular vector is
/// positive. Columns belonging to zero singular values are completed to an
/// orthonormal set. Throws NonFiniteError on NaN/Inf input.
SvdResult dense_svd(const DenseMatrix& a);

struct QrResult {
    DenseMatrix Q;  ///< rows x cols, orthonormal columns
    DenseMatrix R;  ///< cols x cols, upper triangular, nonnegative diagonal
};

/// Householder QR of a tall (rows >= cols) matrix. Throws SingularMatrixError
/// when a diagonal entry of R falls below Tolerances::qr_rank * ||C||_F.
QrResult qr_factor(const DenseMatrix& c);

/// Solve B x = b for upper bidiagonal B = diag(alphas) + superdiag(betas).
/// `betas` has alphas.size() - 1 entries. O(k).
std::vector<double> bidiag_solve(std::span<const double> alphas, std::span<const double> betas,
                                 std::span<const double> b);

/// Back substitution R x = b for square upper triangular R.
std::vector<double> upper_solve(const DenseMatrix& r, std::span<const double> b);

/// X with X R = B, R square upper triangular (no explicit inverse is formed).
DenseMatrix tri_solve_upper(const DenseMatrix& r, const DenseMatrix& b);

}  // namespace qsvd
