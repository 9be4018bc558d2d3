#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qsvd/dense_matrix.hpp"
#include "qsvd/quaternion.hpp"

namespace qsvd {

/// One (row, col, value) entry of a real coordinate-format block.
struct CoordEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Quaternion matrix M = M0 + M1 i + M2 j + M3 k, stored as its four real m x n
/// component blocks. This is the compact form of the JRS-symmetric real
/// counterpart (first block row [M0, M2, M1, M3]).
///
/// Storage is either dense (row-major blocks) or block-sparse (CSR over the union
/// pattern, one quaternion per stored entry). `from_coordinates` picks the sparse
/// form when the union density is below `sparse_density_threshold`.
class QuatMatrix {
public:
    static constexpr double sparse_density_threshold = 0.25;

    QuatMatrix() = default;
    /// Dense zero matrix.
    QuatMatrix(std::size_t rows, std::size_t cols);

    /// Dense matrix from four row-major m x n component blocks.
    static QuatMatrix from_blocks(std::size_t rows, std::size_t cols,
                                  std::array<std::vector<double>, 4> blocks);
    /// From four coordinate lists (component 0..3). Duplicates are summed.
    static QuatMatrix from_coordinates(std::size_t rows, std::size_t cols,
                                       const std::array<std::vector<CoordEntry>, 4>& blocks);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_sparse() const noexcept { return sparse_; }
    /// Stored quaternion entries (m*n for dense storage).
    std::size_t stored_entries() const noexcept;

    Quaternion at(std::size_t i, std::size_t j) const;
    /// Dense storage only.
    void set(std::size_t i, std::size_t j, const Quaternion& q);

    /// Dense row-major copy of component block c (0..3).
    std::vector<double> block(int c) const;
    /// Same matrix in dense storage.
    QuatMatrix to_dense() const;
    /// Conjugate transpose M^*.
    QuatMatrix adjoint() const;

    double frobenius_norm() const;

    /// y = M x (adjoint=false) or y = M^* x (adjoint=true) on raw component arrays.
    /// `x[c]` / `y[c]` hold quaternion component c; fixed summation order.
    void apply(std::array<std::span<const double>, 4> x, std::array<std::span<double>, 4> y,
               bool adjoint) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    bool sparse_ = false;
    // dense: component blocks, row-major
    std::array<std::vector<double>, 4> dense_;
    // sparse: CSR over the union pattern
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::array<std::vector<double>, 4> values_;
};

/// The 4m x 4n real counterpart laid out as
///   [ M0  M2  M1  M3]
///   [-M2  M0  M3 -M1]
///   [-M1 -M3  M0  M2]
///   [-M3  M1 -M2  M0]
DenseMatrix expand_real_counterpart(const QuatMatrix& m);

enum class Structure { J, R, S };

/// The 4n x 4n skew-symmetric structure matrix J_n, R_n or S_n.
DenseMatrix structure_matrix(Structure which, std::size_t n);

/// True iff X M X^T == M exactly for X in {J, R, S} (sizes inferred from M).
bool is_jrs_symmetric(const DenseMatrix& m);

}  // namespace qsvd
