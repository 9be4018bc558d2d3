#include "qsvd/quat_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "qsvd/error.hpp"

namespace qsvd {

namespace {

// Real-counterpart layout: (sign, component) of block (row r, col c).
struct BlockRef {
    int sign;
    int component;
};
constexpr BlockRef layout[4][4] = {
    {{+1, 0}, {+1, 2}, {+1, 1}, {+1, 3}},
    {{-1, 2}, {+1, 0}, {+1, 3}, {-1, 1}},
    {{-1, 1}, {-1, 3}, {+1, 0}, {+1, 2}},
    {{-1, 3}, {+1, 1}, {-1, 2}, {+1, 0}},
};

}  // namespace

QuatMatrix::QuatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    for (auto& b : dense_) b.assign(rows * cols, 0.0);
}

QuatMatrix QuatMatrix::from_blocks(std::size_t rows, std::size_t cols,
                                   std::array<std::vector<double>, 4> blocks) {
    for (const auto& b : blocks)
        if (b.size() != rows * cols) throw DimensionError("QuatMatrix::from_blocks: block size mismatch");
    QuatMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.dense_ = std::move(blocks);
    return m;
}

QuatMatrix QuatMatrix::from_coordinates(std::size_t rows, std::size_t cols,
                                        const std::array<std::vector<CoordEntry>, 4>& blocks) {
    std::map<std::pair<std::size_t, std::size_t>, Quaternion> merged;
    for (int c = 0; c < 4; ++c) {
        for (const auto& e : blocks[c]) {
            if (e.row >= rows || e.col >= cols)
                throw DimensionError("QuatMatrix::from_coordinates: index out of range");
            auto& q = merged[{e.row, e.col}];
            switch (c) {
                case 0: q.w += e.value; break;
                case 1: q.x += e.value; break;
                case 2: q.y += e.value; break;
                default: q.z += e.value; break;
            }
        }
    }

    const double cells = static_cast<double>(rows) * static_cast<double>(cols);
    const bool sparse = cells > 0 && static_cast<double>(merged.size()) / cells < sparse_density_threshold;

    if (!sparse) {
        QuatMatrix m(rows, cols);
        for (const auto& [ij, q] : merged) m.set(ij.first, ij.second, q);
        return m;
    }

    QuatMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.sparse_ = true;
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(merged.size());
    for (auto& v : m.values_) v.reserve(merged.size());
    // std::map iterates in (row, col) order, which is CSR order.
    for (const auto& [ij, q] : merged) {
        ++m.row_ptr_[ij.first + 1];
        m.col_idx_.push_back(ij.second);
        m.values_[0].push_back(q.w);
        m.values_[1].push_back(q.x);
        m.values_[2].push_back(q.y);
        m.values_[3].push_back(q.z);
    }
    for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

std::size_t QuatMatrix::stored_entries() const noexcept {
    return sparse_ ? col_idx_.size() : rows_ * cols_;
}

Quaternion QuatMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw DimensionError("QuatMatrix::at out of range");
    if (!sparse_) {
        const std::size_t ij = i * cols_ + j;
        return {dense_[0][ij], dense_[1][ij], dense_[2][ij], dense_[3][ij]};
    }
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return {};
    const auto p = static_cast<std::size_t>(it - col_idx_.begin());
    return {values_[0][p], values_[1][p], values_[2][p], values_[3][p]};
}

void QuatMatrix::set(std::size_t i, std::size_t j, const Quaternion& q) {
    if (sparse_) throw InvalidArgument("QuatMatrix::set requires dense storage");
    if (i >= rows_ || j >= cols_) throw DimensionError("QuatMatrix::set out of range");
    const std::size_t ij = i * cols_ + j;
    dense_[0][ij] = q.w;
    dense_[1][ij] = q.x;
    dense_[2][ij] = q.y;
    dense_[3][ij] = q.z;
}

std::vector<double> QuatMatrix::block(int c) const {
    if (!sparse_) return dense_[c];
    std::vector<double> out(rows_ * cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out[i * cols_ + col_idx_[p]] = values_[c][p];
    return out;
}

QuatMatrix QuatMatrix::to_dense() const {
    if (!sparse_) return *this;
    return from_blocks(rows_, cols_, {block(0), block(1), block(2), block(3)});
}

QuatMatrix QuatMatrix::adjoint() const {
    QuatMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out.set(j, i, at(i, j).conj());
    return out;
}

double QuatMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        const auto& v = sparse_ ? values_[c] : dense_[c];
        for (double x : v) s += x * x;
    }
    return std::sqrt(s);
}

void QuatMatrix::apply(std::array<std::span<const double>, 4> x, std::array<std::span<double>, 4> y,
                       bool adjoint) const {
    const std::size_t in = adjoint ? rows_ : cols_;
    const std::size_t out = adjoint ? cols_ : rows_;
    for (int c = 0; c < 4; ++c) {
        if (x[c].size() != in || y[c].size() != out) throw DimensionError("QuatMatrix::apply: dimension mismatch");
        std::fill(y[c].begin(), y[c].end(), 0.0);
    }
    const double* x0 = x[0].data();
    const double* x1 = x[1].data();
    const double* x2 = x[2].data();
    const double* x3 = x[3].data();
    double* y0 = y[0].data();
    double* y1 = y[1].data();
    double* y2 = y[2].data();
    double* y3 = y[3].data();

    auto row_entries = [&](std::size_t i, auto&& visit) {
        if (sparse_) {
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
                visit(col_idx_[p], values_[0][p], values_[1][p], values_[2][p], values_[3][p]);
        } else {
            const double* m0 = dense_[0].data() + i * cols_;
            const double* m1 = dense_[1].data() + i * cols_;
            const double* m2 = dense_[2].data() + i * cols_;
            const double* m3 = dense_[3].data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) visit(j, m0[j], m1[j], m2[j], m3[j]);
        }
    };

    if (!adjoint) {
        // y_i = sum_j M_ij x_j
        for (std::size_t i = 0; i < rows_; ++i) {
            double w = 0.0, a = 0.0, b = 0.0, c = 0.0;
            row_entries(i, [&](std::size_t j, double m0, double m1, double m2, double m3) {
                w += m0 * x0[j] - m1 * x1[j] - m2 * x2[j] - m3 * x3[j];
                a += m0 * x1[j] + m1 * x0[j] + m2 * x3[j] - m3 * x2[j];
                b += m0 * x2[j] - m1 * x3[j] + m2 * x0[j] + m3 * x1[j];
                c += m0 * x3[j] + m1 * x2[j] - m2 * x1[j] + m3 * x0[j];
            });
            y0[i] = w;
            y1[i] = a;
            y2[i] = b;
            y3[i] = c;
        }
    } else {
        // y_j += conj(M_ij) x_i, rows visited in order
        for (std::size_t i = 0; i < rows_; ++i) {
            const double v0 = x0[i], v1 = x1[i], v2 = x2[i], v3 = x3[i];
            row_entries(i, [&](std::size_t j, double m0, double m1, double m2, double m3) {
                y0[j] += m0 * v0 + m1 * v1 + m2 * v2 + m3 * v3;
                y1[j] += m0 * v1 - m1 * v0 - m2 * v3 + m3 * v2;
                y2[j] += m0 * v2 + m1 * v3 - m2 * v0 - m3 * v1;
                y3[j] += m0 * v3 - m1 * v2 + m2 * v1 - m3 * v0;
            });
        }
    }
}

DenseMatrix expand_real_counterpart(const QuatMatrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    DenseMatrix out(4 * rows, 4 * cols);
    const std::array<std::vector<double>, 4> blocks{m.block(0), m.block(1), m.block(2), m.block(3)};
    for (int br = 0; br < 4; ++br)
        for (int bc = 0; bc < 4; ++bc) {
            const auto [sign, comp] = layout[br][bc];
            const auto& src = blocks[comp];
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    out(br * rows + i, bc * cols + j) = sign * src[i * cols + j];
        }
    return out;
}

DenseMatrix structure_matrix(Structure which, std::size_t n) {
    // Nonzero identity blocks as (block row, block col, sign).
    struct Entry {
        int r, c, sign;
    };
    static constexpr Entry j_blocks[4] = {{0, 2, -1}, {1, 3, -1}, {2, 0, +1}, {3, 1, +1}};
    static constexpr Entry r_blocks[4] = {{0, 1, -1}, {1, 0, +1}, {2, 3, +1}, {3, 2, -1}};
    static constexpr Entry s_blocks[4] = {{0, 3, -1}, {1, 2, +1}, {2, 1, -1}, {3, 0, +1}};
    const Entry* blocks = which == Structure::J ? j_blocks : which == Structure::R ? r_blocks : s_blocks;

    DenseMatrix out(4 * n, 4 * n);
    for (int b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < n; ++i)
            out(blocks[b].r * n + i, blocks[b].c * n + i) = blocks[b].sign;
    return out;
}

bool is_jrs_symmetric(const DenseMatrix& m) {
    if (m.rows() % 4 != 0 || m.cols() % 4 != 0) return false;
    for (Structure s : {Structure::J, Structure::R, Structure::S}) {
        const DenseMatrix left = structure_matrix(s, m.rows() / 4);
        const DenseMatrix right = structure_matrix(s, m.cols() / 4);
        if (left * m * right.transpose() != m) return false;
    }
    return true;
}

}  // namespace qsvd
