#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qsvd/dense_matrix.hpp"
#include "qsvd/quat_matrix.hpp"
#include "qsvd/quaternion.hpp"
#include "qsvd/random.hpp"

namespace qsvd {

/// A quaternion column vector of length n held as the n x 4 first block row of
/// its structured 4n x 4 real counterpart. Storage is column-major with the
/// columns in the order (component 0, 2, 1, 3).
class CompactVector {
public:
    /// Storage column holding quaternion component c.
    static constexpr std::array<int, 4> column_of{0, 2, 1, 3};

    CompactVector() = default;
    explicit CompactVector(std::size_t n) : n_(n), data_(4 * n, 0.0) {}
    explicit CompactVector(std::span<const Quaternion> values);

    std::size_t size() const noexcept { return n_; }

    /// Storage column k (0..3) of the n x 4 array.
    std::span<double> column(int k) { return {data_.data() + k * n_, n_}; }
    std::span<const double> column(int k) const { return {data_.data() + k * n_, n_}; }
    /// Quaternion component c (0 = real, 1 = i, 2 = j, 3 = k).
    std::span<double> component(int c) { return column(column_of[c]); }
    std::span<const double> component(int c) const { return column(column_of[c]); }

    std::span<const double> raw() const noexcept { return data_; }
    std::span<double> raw() noexcept { return data_; }

    Quaternion at(std::size_t i) const;
    void set(std::size_t i, const Quaternion& q);

    CompactVector& operator*=(double s);
    CompactVector& operator+=(const CompactVector& o);
    CompactVector& operator-=(const CompactVector& o);
    /// this += x * a (real scalar).
    void add_scaled(const CompactVector& x, double a);
    /// this += x * q (quaternion scalar on the right).
    void add_scaled(const CompactVector& x, const Quaternion& q);

    /// Seeded standard-normal entries, then normalized to unit norm.
    static CompactVector random_unit(std::size_t n, Rng& rng);

    friend bool operator==(const CompactVector&, const CompactVector&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline CompactVector operator*(CompactVector v, double s) { return v *= s; }
inline CompactVector operator+(CompactVector a, const CompactVector& b) { return a += b; }
inline CompactVector operator-(CompactVector a, const CompactVector& b) { return a -= b; }

/// Ordered list of equal-length compact vectors (orthonormal when produced by
/// the Lanczos and restart routines).
using CompactBasis = std::vector<CompactVector>;

/// Frobenius norm of the n x 4 array (= quaternion 2-norm).
double vec_norm(const CompactVector& x);

/// Quaternion inner product a^* b.
Quaternion quat_dot(const CompactVector& a, const CompactVector& b);

/// y = M x, or y = M^* x when `adjoint` is set.
CompactVector structured_matvec(const QuatMatrix& m, const CompactVector& x, bool adjoint = false);

/// r - sum_i b_i (b_i^* r), two classical Gram-Schmidt passes. When `coeffs` is
/// given it receives the accumulated coefficient of each basis vector.
CompactVector orthogonalize_against_basis(const CompactVector& r, const CompactBasis& basis,
                                          std::vector<Quaternion>* coeffs = nullptr);

/// Seeded unit vector orthogonal to every vector of `basis`. Throws
/// DimensionError when the basis already spans the space.
CompactVector random_orthogonal_unit(std::size_t n, const CompactBasis& basis, Rng& rng);

/// sum_j basis[j] * coeffs[j] with real coefficients.
CompactVector combine(const CompactBasis& basis, std::span<const double> coeffs);
/// Columns of `basis * W` for a real basis.size() x c matrix W.
CompactBasis combine(const CompactBasis& basis, const DenseMatrix& w);

/// The structured 4n x 4 real counterpart of x (first block column of the
/// expansion of x seen as an n x 1 quaternion matrix).
DenseMatrix expand_vector(const CompactVector& x);

/// The 4 x 4 real counterpart of a single quaternion.
DenseMatrix expand_quaternion(const Quaternion& q);

/// max_{i != j} |b_i^* b_j| and max_i | |b_i| - 1 |, combined as a single number.
double orthogonality_error(const CompactBasis& basis);

}  // namespace qsvd
