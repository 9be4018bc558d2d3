#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qsvd/lowrank.hpp"
#include "qsvd/quat_matrix.hpp"
#include "qsvd/restart.hpp"

namespace qsvd {

/// Real coordinate-format block; duplicates are summed on load.
struct SparseBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<CoordEntry> entries;
};

/// Matrix Market coordinate reader: real/integer/pattern, general/symmetric.
/// Symmetric storage is expanded, indices become 0-based, duplicates summed.
SparseBlock read_matrix_market(const std::filesystem::path& path);
SparseBlock parse_matrix_market(const std::string& text);
/// Writes `coordinate real general` with 17 significant digits.
void write_matrix_market(const SparseBlock& block, const std::filesystem::path& path);

/// Leading n x n principal submatrices of the four blocks as M0..M3.
QuatMatrix assemble_jrs_blocks(const SparseBlock& b0, const SparseBlock& b1, const SparseBlock& b2,
                               const SparseBlock& b3, std::size_t n);

/// Binary PPM (P6, maxval 255).
RgbImage read_image_ppm(const std::filesystem::path& path);
RgbImage parse_image_ppm(const std::string& bytes);
/// Clamp to [0, 255] and round half away from zero.
std::string encode_image_ppm(const RgbImage& img);
void write_image_ppm(const RgbImage& img, const std::filesystem::path& path);

/// CSV with header `j,sigma,bound,converged`.
void write_triplets(const TripletSet& t, const std::filesystem::path& path);
/// CSV with header `cycle,j,bound,matvecs`.
void write_trace(const ConvergenceTrace& trace, const std::filesystem::path& path);

struct TripletRow {
    std::size_t j = 0;
    double sigma = 0.0;
    double bound = 0.0;
    bool converged = false;
};
std::vector<TripletRow> read_triplets(const std::filesystem::path& path);

/// `.qmx` container: 8-byte magic "QSVDQMX1", uint64 rows, uint64 cols, then the
/// four dense component blocks (row-major) as little-endian float64.
inline constexpr std::array<char, 8> qmx_magic{'Q', 'S', 'V', 'D', 'Q', 'M', 'X', '1'};
void write_qmx(const QuatMatrix& m, const std::filesystem::path& path);
QuatMatrix read_qmx(const std::filesystem::path& path);

/// Deterministic stand-in for sparse test blocks: a band of half-width
/// `bandwidth` plus `extra_per_row` random off-band entries per row.
SparseBlock synthetic_sparse_block(std::size_t n, std::size_t bandwidth, std::size_t extra_per_row,
                                   std::uint64_t seed);

/// The four component blocks behind synthetic_sparse_quat. The real block
/// carries a graded diagonal 1..10 that keeps the matrix nonsingular.
std::array<SparseBlock, 4> synthetic_sparse_blocks(std::size_t n, std::uint64_t seed);

/// synthetic_sparse_blocks assembled into a sparse n x n quaternion matrix.
QuatMatrix synthetic_sparse_quat(std::size_t n, std::uint64_t seed);

/// Dense quaternion matrix with independent standard-normal components.
QuatMatrix random_dense_quat(std::size_t m, std::size_t n, std::uint64_t seed);

/// Smooth synthetic color test image (gradients, disc, stripes, mild noise).
RgbImage synthetic_image(std::size_t width, std::size_t height, std::uint64_t seed);

/// Decimal with 17 significant digits (round-trips exactly).
std::string format_double(double v);

}  // namespace qsvd
