#pragma once

#include <limits>

namespace qsvd {

/// Zero-tolerance constants shared by the Lanczos, restart and dense kernels.
/// All are relative thresholds; callers multiply by the relevant scale.
struct Tolerances {
    static constexpr double eps = std::numeric_limits<double>::epsilon();

    /// beta_j (or alpha_j) <= breakdown * max(alpha) is treated as an exact breakdown.
    static constexpr double breakdown = 1e-14;
    /// |alpha_j| of B_k must exceed this times sigma_max before a harmonic restart.
    static constexpr double harmonic_guard = 1e-12;
    /// Pivot threshold in bidiagonal solves.
    static constexpr double bidiag_pivot = 1e-14;
    /// Diagonal of R in QR below this times ||C|| signals rank deficiency.
    static constexpr double qr_rank = 1e-14;
    /// Singular values closer than this times sigma_max count as ties.
    static constexpr double sigma_tie = 1e-14;
    /// Entries below this times the vector scale are skipped when fixing signs.
    static constexpr double sign_cutoff = 1e-12;
};

}  // namespace qsvd
