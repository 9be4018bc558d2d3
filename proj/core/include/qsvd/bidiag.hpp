#pragma once

#include <cstddef>
#include <vector>

#include "qsvd/compact.hpp"
#include "qsvd/dense_matrix.hpp"
#include "qsvd/quat_matrix.hpp"
#include "qsvd/random.hpp"

namespace qsvd {

enum class TraceEventKind {
    Deflation,       ///< beta or alpha broke down; recurrence continued with a random vector
    GuardRestart,    ///< harmonic restart aborted on a near-singular B_k
    RitzTerminated,  ///< Ritz restart found r~_t = 0
};

struct TraceEvent {
    std::size_t cycle = 0;
    std::size_t step = 0;
    TraceEventKind kind = TraceEventKind::Deflation;
};

/// Per-cycle record of the convergence trace.
struct CycleRecord {
    std::size_t cycle = 0;
    std::vector<double> bounds;  ///< one per tracked target triplet
    std::size_t matvecs = 0;     ///< cumulative products with M or M^*
};

struct ConvergenceTrace {
    std::vector<CycleRecord> cycles;
    std::vector<TraceEvent> events;
};

/// Restart-loop state. Between cycles it satisfies
///   M P = Q B,   M^* Q = P B^T + f e_last^T,   P^* f = 0,
/// where B is the projected matrix: bidiagonal after a plain Lanczos run, and
/// an arrow (Ritz) or triangular (harmonic) leading block of size `lead`
/// followed by bidiagonal continuation after a restart.
struct CycleState {
    CompactBasis P;     ///< right basis, length-n vectors
    CompactBasis Q;     ///< left basis, length-m vectors
    DenseMatrix B;      ///< steps() x steps(), upper triangular
    CompactVector f;    ///< continuation residual
    std::size_t lead = 0;
    std::size_t cycle = 0;
    std::size_t matvecs = 0;
    Rng rng;
    ConvergenceTrace trace;

    std::size_t steps() const noexcept { return P.size(); }
    double beta_last() const { return vec_norm(f); }
};

/// Output of a fresh partial bidiagonalization:
///   M P = Q B_k,  M^* Q = P B_k^T + r e_k^T,  P^* r = 0,
/// with B_k upper bidiagonal (alphas on the diagonal, betas above).
struct BidiagFactorization {
    CompactBasis P;
    CompactBasis Q;
    std::vector<double> alphas;  ///< length k
    std::vector<double> betas;   ///< length k: beta_1..beta_{k-1}, then ||residual||
    CompactVector residual;
    std::size_t steps = 0;
    std::size_t deflations = 0;

    DenseMatrix bidiagonal() const;
};

/// Empty state whose pending residual is `p1` (unit norm); extending it runs
/// the recurrence from p1.
CycleState make_start_state(const CompactVector& p1, std::uint64_t seed);

/// Append Lanczos steps until `state` has `to_step` vectors per basis. The
/// leading block of B is left untouched. Breakdowns (beta or alpha below
/// Tolerances::breakdown * max alpha) continue with a seeded random vector
/// orthogonalized against the current basis; each is logged as a Deflation event.
void lanczos_extend(const QuatMatrix& m, CycleState& state, std::size_t to_step);

/// Partial multi-symplectic Lanczos bidiagonalization with full
/// reorthogonalization, k steps from unit start vector p1.
BidiagFactorization lanczos_bidiag(const QuatMatrix& m, const CompactVector& p1, std::size_t k,
                                   Rng& rng);

/// Frobenius norms of the two factorization defects and the basis orthogonality.
struct FactorizationResiduals {
    double right = 0.0;          ///< ||M P - Q B||_F
    double left = 0.0;           ///< ||M^* Q - P B^T - f e_last^T||_F
    double p_orthogonality = 0.0;
    double q_orthogonality = 0.0;
    double residual_vs_p = 0.0;  ///< max_i |p_i^* f|
};

FactorizationResiduals factorization_residuals(const QuatMatrix& m, const CompactBasis& p,
                                               const CompactBasis& q, const DenseMatrix& b,
                                               const CompactVector& f);

inline FactorizationResiduals factorization_residuals(const QuatMatrix& m, const CycleState& s) {
    return factorization_residuals(m, s.P, s.Q, s.B, s.f);
}

}  // namespace qsvd
