#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsvd/bidiag.hpp"
#include "qsvd/compact.hpp"
#include "qsvd/dense.hpp"
#include "qsvd/quat_matrix.hpp"

namespace qsvd {

enum class Which { Largest, Smallest };

struct SolverOptions {
    std::size_t k = 10;           ///< desired triplets
    Which which = Which::Largest;
    std::size_t mb = 0;           ///< projected size; 0 selects max(2k, 40)
    std::size_t maxit = 2000;     ///< restart cap
    double delta = 1e-10;         ///< convergence tolerance
    std::uint64_t seed = 1;

    /// mb with the default applied and clamped to min(m, n).
    std::size_t effective_mb(std::size_t rows, std::size_t cols) const;
    /// Throws InvalidArgument when the options cannot be used on an m x n matrix.
    void validate(std::size_t rows, std::size_t cols) const;
};

/// Approximate singular triplets (sigma_j, u_j, v_j) with M v ~ u sigma.
struct TripletSet {
    std::vector<double> sigmas;  ///< descending (largest) or ascending (smallest)
    CompactBasis U;              ///< left vectors, length m
    CompactBasis V;              ///< right vectors, length n
    std::vector<double> bounds;  ///< residual estimate per triplet
    std::vector<bool> converged;

    std::size_t size() const noexcept { return sigmas.size(); }
    bool all_converged() const;
};

struct SolveResult {
    TripletSet triplets;
    ConvergenceTrace trace;
    std::size_t cycles = 0;    ///< restarts performed
    std::size_t matvecs = 0;
    double norm_estimate = 0;  ///< running max of sigma_1 of the projected matrices
    bool converged = false;
};

/// Running estimate of ||M||; never decreases.
class NormEstimate {
public:
    double value() const noexcept { return value_; }
    void observe(double sigma1) {
        if (sigma1 > value_) value_ = sigma1;
    }

private:
    double value_ = 0.0;
};

struct ConvergenceCheck {
    std::vector<double> bounds;     ///< per target, in target order
    std::vector<bool> converged;
    std::vector<std::size_t> index; ///< column of the SVD each target refers to
    std::size_t count_converged = 0;
    bool all() const noexcept { return count_converged == converged.size(); }
};

/// Ritz-mode test on the SVD of the square projected matrix: target j is
/// converged iff beta_k |e_k^T u_j| <= delta * ||M||, with ||M|| estimated by
/// the running max of sigma_1 (updated here). Targets are the first (largest)
/// or last (smallest) `count` triplets.
ConvergenceCheck check_convergence(const SvdResult& projected, double beta_k, double delta,
                                   std::size_t count, Which which, NormEstimate& norm);

/// Harmonic-mode test on the SVD of B_{k,k+1} = [B_k, beta_k e_k]: the residual of
/// the triplet (sigma_j, Q u_j, [P p_{k+1}] v_j) is |e_{k+1}^T v_j| * ||M p_{k+1} - beta_k q_k||.
/// Targets are the `count` smallest triplets.
ConvergenceCheck check_harmonic_convergence(const SvdResult& augmented, double residual_norm,
                                            double delta, std::size_t count, NormEstimate& norm);

/// One Ritz-augmented restart keeping the t largest Ritz pairs, then Lanczos
/// continuation back to `mb` steps.
void ritz_augment_cycle(const QuatMatrix& m, CycleState& state, std::size_t t, std::size_t mb);

/// One harmonic-Ritz-augmented restart keeping the t smallest harmonic pairs,
/// then continuation back to `mb` steps. Throws SingularMatrixError when B_k is
/// too close to singular for the solves; the state is left unchanged then.
void harmonic_augment_cycle(const QuatMatrix& m, CycleState& state, std::size_t t, std::size_t mb);

/// Number of pairs kept per restart: k targets plus up to five buffer pairs,
/// capped at mb - 3 (and at least 0).
std::size_t retained_pairs(std::size_t k, std::size_t mb);

/// Implicitly restarted partial SVD: Ritz augmentation for the largest
/// triplets, harmonic Ritz augmentation for the smallest.
SolveResult solve_partial_svd(const QuatMatrix& m, const SolverOptions& opts);

/// ||M V - U Sigma||_F over all triplets in `t`.
double verify_residual(const QuatMatrix& m, const TripletSet& t);

/// ||M^* u_j - v_j sigma_j|| for one triplet.
double left_residual(const QuatMatrix& m, const TripletSet& t, std::size_t j);
/// ||M v_j - u_j sigma_j|| for one triplet.
double right_residual(const QuatMatrix& m, const TripletSet& t, std::size_t j);

}  // namespace qsvd
