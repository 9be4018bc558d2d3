#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qsvd/qsvd.hpp"

using namespace qsvd;

namespace {

CycleState fresh_state(const QuatMatrix& m, std::size_t steps, std::uint64_t seed) {
    Rng rng(seed);
    CycleState s = make_start_state(CompactVector::random_unit(m.cols(), rng), seed + 1);
    lanczos_extend(m, s, steps);
    return s;
}

double sigma1(const CycleState& s) { return dense_svd(s.B).sigmas.front(); }

void expect_cycle_identities(const QuatMatrix& m, const CycleState& s, double scale, double tol) {
    const auto r = factorization_residuals(m, s);
    EXPECT_LE(r.right, tol * scale);
    EXPECT_LE(r.left, tol * scale);
    EXPECT_LE(r.p_orthogonality, 1e-12);
    EXPECT_LE(r.q_orthogonality, 1e-12);
    EXPECT_LE(r.residual_vs_p, 1e-12 * std::max(1.0, vec_norm(s.f)));
}

QuatMatrix diag_real(const std::vector<double>& d) {
    QuatMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, {d[i], 0, 0, 0});
    return m;
}

}  // namespace

TEST(CheckConvergence, ZeroBetaConvergesEverything) {
    Rng rng(1);
    DenseMatrix b(4, 4);
    for (std::size_t i = 0; i < 4; ++i) b(i, i) = 4.0 - static_cast<double>(i);
    NormEstimate norm;
    const auto c = check_convergence(dense_svd(b), 0.0, 1e-10, 3, Which::Largest, norm);
    EXPECT_TRUE(c.all());
    for (double x : c.bounds) EXPECT_EQ(x, 0.0);
}

TEST(CheckConvergence, TinyBetaAccepted) {
    SvdResult s{DenseMatrix{{1}}, {1.0}, DenseMatrix{{1}}};
    NormEstimate norm;
    const auto c = check_convergence(s, 1e-12, 1e-10, 1, Which::Largest, norm);
    EXPECT_TRUE(c.converged[0]);
    EXPECT_DOUBLE_EQ(c.bounds[0], 1e-12);
    const auto d = check_convergence(s, 1e-9, 1e-10, 1, Which::Largest, norm);
    EXPECT_FALSE(d.converged[0]);
}

TEST(CheckConvergence, BoundsEqualDirectResiduals) {
    const QuatMatrix m = random_dense_quat(30, 25, 2);
    const CycleState s = fresh_state(m, 10, 3);
    const SvdResult svd = dense_svd(s.B);
    NormEstimate norm;
    const auto c = check_convergence(svd, s.beta_last(), 1e-10, 10, Which::Largest, norm);
    for (std::size_t j = 0; j < 10; ++j) {
        const CompactVector u = combine(s.Q, svd.U.col(j));
        const CompactVector v = combine(s.P, svd.V.col(j));
        CompactVector r = structured_matvec(m, u, true);
        r.add_scaled(v, -svd.sigmas[j]);
        EXPECT_NEAR(c.bounds[j], vec_norm(r), 1e-12);
    }
    const auto small = check_convergence(svd, s.beta_last(), 1e-10, 2, Which::Smallest, norm);
    EXPECT_EQ(small.index, (std::vector<std::size_t>{9, 8}));
}

TEST(NormEstimate, NeverDecreases) {
    NormEstimate n;
    n.observe(2.0);
    n.observe(1.0);
    EXPECT_EQ(n.value(), 2.0);
    n.observe(3.0);
    EXPECT_EQ(n.value(), 3.0);
}

TEST(RitzAugment, RelationsHoldAfterCycle) {
    const QuatMatrix m = random_dense_quat(40, 25, 5);
    CycleState s = fresh_state(m, 12, 7);
    const double scale = sigma1(s);
    ritz_augment_cycle(m, s, 5, 12);
    EXPECT_EQ(s.steps(), 12u);
    EXPECT_EQ(s.lead, 6u);
    expect_cycle_identities(m, s, scale, 1e-11);
    // arrow block: diagonal plus last column, zero elsewhere
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) EXPECT_EQ(s.B(i, j), 0.0);
}

TEST(RitzAugment, ZeroRetainedIsAFreshRestart) {
    const QuatMatrix m = random_dense_quat(20, 15, 6);
    CycleState s = fresh_state(m, 8, 1);
    const CompactVector p_next = s.f * (1.0 / s.beta_last());
    ritz_augment_cycle(m, s, 0, 8);
    EXPECT_LT(vec_norm(s.P[0] - p_next), 1e-14);
    expect_cycle_identities(m, s, sigma1(s), 1e-12);
}

TEST(RitzAugment, ExactInvariantSubspaceKeepsPairs) {
    const QuatMatrix m = oracle::with_spectrum(12, 10, {5, 4, 3}, 4);
    Rng rng(2);
    CompactVector p1 = structured_matvec(m, CompactVector::random_unit(12, rng), true);
    p1 *= 1.0 / vec_norm(p1);
    CycleState s = make_start_state(p1, 3);
    lanczos_extend(m, s, 3);
    ASSERT_LT(s.beta_last(), 1e-12);
    const std::vector<double> before = dense_svd(s.B).sigmas;
    ritz_augment_cycle(m, s, 2, 3);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(s.B(j, j), before[j], 1e-12);
        EXPECT_NEAR(s.B(j, 2), 0.0, 1e-12);
    }
    expect_cycle_identities(m, s, 5.0, 1e-12);
}

TEST(RitzAugment, RejectsBadRetainedCount) {
    const QuatMatrix m = random_dense_quat(10, 8, 1);
    CycleState s = fresh_state(m, 5, 1);
    EXPECT_THROW(ritz_augment_cycle(m, s, 5, 5), InvalidArgument);
    EXPECT_THROW(ritz_augment_cycle(m, s, 2, 9), InvalidArgument);
}

TEST(HarmonicAugment, OneByTwoRow) {
    const SvdResult s = dense_svd(DenseMatrix{{3, 4}});
    EXPECT_NEAR(s.sigmas[0], 5.0, 1e-15);
    const auto w = bidiag_solve(std::vector<double>{3}, std::vector<double>{}, std::vector<double>{s.U(0, 0)});
    EXPECT_NEAR(std::abs(w[0]), 1.0 / 3.0, 1e-15);
}

TEST(HarmonicAugment, RelationsHoldAndResidualIsOrthogonal) {
    const QuatMatrix m = random_dense_quat(30, 30, 8);
    CycleState s = fresh_state(m, 12, 9);
    const double scale = sigma1(s);
    harmonic_augment_cycle(m, s, 4, 12);
    EXPECT_EQ(s.lead, 5u);
    expect_cycle_identities(m, s, scale, 1e-11);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(s.B(i, j), 0.0);
}

TEST(HarmonicAugment, RetainedPairsSatisfyAugmentedEigenproblem) {
    const QuatMatrix m = random_dense_quat(30, 30, 10);
    const CycleState s = fresh_state(m, 10, 2);
    DenseMatrix aug(10, 11);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) aug(i, j) = s.B(i, j);
    aug(9, 10) = s.beta_last();
    const SvdResult svd = dense_svd(aug);
    const DenseMatrix g = aug * aug.transpose();
    for (std::size_t j = 6; j < 10; ++j) {
        const auto u = svd.U.col(j);
        const auto gu = g * std::span<const double>(u);
        for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(gu[i], svd.sigmas[j] * svd.sigmas[j] * u[i], 1e-12 * g.max_abs());
    }
}

TEST(HarmonicAugment, IdentityLimitMatchesRitzVectors) {
    // With B_k = I and beta_k -> 0 the scaled residual term vanishes and the
    // harmonic vectors B_k^{-1} u_j equal the Ritz vectors u_j.
    const std::vector<double> ones(4, 1.0), zeros(3, 0.0);
    const std::vector<double> u{0.5, -0.5, 0.5, 0.5};
    EXPECT_EQ(bidiag_solve(ones, zeros, u), u);
}

TEST(HarmonicAugment, GuardLeavesStateUnchanged) {
    const QuatMatrix m = random_dense_quat(20, 20, 3);
    CycleState s = fresh_state(m, 8, 4);
    s.B(3, 3) = 1e-20;
    const CycleState copy = s;
    EXPECT_THROW(harmonic_augment_cycle(m, s, 3, 8), SingularMatrixError);
    EXPECT_EQ(s.B, copy.B);
    EXPECT_EQ(s.P, copy.P);
    EXPECT_EQ(s.matvecs, copy.matvecs);
    EXPECT_TRUE(s.trace.events.empty());
    Rng a = s.rng, b = copy.rng;
    EXPECT_EQ(a.next(), b.next());
}

TEST(RetainedPairs, Policy) {
    EXPECT_EQ(retained_pairs(10, 40), 15u);
    EXPECT_EQ(retained_pairs(10, 20), 15u);
    EXPECT_EQ(retained_pairs(10, 12), 10u);
    EXPECT_EQ(retained_pairs(2, 40), 7u);
    EXPECT_EQ(retained_pairs(1, 1), 0u);
    EXPECT_EQ(retained_pairs(1, 2), 1u);
}

TEST(SolverOptions, DefaultsAndValidation) {
    SolverOptions o;
    EXPECT_EQ(o.k, 10u);
    EXPECT_EQ(o.maxit, 2000u);
    EXPECT_EQ(o.delta, 1e-10);
    EXPECT_EQ(o.effective_mb(100, 80), 40u);
    o.k = 30;
    EXPECT_EQ(o.effective_mb(100, 80), 60u);
    EXPECT_EQ(o.effective_mb(100, 50), 50u);
    EXPECT_THROW(o.validate(20, 20), InvalidArgument);
    o.k = 5;
    o.mb = 5;
    EXPECT_THROW(o.validate(20, 20), InvalidArgument);
    o.mb = 21;
    EXPECT_THROW(o.validate(20, 20), InvalidArgument);
    o.mb = 0;
    o.delta = 0.0;
    EXPECT_THROW(o.validate(20, 20), InvalidArgument);
    o.delta = 1e-10;
    EXPECT_NO_THROW(o.validate(20, 20));
    o.k = 0;
    EXPECT_THROW(o.validate(20, 20), InvalidArgument);
}

TEST(SolvePartialSvd, OneByOneQuaternion) {
    QuatMatrix m(1, 1);
    m.set(0, 0, {1, 1, 1, 1});
    SolverOptions o;
    o.k = 1;
    const SolveResult r = solve_partial_svd(m, o);
    ASSERT_EQ(r.triplets.size(), 1u);
    EXPECT_NEAR(r.triplets.sigmas[0], 2.0, 1e-14);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.trace.cycles.size(), 1u);
}

TEST(SolvePartialSvd, RealDiagonal) {
    SolverOptions o;
    o.k = 2;
    const SolveResult r = solve_partial_svd(diag_real({5, 4, 3, 2, 1}), o);
    EXPECT_NEAR(r.triplets.sigmas[0], 5.0, 1e-10);
    EXPECT_NEAR(r.triplets.sigmas[1], 4.0, 1e-10);
    o.which = Which::Smallest;
    const SolveResult s = solve_partial_svd(diag_real({5, 4, 3, 2, 1}), o);
    EXPECT_NEAR(s.triplets.sigmas[0], 1.0, 1e-10);
    EXPECT_NEAR(s.triplets.sigmas[1], 2.0, 1e-10);
}

TEST(SolvePartialSvd, MatchesCounterpartOracleBothModes) {
    const QuatMatrix m = random_dense_quat(60, 40, 12);
    const auto exact = oracle::quaternion_singular_values(m);
    SolverOptions o;
    o.k = 6;
    o.mb = 20;
    const SolveResult big = solve_partial_svd(m, o);
    ASSERT_TRUE(big.converged);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(big.triplets.sigmas[j], exact[j], 1e-8 * exact[j]);
    EXPECT_LE(verify_residual(m, big.triplets), 10.0 * o.delta * exact[0]);

    o.which = Which::Smallest;
    const SolveResult small = solve_partial_svd(m, o);
    ASSERT_TRUE(small.converged);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(small.triplets.sigmas[j], exact[exact.size() - 1 - j], 1e-6 * exact[0]);
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_LE(left_residual(m, small.triplets, j), 10.0 * small.triplets.bounds[j] + 1e-13 * exact[0]);
        EXPECT_LE(right_residual(m, small.triplets, j), 10.0 * small.triplets.bounds[j] + 1e-13 * exact[0]);
    }
}

TEST(SolvePartialSvd, WideMatrix) {
    const QuatMatrix m = random_dense_quat(15, 35, 3);
    const auto exact = oracle::quaternion_singular_values(m);
    SolverOptions o;
    o.k = 3;
    const SolveResult r = solve_partial_svd(m, o);
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(r.triplets.U.front().size(), 15u);
    EXPECT_EQ(r.triplets.V.front().size(), 35u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.triplets.sigmas[j], exact[j], 1e-10 * exact[0]);
    EXPECT_LE(verify_residual(m, r.triplets), 1e-9 * exact[0]);
}

TEST(SolvePartialSvd, NonConvergenceIsFlagged) {
    const QuatMatrix m = random_dense_quat(80, 80, 5);
    SolverOptions o;
    o.k = 5;
    o.mb = 10;
    o.maxit = 0;
    o.which = Which::Smallest;
    const SolveResult r = solve_partial_svd(m, o);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.cycles, 0u);
    EXPECT_EQ(r.triplets.size(), 5u);
    EXPECT_FALSE(r.triplets.all_converged());
}

TEST(SolvePartialSvd, StructurallySingularRejectedForSmallest) {
    QuatMatrix m = random_dense_quat(6, 6, 1);
    for (std::size_t i = 0; i < 6; ++i) m.set(i, 2, {});
    SolverOptions o;
    o.k = 2;
    o.which = Which::Smallest;
    EXPECT_THROW(solve_partial_svd(m, o), SingularMatrixError);
    o.which = Which::Largest;
    EXPECT_NO_THROW(solve_partial_svd(m, o));
}

TEST(SolvePartialSvd, TraceIsAppendOnlyPerCycle) {
    const QuatMatrix m = random_dense_quat(50, 40, 9);
    SolverOptions o;
    o.k = 4;
    o.mb = 10;
    const SolveResult r = solve_partial_svd(m, o);
    ASSERT_EQ(r.trace.cycles.size(), r.cycles + 1);
    for (std::size_t c = 0; c < r.trace.cycles.size(); ++c) {
        EXPECT_EQ(r.trace.cycles[c].cycle, c);
        EXPECT_EQ(r.trace.cycles[c].bounds.size(), 4u);
        if (c) EXPECT_GT(r.trace.cycles[c].matvecs, r.trace.cycles[c - 1].matvecs);
    }
}

TEST(VerifyResidual, ExactTripletsOfDiagonal) {
    const QuatMatrix m = diag_real({3, 2});
    TripletSet t;
    for (std::size_t j = 0; j < 2; ++j) {
        CompactVector e(2);
        e.set(j, {1, 0, 0, 0});
        t.sigmas.push_back(j ? 2.0 : 3.0);
        t.U.push_back(e);
        t.V.push_back(e);
        t.bounds.push_back(0.0);
        t.converged.push_back(true);
    }
    EXPECT_LE(verify_residual(m, t), 1e-14 * 3.0);
    t.U[1].set(0, {1e-6, 0, 0, 0});
    EXPECT_NEAR(verify_residual(m, t), 1e-6 * 2.0, 1e-15);
}
