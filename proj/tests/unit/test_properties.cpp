#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "qsvd/qsvd.hpp"

using namespace qsvd;

namespace {

Quaternion random_quat(Rng& rng) { return {rng.normal(), rng.normal(), rng.normal(), rng.normal()}; }

double qdist(const Quaternion& a, const Quaternion& b) { return (a - b).norm(); }

DenseMatrix random_dense(std::size_t m, std::size_t n, Rng& rng) {
    DenseMatrix a(m, n);
    for (double& x : a.data()) x = rng.normal();
    return a;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, l) * b(l, j);
    return c;
}

DenseMatrix augmented(const CycleState& s) {
    const std::size_t k = s.steps();
    DenseMatrix a(k, k + 1);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = s.B(i, j);
    a(k - 1, k) = s.beta_last();
    return a;
}

}  // namespace

TEST(QuaternionProperties, AssociativeAndMultiplicativeNorm) {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const Quaternion a = random_quat(rng), b = random_quat(rng), c = random_quat(rng);
        const double scale = a.norm() * b.norm() * c.norm();
        EXPECT_LE(qdist((a * b) * c, a * (b * c)), 1e-14 * std::max(1.0, scale) * 4);
        EXPECT_NEAR((a * b).norm(), a.norm() * b.norm(), 1e-14 * std::max(1.0, a.norm() * b.norm()) * 2);
        EXPECT_LE(qdist(a * b, oracle::hamilton(a, b)), 1e-14 * std::max(1.0, a.norm() * b.norm()) * 2);
    }
}

TEST(QuatMatrixProperties, CounterpartIsExactlyJrsSymmetric) {
    Rng rng(102);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng.below(12), n = 1 + rng.below(12);
        const QuatMatrix a = random_dense_quat(m, n, rng.next());
        const Eigen::MatrixXd e = oracle::to_eigen(expand_real_counterpart(a));
        ASSERT_TRUE((e.array() == oracle::counterpart(a).array()).all());
        for (char x : {'J', 'R', 'S'}) {
            const Eigen::MatrixXd lhs = oracle::structure(x, m) * e * oracle::structure(x, n).transpose();
            EXPECT_TRUE((lhs.array() == e.array()).all()) << x << " " << m << "x" << n;
        }
        EXPECT_TRUE(is_jrs_symmetric(expand_real_counterpart(a)));
    }
}

TEST(QuatMatrixProperties, StructuredMatvecMatchesCounterpart) {
    Rng rng(103);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 1 + rng.below(64), n = 1 + rng.below(64);
        const QuatMatrix a = random_dense_quat(m, n, rng.next());
        const Eigen::MatrixXd e = oracle::counterpart(a);
        for (bool adjoint : {false, true}) {
            const std::size_t len = adjoint ? m : n;
            const CompactVector x = CompactVector::random_unit(len, rng);
            const CompactVector y = structured_matvec(a, x, adjoint);
            const Eigen::MatrixXd ex = oracle::to_eigen(expand_vector(x));
            const Eigen::MatrixXd ey = adjoint ? Eigen::MatrixXd(e.transpose() * ex) : Eigen::MatrixXd(e * ex);
            const Eigen::MatrixXd got = oracle::to_eigen(expand_vector(y));
            EXPECT_LE((got - ey).norm(), 1e-13 * std::max(1.0, ey.norm()));
        }
    }
}

TEST(QuatMatrixProperties, SparseAndDensePathsAgree) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const QuatMatrix s = synthetic_sparse_quat(80, seed);
        ASSERT_TRUE(s.is_sparse());
        const QuatMatrix d = s.to_dense();
        Rng rng(seed);
        const CompactVector x = CompactVector::random_unit(80, rng);
        for (bool adjoint : {false, true}) {
            const CompactVector a = structured_matvec(s, x, adjoint);
            const CompactVector b = structured_matvec(d, x, adjoint);
            EXPECT_LE(vec_norm(a - b), 1e-13 * vec_norm(b));
        }
    }
}

TEST(CompactProperties, OrthogonalizeIsIdempotent) {
    Rng rng(104);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng.below(40);
        const std::size_t k = 1 + rng.below(n - 1);
        const CompactBasis basis = oracle::orthonormal_basis(n, k, rng.next());
        const CompactVector r = CompactVector::random_unit(n, rng);
        const CompactVector once = orthogonalize_against_basis(r, basis);
        const CompactVector twice = orthogonalize_against_basis(once, basis);
        EXPECT_LE(vec_norm(twice - once), 1e-13 * vec_norm(once));
        for (const auto& b : basis) EXPECT_LE(quat_dot(b, once).norm(), 1e-13);
    }
}

TEST(DenseSvdProperties, ContractsOnRandomSizes) {
    Rng rng(105);
    for (std::size_t size = 1; size <= 40; ++size) {
        for (const auto& [m, n] : {std::pair{size, size}, std::pair{size, 1 + rng.below(size)},
                                   std::pair{1 + rng.below(size), size}}) {
            const DenseMatrix a = random_dense(m, n, rng);
            const SvdResult s = dense_svd(a);
            const std::size_t p = std::min(m, n);
            ASSERT_EQ(s.sigmas.size(), p);
            DenseMatrix us = s.U;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < p; ++j) us(i, j) *= s.sigmas[j];
            const DenseMatrix rec = multiply(us, s.V.transpose());
            double diff = 0;
            for (std::size_t i = 0; i < a.data().size(); ++i) diff += std::pow(rec.data()[i] - a.data()[i], 2);
            EXPECT_LE(std::sqrt(diff), 1e-13 * a.frobenius_norm()) << m << "x" << n;
            const DenseMatrix utu = multiply(s.U.transpose(), s.U), vtv = multiply(s.V.transpose(), s.V);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) {
                    EXPECT_NEAR(utu(i, j), i == j ? 1.0 : 0.0, 1e-13);
                    EXPECT_NEAR(vtv(i, j), i == j ? 1.0 : 0.0, 1e-13);
                }
            EXPECT_TRUE(std::is_sorted(s.sigmas.rbegin(), s.sigmas.rend()));
            const Eigen::JacobiSVD<Eigen::MatrixXd> ref(oracle::to_eigen(a));
            for (std::size_t j = 0; j < p; ++j)
                EXPECT_NEAR(s.sigmas[j], ref.singularValues()(static_cast<Eigen::Index>(j)),
                            1e-13 * ref.singularValues()(0));
        }
    }
}

TEST(BidiagProperties, OrthogonalityAndTridiagonalReproduction) {
    Rng rng(106);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t m = 20 + rng.below(40), n = 10 + rng.below(30);
        const QuatMatrix a = random_dense_quat(m, n, rng.next());
        const std::size_t k = 1 + rng.below(std::min(m, n));
        Rng run(rng.next());
        const auto f = lanczos_bidiag(a, CompactVector::random_unit(n, run), k, run);
        EXPECT_LE(orthogonality_error(f.P), 1e-12);
        EXPECT_LE(orthogonality_error(f.Q), 1e-12);
        const DenseMatrix b = f.bidiagonal();
        const DenseMatrix btb = multiply(b.transpose(), b);
        for (std::size_t i = 0; i < k; ++i) {
            const double diag = f.alphas[i] * f.alphas[i] + (i > 0 ? f.betas[i - 1] * f.betas[i - 1] : 0.0);
            EXPECT_NEAR(btb(i, i), diag, 1e-14 * std::max(1.0, diag));
            if (i + 1 < k) EXPECT_NEAR(btb(i, i + 1), f.alphas[i] * f.betas[i], 1e-14 * std::max(1.0, btb(i, i)));
        }
    }
}

TEST(BidiagProperties, RitzValuesInterlaceCounterpartSpectrum) {
    Rng rng(107);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 10 + rng.below(40);
        const QuatMatrix a = random_dense_quat(n, n, rng.next());
        const auto sv = oracle::quaternion_singular_values(a);
        Rng run(rng.next());
        const auto f = lanczos_bidiag(a, CompactVector::random_unit(n, run), n, run);
        const SvdResult s = dense_svd(f.bidiagonal());
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(s.sigmas[j], sv[j], 1e-10 * sv[0]);
    }
}

TEST(RestartProperties, CycleIdentitiesHoldEveryCycle) {
    Rng rng(108);
    for (Which which : {Which::Largest, Which::Smallest}) {
        for (int trial = 0; trial < 3; ++trial) {
            const QuatMatrix a = random_dense_quat(50 + rng.below(20), 30 + rng.below(10), rng.next());
            const std::size_t mb = 16, t = 8;
            Rng start(rng.next());
            CycleState s = make_start_state(CompactVector::random_unit(a.cols(), start), rng.next());
            lanczos_extend(a, s, mb);
            for (int c = 0; c < 6; ++c) {
                if (which == Which::Largest) {
                    ritz_augment_cycle(a, s, t, mb);
                } else {
                    const SvdResult h = dense_svd(augmented(s));
                    const DenseMatrix bbt = multiply(augmented(s), augmented(s).transpose());
                    for (std::size_t j = 0; j < mb; ++j) {
                        const double sig2 = h.sigmas[j] * h.sigmas[j];
                        for (std::size_t i = 0; i < mb; ++i) {
                            double lhs = 0;
                            for (std::size_t l = 0; l < mb; ++l) lhs += bbt(i, l) * h.U(l, j);
                            EXPECT_NEAR(lhs, sig2 * h.U(i, j), 1e-12 * h.sigmas[0] * h.sigmas[0]);
                        }
                    }
                    harmonic_augment_cycle(a, s, t, mb);
                }
                const double sig = dense_svd(s.B).sigmas.front();
                const auto r = factorization_residuals(a, s);
                EXPECT_LE(r.right, 1e-11 * sig);
                EXPECT_LE(r.left, 1e-11 * sig);
                EXPECT_LE(r.p_orthogonality, 1e-12);
                EXPECT_LE(r.q_orthogonality, 1e-12);
            }
        }
    }
}

TEST(RestartProperties, LargestBoundsDoNotGrowAcrossWindows) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        std::vector<double> spectrum(40);
        for (std::size_t j = 0; j < spectrum.size(); ++j) spectrum[j] = 10.0 * std::pow(0.97, static_cast<double>(j));
        const QuatMatrix a = oracle::with_spectrum(60, 40, spectrum, seed);
        SolverOptions o;
        o.k = 3;
        o.mb = 6;
        o.seed = seed;
        o.maxit = 200;
        const SolveResult r = solve_partial_svd(a, o);
        EXPECT_TRUE(r.converged);
        EXPECT_GE(r.cycles, 15u);
        const auto& cycles = r.trace.cycles;
        for (std::size_t j = 0; j < o.k; ++j) {
            double best = cycles.front().bounds[j];
            for (std::size_t c = 5; c < cycles.size(); c += 5) {
                double window = cycles[c].bounds[j];
                for (std::size_t d = c; d < std::min(c + 5, cycles.size()); ++d)
                    window = std::min(window, cycles[d].bounds[j]);
                EXPECT_LE(window, 10.0 * best) << "seed " << seed << " target " << j << " cycle " << c;
                best = std::min(best, window);
                for (std::size_t d = c - 5; d < c; ++d) best = std::min(best, cycles[d].bounds[j]);
            }
        }
    }
}

TEST(RestartProperties, MultiplicityFourConsistency) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const QuatMatrix a = random_dense_quat(40, 30, seed);
        for (Which which : {Which::Largest, Which::Smallest}) {
            SolverOptions o;
            o.k = 4;
            o.which = which;
            o.seed = seed;
            const SolveResult r = solve_partial_svd(a, o);
            ASSERT_TRUE(r.converged);
            const Eigen::MatrixXd e = oracle::counterpart(a);
            for (std::size_t j = 0; j < o.k; ++j) {
                const Eigen::MatrixXd u = oracle::to_eigen(expand_vector(r.triplets.U[j]));
                const Eigen::MatrixXd v = oracle::to_eigen(expand_vector(r.triplets.V[j]));
                EXPECT_LE((u.transpose() * u - Eigen::Matrix4d::Identity()).norm(), 1e-12);
                EXPECT_LE((v.transpose() * v - Eigen::Matrix4d::Identity()).norm(), 1e-12);
                const double res = (e * v - u * r.triplets.sigmas[j]).norm();
                EXPECT_LE(res, 2.0 * std::max(10.0 * r.triplets.bounds[j], 1e-12 * r.norm_estimate));
            }
        }
    }
}

TEST(LowRankProperties, TailIdentityForAllRanks) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const QuatMatrix a = random_dense_quat(40, 30, seed);
        SolverOptions o;
        o.k = 30;
        o.seed = seed;
        const SolveResult r = solve_partial_svd(a, o);
        const double fro = a.frobenius_norm();
        for (std::size_t k = 1; k <= 30; ++k) {
            const QuatMatrix ak = low_rank_approx(r.triplets, k);
            double diff = 0;
            for (int c = 0; c < 4; ++c) {
                const auto x = ak.block(c), y = a.block(c);
                for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] - y[i]) * (x[i] - y[i]);
            }
            double tail = 0;
            for (std::size_t j = k; j < 30; ++j) tail += r.triplets.sigmas[j] * r.triplets.sigmas[j];
            EXPECT_NEAR(std::sqrt(diff) / fro, std::sqrt(tail) / fro, 1e-10) << k;
        }
    }
}
