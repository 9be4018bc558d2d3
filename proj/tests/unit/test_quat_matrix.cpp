#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qsvd/qsvd.hpp"

using namespace qsvd;

namespace {

QuatMatrix single(const Quaternion& q) {
    QuatMatrix m(1, 1);
    m.set(0, 0, q);
    return m;
}

QuatMatrix random_sparse(std::size_t m, std::size_t n, std::size_t per_row, std::uint64_t seed) {
    Rng rng(seed);
    std::array<std::vector<CoordEntry>, 4> parts;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t e = 0; e < per_row; ++e) {
            const std::size_t j = rng.below(n);
            for (int c = 0; c < 4; ++c) parts[c].push_back({i, j, rng.normal()});
        }
    return QuatMatrix::from_coordinates(m, n, parts);
}

}  // namespace

TEST(ExpandRealCounterpart, RealUnitIsIdentity) {
    EXPECT_EQ(expand_real_counterpart(single({1, 0, 0, 0})), DenseMatrix::identity(4));
}

TEST(ExpandRealCounterpart, SecondBlockPattern) {
    const DenseMatrix expected{{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
    EXPECT_EQ(expand_real_counterpart(single({0, 0, 1, 0})), expected);
}

TEST(ExpandRealCounterpart, RandomBlocksAreJrsSymmetric) {
    const QuatMatrix m = random_dense_quat(3, 2, 11);
    const Eigen::MatrixXd e = oracle::to_eigen(expand_real_counterpart(m));
    for (char x : {'J', 'R', 'S'}) {
        const Eigen::MatrixXd lhs = oracle::structure(x, 3) * e * oracle::structure(x, 2).transpose();
        EXPECT_EQ((lhs - e).cwiseAbs().maxCoeff(), 0.0) << x;
    }
    EXPECT_TRUE(is_jrs_symmetric(expand_real_counterpart(m)));
}

TEST(ExpandRealCounterpart, MatchesEntrywiseOracle) {
    const QuatMatrix m = random_dense_quat(4, 3, 5);
    EXPECT_EQ((oracle::to_eigen(expand_real_counterpart(m)) - oracle::counterpart(m)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ExpandRealCounterpart, IsMultiplicative) {
    const QuatMatrix a = random_dense_quat(3, 4, 1), b = random_dense_quat(4, 2, 2);
    const auto qa = oracle::to_qmat(a), qb = oracle::to_qmat(b);
    QuatMatrix ab(3, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            Quaternion s{};
            for (std::size_t l = 0; l < 4; ++l) s += oracle::hamilton(qa(i, l), qb(l, j));
            ab.set(i, j, s);
        }
    const Eigen::MatrixXd lhs = oracle::counterpart(a) * oracle::counterpart(b);
    EXPECT_LT((lhs - oracle::to_eigen(expand_real_counterpart(ab))).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_EQ(oracle::to_eigen(expand_real_counterpart(a.adjoint())),
              oracle::to_eigen(expand_real_counterpart(a)).transpose());
}

TEST(StructureMatrix, MatchesDefinitions) {
    EXPECT_EQ(oracle::to_eigen(structure_matrix(Structure::J, 3)), oracle::structure('J', 3));
    EXPECT_EQ(oracle::to_eigen(structure_matrix(Structure::R, 3)), oracle::structure('R', 3));
    EXPECT_EQ(oracle::to_eigen(structure_matrix(Structure::S, 3)), oracle::structure('S', 3));
}

TEST(StructureMatrix, UnstructuredMatrixIsRejected) {
    DenseMatrix d = expand_real_counterpart(random_dense_quat(2, 2, 3));
    d(0, 1) += 1.0;
    EXPECT_FALSE(is_jrs_symmetric(d));
    EXPECT_FALSE(is_jrs_symmetric(DenseMatrix(3, 4)));
}

TEST(QuatMatrix, AccessorsAndBlocks) {
    QuatMatrix m(2, 3);
    m.set(1, 2, {1, 2, 3, 4});
    EXPECT_EQ(m.at(1, 2), Quaternion(1, 2, 3, 4));
    EXPECT_EQ(m.block(3)[1 * 3 + 2], 4.0);
    EXPECT_FALSE(m.is_sparse());
    EXPECT_EQ(m.stored_entries(), 6u);
    EXPECT_DOUBLE_EQ(m.frobenius_norm(), std::sqrt(30.0));
    EXPECT_THROW(QuatMatrix::from_blocks(2, 2, {std::vector<double>(4), {}, {}, {}}), DimensionError);
}

TEST(QuatMatrix, SparseStorageSumsDuplicates) {
    std::array<std::vector<CoordEntry>, 4> parts;
    parts[0] = {{0, 0, 1.0}, {0, 0, 2.0}};
    parts[3] = {{4, 5, -1.0}};
    const QuatMatrix m = QuatMatrix::from_coordinates(10, 10, parts);
    EXPECT_TRUE(m.is_sparse());
    EXPECT_EQ(m.stored_entries(), 2u);
    EXPECT_EQ(m.at(0, 0), Quaternion(3, 0, 0, 0));
    EXPECT_EQ(m.at(4, 5), Quaternion(0, 0, 0, -1));
    EXPECT_EQ(m.at(5, 4), Quaternion{});
    EXPECT_THROW(m.at(10, 0), DimensionError);
    EXPECT_EQ(m.to_dense().at(4, 5), m.at(4, 5));

    std::array<std::vector<CoordEntry>, 4> bad;
    bad[1] = {{10, 0, 1.0}};
    EXPECT_THROW(QuatMatrix::from_coordinates(10, 10, bad), DimensionError);
}

TEST(StructuredMatvec, UnitProduct) {
    const QuatMatrix m = single({0, 1, 0, 0});
    const std::vector<Quaternion> x{{0, 0, 1, 0}};
    const CompactVector y = structured_matvec(m, CompactVector(x));
    EXPECT_EQ(y.at(0), Quaternion(0, 0, 0, 1));
}

TEST(StructuredMatvec, ZeroMatrix) {
    Rng rng(1);
    const CompactVector y = structured_matvec(QuatMatrix(4, 3), CompactVector::random_unit(3, rng));
    EXPECT_EQ(vec_norm(y), 0.0);
    EXPECT_EQ(y.size(), 4u);
}

TEST(StructuredMatvec, MatchesExpandedProduct) {
    const QuatMatrix m = random_dense_quat(8, 5, 21);
    Rng rng(4);
    const CompactVector x = CompactVector::random_unit(5, rng);
    const CompactVector u = CompactVector::random_unit(8, rng);
    const Eigen::MatrixXd e = oracle::counterpart(m);

    const Eigen::MatrixXd y = e * oracle::to_eigen(expand_vector(x));
    const Eigen::MatrixXd yc = oracle::to_eigen(expand_vector(structured_matvec(m, x)));
    EXPECT_LT((y - yc).norm(), 1e-13 * y.norm());

    const Eigen::MatrixXd z = e.transpose() * oracle::to_eigen(expand_vector(u));
    const Eigen::MatrixXd zc = oracle::to_eigen(expand_vector(structured_matvec(m, u, true)));
    EXPECT_LT((z - zc).norm(), 1e-13 * z.norm());
}

TEST(StructuredMatvec, SparseAndDensePathsAgree) {
    const QuatMatrix s = random_sparse(30, 20, 2, 8);
    ASSERT_TRUE(s.is_sparse());
    const QuatMatrix d = s.to_dense();
    Rng rng(2);
    const CompactVector x = CompactVector::random_unit(20, rng);
    const CompactVector u = CompactVector::random_unit(30, rng);
    EXPECT_LT(vec_norm(structured_matvec(s, x) - structured_matvec(d, x)), 1e-14);
    EXPECT_LT(vec_norm(structured_matvec(s, u, true) - structured_matvec(d, u, true)), 1e-14);

    const auto naive = oracle::naive_matvec(oracle::to_qmat(s), oracle::to_qvec(x), false);
    EXPECT_LT(vec_norm(structured_matvec(s, x) - CompactVector(naive)), 1e-13);
}

TEST(StructuredMatvec, DimensionMismatch) {
    const QuatMatrix m = random_dense_quat(4, 3, 1);
    EXPECT_THROW(structured_matvec(m, CompactVector(4)), DimensionError);
    EXPECT_THROW(structured_matvec(m, CompactVector(3), true), DimensionError);
}
