#include <numeric>

#include "opspace/linalg.hpp"
#include "opspace/random.hpp"
#include "support.hpp"

using namespace opspace;
using namespace opspace::linalg;
using testing_support::max_abs_diff;
using testing_support::rel_err;
using testing_support::unit;

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_EQ(max_abs_diff(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)),
                           ComplexMatrix::Identity(6, 6)),
              0.0);
}

TEST(Kron, ScalarUnit) {
    const ComplexMatrix e12 = unit(2, 0, 1);
    EXPECT_EQ(max_abs_diff(kron(e12, ComplexMatrix::Ones(1, 1)), e12), 0.0);
}

TEST(Kron, MatchesFourIndexLoop) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix A = rng.gaussian_matrix(2);
        const ComplexMatrix B = rng.gaussian_matrix(2);
        ComplexMatrix ref(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) ref(2 * i + k, 2 * j + l) = A(i, j) * B(k, l);
        EXPECT_LT(max_abs_diff(kron(A, B), ref), 1e-15);
    }
}

TEST(Kron, DimensionGuard) {
    const ComplexMatrix big = ComplexMatrix::Identity(300, 300);
    EXPECT_THROW(kron(big, big), DimensionGuardError);
    try {
        kron(big, big);
    } catch (const DimensionGuardError& e) {
        EXPECT_EQ(e.required(), 90000u);
    }
}

TEST(Conj, Basics) {
    EXPECT_EQ(max_abs_diff(conj_matrix(ComplexMatrix::Identity(3, 3)), ComplexMatrix::Identity(3, 3)),
              0.0);
    const ComplexMatrix ie11 = cplx(0, 1) * unit(2, 0, 0);
    EXPECT_EQ(max_abs_diff(conj_matrix(ie11), cplx(0, -1) * unit(2, 0, 0)), 0.0);
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix A = rng.gaussian_matrix(3);
        EXPECT_EQ(max_abs_diff(conj_matrix(conj_matrix(A)), A), 0.0);
        EXPECT_LT(rel_err(spectral_norm(conj_matrix(A)), spectral_norm(A)), 1e-12);
    }
}

TEST(SpectralNorm, TrivialCases) {
    EXPECT_NEAR(spectral_norm(ComplexMatrix(ComplexMatrix::Identity(5, 5))), 1.0, 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    EXPECT_NEAR(spectral_norm(d), 3.0, 1e-14);
}

TEST(SpectralNorm, ImplicitMatchesDenseAt1024) {
    Rng rng(2024);
    KronSumOperator op({4, 4, 4, 4, 4});
    for (int t = 0; t < 3; ++t) {
        std::vector<ComplexMatrix> f;
        for (int s = 0; s < 5; ++s) f.push_back(rng.gaussian_matrix(4));
        op.add_term(rng.complex_normal(), std::move(f));
    }
    ASSERT_EQ(op.total_dim(), 1024u);
    const double implicit = spectral_norm(op);
    const double dense = spectral_norm(op.dense());
    EXPECT_LT(rel_err(implicit, dense), 1e-8);
}

TEST(SpectralNorm, ApplyMatchesDense) {
    Rng rng(5);
    KronSumOperator op({2, 3, 2});
    for (int t = 0; t < 2; ++t)
        op.add_term(rng.complex_normal(),
                    {rng.gaussian_matrix(2), rng.gaussian_matrix(3), rng.gaussian_matrix(2)});
    ComplexVector v(12);
    for (int i = 0; i < 12; ++i) v[i] = rng.complex_normal();
    const ComplexMatrix D = op.dense();
    EXPECT_LT((op.apply(v) - D * v).norm(), 1e-12);
    EXPECT_LT((op.apply_adjoint(v) - D.adjoint() * v).norm(), 1e-12);
}

TEST(SpectralNorm, OnesEigenvectorDoesNotTrapPowerIteration) {
    ComplexMatrix A(2, 2);
    A << 1.5, -1.0, -1.0, 1.5;
    const double v = power_spectral_norm(
        2, [&](const ComplexVector& x) { return ComplexVector(A * x); },
        [&](const ComplexVector& x) { return ComplexVector(A.adjoint() * x); });
    EXPECT_NEAR(v, 2.5, 1e-8);
}

TEST(SpectralNorm, ZeroOperator) {
    KronSumOperator op({8, 8, 8});
    op.add_term(0.0, {ComplexMatrix::Identity(8, 8), ComplexMatrix::Identity(8, 8),
                      ComplexMatrix::Identity(8, 8)});
    EXPECT_EQ(spectral_norm(op), 0.0);
}

TEST(MinEig, Cases) {
    EXPECT_NEAR(min_eig_hermitian(ComplexMatrix::Identity(3, 3)), 1.0, 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = -2.0;
    d(1, 1) = 5.0;
    EXPECT_NEAR(min_eig_hermitian(d), -2.0, 1e-14);
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const ComplexMatrix A = rng.gaussian_matrix(4);
        EXPECT_GE(min_eig_hermitian(A.adjoint() * A), -1e-12);
    }
    EXPECT_THROW(min_eig_hermitian(unit(2, 0, 1)), DomainError);
}

// Invariants

TEST(Invariants, MultiplicativityOn500Pairs) {
    Rng rng(500);
    for (int t = 0; t < 500; ++t) {
        const ComplexMatrix A = rng.gaussian_matrix(rng.uniform_int(1, 4));
        const ComplexMatrix B = rng.gaussian_matrix(rng.uniform_int(1, 4));
        const double lhs = spectral_norm(kron(A, B));
        const double rhs = spectral_norm(A) * spectral_norm(B);
        EXPECT_LE(std::abs(lhs - rhs), 1e-9 * rhs) << "pair " << t;
    }
}

TEST(Invariants, SlotPermutationInvariance) {
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        const std::vector<std::size_t> dims{2, 3, 2, 1};
        KronSumOperator op(dims);
        for (int k = 0; k < 3; ++k) {
            std::vector<ComplexMatrix> f;
            for (auto d : dims) f.push_back(rng.gaussian_matrix(static_cast<Eigen::Index>(d)));
            op.add_term(rng.complex_normal(), std::move(f));
        }
        std::vector<std::size_t> perm(dims.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const auto q = op.permuted(perm);
        const double a = spectral_norm(op), b = spectral_norm(q);
        EXPECT_LE(std::abs(a - b), 1e-9 * a);
        // dense slot permutation agrees with term-wise permutation
        EXPECT_LT(max_abs_diff(permute_slots(op.dense(), dims, perm), q.dense()), 1e-12);
    }
}

TEST(Invariants, ImplicitDenseAgreement) {
    Rng rng(4096);
    const std::vector<std::vector<std::size_t>> shapes{
        {8, 8, 8}, {4, 4, 4, 4, 4}, {2, 3, 4, 5}, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2}};
    for (const auto& dims : shapes) {
        KronSumOperator op(dims);
        for (int k = 0; k < 2; ++k) {
            std::vector<ComplexMatrix> f;
            for (auto d : dims) f.push_back(rng.gaussian_matrix(static_cast<Eigen::Index>(d)));
            op.add_term(rng.complex_normal(), std::move(f));
        }
        const double implicit = power_spectral_norm(
            op.total_dim(), [&](const ComplexVector& v) { return op.apply(v); },
            [&](const ComplexVector& v) { return op.apply_adjoint(v); });
        const double dense = spectral_norm(op.dense());
        EXPECT_LT(rel_err(implicit, dense), 1e-8);
    }
}

TEST(Invariants, ImplicitAt4096AgainstFactorNorms) {
    // a single elementary tensor: the dense answer is the product of the factor norms
    Rng rng(4097);
    const std::vector<std::size_t> dims{16, 16, 16};
    std::vector<ComplexMatrix> f;
    double expect = 1.0;
    for (auto d : dims) {
        f.push_back(rng.gaussian_matrix(static_cast<Eigen::Index>(d)));
        expect *= spectral_norm(f.back());
    }
    KronSumOperator op(dims);
    op.add_term(1.0, f);
    EXPECT_LT(rel_err(spectral_norm(op), expect), 1e-8);
}

TEST(KronSum, RejectsMismatchedTerms) {
    KronSumOperator op({2, 3});
    EXPECT_THROW(op.add_term(1.0, {ComplexMatrix::Identity(2, 2)}), DomainError);
    EXPECT_THROW(op.add_term(1.0, {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)}),
                 DomainError);
}

TEST(Guard, EnvironmentOverride) {
    setenv("OPSPACE_MAX_DIM", "16", 1);
    EXPECT_EQ(max_dim(), 16u);
    EXPECT_THROW(KronSumOperator({4, 8}), DimensionGuardError);
    unsetenv("OPSPACE_MAX_DIM");
    EXPECT_EQ(max_dim(), kDefaultMaxDim);
}
