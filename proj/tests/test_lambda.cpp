#include "opspace/lambda.hpp"
#include "opspace/ordercone.hpp"
#include "support.hpp"

using namespace opspace;
using namespace opspace::comm;
using testing_support::max_abs_diff;
using testing_support::rel_err;

namespace {

FiniteMeasureSpace random_space(Rng& rng, std::size_t atoms, bool probability) {
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        w.push_back(0.2 + rng.uniform());
        total += w.back();
    }
    if (probability)
        for (auto& x : w) x /= total;
    return FiniteMeasureSpace(w);
}

// Lambda_p norm straight from the definition with dense Kronecker products.
double lambda_norm_oracle(const MatrixField& f, int p) {
    const int m = p / 2;
    ComplexMatrix acc;
    for (std::size_t w = 0; w < f.size(); ++w) {
        ComplexMatrix t = ComplexMatrix::Identity(1, 1);
        for (int k = 0; k < m; ++k) t = linalg::kron(t, f[w]);
        for (int k = 0; k < m; ++k) t = linalg::kron(t, f[w].conjugate());
        if (w == 0)
            acc = f.space().weight(w) * t;
        else
            acc += f.space().weight(w) * t;
    }
    return std::pow(linalg::spectral_norm(acc), 1.0 / p);
}

}  // namespace

TEST(MeasureSpace, ProbabilityFlag) {
    EXPECT_TRUE(FiniteMeasureSpace::uniform(7).is_probability());
    EXPECT_FALSE(FiniteMeasureSpace({1.0, 2.0}).is_probability());
    EXPECT_THROW(FiniteMeasureSpace({1.0, 0.0}), DomainError);
    EXPECT_THROW(FiniteMeasureSpace({}), DomainError);
}

TEST(PointwiseTensor, TrivialSlotAndScalars) {
    Rng rng(1);
    const auto sp = FiniteMeasureSpace::uniform(3);
    const auto f = MatrixField::random(sp, 2, rng);
    const auto one = MatrixField::scalar(sp, {1.0, 1.0, 1.0});
    const auto g = pointwise_tensor(f, one);
    for (std::size_t w = 0; w < 3; ++w) EXPECT_EQ(max_abs_diff(g[w], f[w]), 0.0);

    const auto a = MatrixField::scalar(sp, {2.0, cplx(0, 1), -1.0});
    const auto b = MatrixField::scalar(sp, {3.0, cplx(0, 1), 5.0});
    const auto ab = pointwise_tensor(a, b);
    EXPECT_EQ(ab[0](0, 0), cplx(6.0));
    EXPECT_EQ(ab[1](0, 0), cplx(-1.0));
    EXPECT_EQ(ab[2](0, 0), cplx(-5.0));
}

TEST(PointwiseTensor, Associative) {
    Rng rng(2);
    const auto sp = FiniteMeasureSpace::uniform(4);
    for (int t = 0; t < 10; ++t) {
        const auto f = MatrixField::random(sp, 2, rng);
        const auto g = MatrixField::random(sp, 3, rng);
        const auto h = MatrixField::random(sp, 2, rng);
        const auto l = pointwise_tensor(pointwise_tensor(f, g), h);
        const auto r = pointwise_tensor(f, pointwise_tensor(g, h));
        for (std::size_t w = 0; w < 4; ++w) EXPECT_LT(max_abs_diff(l[w], r[w]), 1e-13);
    }
}

TEST(PointwiseTensor, SpaceMismatch) {
    Rng rng(3);
    const auto f = MatrixField::random(FiniteMeasureSpace::uniform(3), 2, rng);
    const auto g = MatrixField::random(FiniteMeasureSpace::uniform(4), 2, rng);
    EXPECT_THROW(pointwise_tensor(f, g), DomainError);
}

TEST(Integrate, ConstantsIndicatorsLinearity) {
    Rng rng(4);
    const auto sp = FiniteMeasureSpace::uniform(5);
    const ComplexMatrix b = rng.gaussian_matrix(3);
    EXPECT_LT(max_abs_diff(integrate(MatrixField::constant(sp, b)), b), 1e-14);

    const auto sp2 = FiniteMeasureSpace({0.3, 1.7, 0.5});
    std::vector<ComplexMatrix> v(3, ComplexMatrix::Zero(3, 3));
    v[1] = b;
    EXPECT_LT(max_abs_diff(integrate(MatrixField(sp2, v)), 1.7 * b), 1e-14);

    for (int t = 0; t < 10; ++t) {
        const auto f = MatrixField::random(sp2, 2, rng);
        const auto g = MatrixField::random(sp2, 2, rng);
        const cplx a = rng.complex_normal();
        EXPECT_LT(max_abs_diff(integrate(a * f + g), a * integrate(f) + integrate(g)), 1e-13);
    }
}

TEST(LambdaNorm, OneAtomGivesOperatorNorm) {
    Rng rng(5);
    const auto sp = FiniteMeasureSpace::uniform(1);
    const ComplexMatrix b = rng.gaussian_matrix(2);
    for (int p : {2, 4, 6, 8})
        EXPECT_LT(rel_err(lambda_norm(MatrixField::constant(sp, b), p), linalg::spectral_norm(b)),
                  1e-9);
}

TEST(LambdaNorm, ScalarFieldIsClassicalLp) {
    Rng rng(6);
    const auto sp = random_space(rng, 6, false);
    std::vector<cplx> vals;
    for (int i = 0; i < 6; ++i) vals.push_back(rng.complex_normal());
    const auto f = MatrixField::scalar(sp, vals);
    for (int p : {2, 4, 6, 10}) {
        double s = 0.0;
        for (int i = 0; i < 6; ++i) s += sp.weight(i) * std::pow(std::abs(vals[i]), p);
        EXPECT_LT(rel_err(lambda_norm(f, p), std::pow(s, 1.0 / p)), 1e-12);
    }
}

TEST(LambdaNorm, AtomOrderIrrelevant) {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        const auto f = MatrixField::random(random_space(rng, 4, false), 2, rng);
        EXPECT_LT(rel_err(lambda_norm(f, 4), lambda_norm(f.reversed(), 4)), 1e-12);
        EXPECT_LT(rel_err(lambda_norm(f, 4), lambda_norm_oracle(f, 4)), 1e-12);
    }
}

TEST(LambdaNorm, ImplicitPathMatchesDenseOracle) {
    Rng rng(8);
    const auto f = MatrixField::random(FiniteMeasureSpace::uniform(3), 3, rng);
    EXPECT_LT(rel_err(lambda_norm(f, 6), lambda_norm_oracle(f, 6)), 1e-9);
}

TEST(LambdaNorm, OddPRejected) {
    Rng rng(9);
    const auto f = MatrixField::random(FiniteMeasureSpace::uniform(2), 2, rng);
    EXPECT_THROW(lambda_norm(f, 3), DomainError);
    EXPECT_THROW(lambda_norm(f, 0), DomainError);
}

TEST(LambdaNorm, GuardOverflowReported) {
    Rng rng(10);
    const auto f = MatrixField::random(FiniteMeasureSpace::uniform(2), 4, rng);
    EXPECT_THROW(lambda_norm(f, 10), DimensionGuardError);
}

TEST(ConditionalExpectation, TrivialAndDiscrete) {
    Rng rng(11);
    const auto sp = random_space(rng, 4, true);
    const auto f = MatrixField::random(sp, 2, rng);
    const auto E = conditional_expectation(f, {{0, 1, 2, 3}});
    for (std::size_t w = 0; w < 4; ++w) EXPECT_LT(max_abs_diff(E[w], integrate(f)), 1e-14);
    const auto D = conditional_expectation(f, {{0}, {1}, {2}, {3}});
    for (std::size_t w = 0; w < 4; ++w) EXPECT_LT(max_abs_diff(D[w], f[w]), 1e-15);
    EXPECT_THROW(conditional_expectation(f, {{0, 1}, {}, {2, 3}}), DomainError);
    EXPECT_THROW(conditional_expectation(f, {{0, 1}, {2}}), DomainError);
}

TEST(ConditionalExpectation, IdempotentAndPreservesConstants) {
    Rng rng(12);
    const auto sp = random_space(rng, 6, true);
    const AtomPartition blocks{{0, 5}, {1, 2, 3}, {4}};
    const auto f = MatrixField::random(sp, 2, rng);
    const auto E = conditional_expectation(f, blocks);
    const auto EE = conditional_expectation(E, blocks);
    for (std::size_t w = 0; w < 6; ++w) EXPECT_LT(max_abs_diff(E[w], EE[w]), 1e-14);
    const ComplexMatrix b = rng.gaussian_matrix(2);
    const auto c = conditional_expectation(MatrixField::constant(sp, b), blocks);
    for (std::size_t w = 0; w < 6; ++w) EXPECT_LT(max_abs_diff(c[w], b), 1e-14);
}

TEST(ConditionalExpectation, CompletelyContractive200) {
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const auto sp = random_space(rng, 4, true);
        const auto f = MatrixField::random(sp, static_cast<std::size_t>(rng.uniform_int(1, 2)), rng);
        const AtomPartition blocks = t % 2 ? AtomPartition{{0, 1}, {2, 3}}
                                           : AtomPartition{{0, 3, 1}, {2}};
        const int p = 2 * (1 + t % 3);
        EXPECT_LE(lambda_norm(conditional_expectation(f, blocks), p), lambda_norm(f, p) + 1e-9);
    }
}

TEST(Holder, EqualNormalizedFieldsAttainOne) {
    Rng rng(14);
    for (int p : {2, 4}) {
        const auto f = MatrixField::random(FiniteMeasureSpace::uniform(3), 2, rng);
        std::vector<MatrixField> fs;
        for (int k = 0; k < p / 2; ++k) fs.push_back(f);
        for (int k = 0; k < p / 2; ++k) fs.push_back(conj(f));
        EXPECT_NEAR(holder_check(fs, p).ratio, 1.0, 1e-10);
    }
}

TEST(Holder, ZeroFactor) {
    Rng rng(15);
    const auto sp = FiniteMeasureSpace::uniform(3);
    std::vector<MatrixField> fs{MatrixField::random(sp, 2, rng), MatrixField::zero(sp, 2),
                                MatrixField::random(sp, 2, rng), MatrixField::random(sp, 2, rng)};
    const auto r = holder_check(fs, 4);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.ratio, 0.0);
    EXPECT_THROW(holder_check({fs[0], fs[1]}, 4), DomainError);
}

TEST(Holder, Fuzz500) {
    Rng rng(16);
    for (int t = 0; t < 500; ++t) {
        const auto sp = random_space(rng, static_cast<std::size_t>(rng.uniform_int(1, 4)), false);
        std::vector<MatrixField> fs;
        for (int k = 0; k < 4; ++k)
            fs.push_back(MatrixField::random(sp, static_cast<std::size_t>(rng.uniform_int(1, 2)), rng));
        EXPECT_LE(holder_check(fs, 4).ratio, 1.0 + 1e-9) << "instance " << t;
    }
}

TEST(CauchySchwarz, EqualityAndZero) {
    Rng rng(17);
    const auto sp = random_space(rng, 3, false);
    const auto f = MatrixField::random(sp, 2, rng);
    EXPECT_NEAR(cauchy_schwarz_check(f, conj(f)).ratio, 1.0, 1e-12);
    EXPECT_EQ(cauchy_schwarz_check(f, MatrixField::zero(sp, 3)).ratio, 0.0);
}

TEST(CauchySchwarz, Fuzz1000) {
    Rng rng(18);
    for (int t = 0; t < 1000; ++t) {
        const auto sp = random_space(rng, static_cast<std::size_t>(rng.uniform_int(1, 4)), false);
        const auto f = MatrixField::random(sp, static_cast<std::size_t>(rng.uniform_int(1, 3)), rng);
        const auto g = MatrixField::random(sp, static_cast<std::size_t>(rng.uniform_int(1, 3)), rng);
        EXPECT_LE(cauchy_schwarz_check(f, g).ratio, 1.0 + 1e-9) << "instance " << t;
    }
}

TEST(LinfLimit, ConstantAndScalar) {
    Rng rng(19);
    const ComplexMatrix b = rng.gaussian_matrix(2);
    const auto r = linf_limit_check(MatrixField::constant(FiniteMeasureSpace::uniform(2), b),
                                    {2, 4, 6, 8});
    for (double v : r.norms) EXPECT_LT(rel_err(v, linalg::spectral_norm(b)), 1e-9);

    const auto s = linf_limit_check(
        MatrixField::scalar(FiniteMeasureSpace::uniform(3), {0.5, 2.0, cplx(0, -1)}),
        {2, 4, 8, 16, 32});
    EXPECT_TRUE(s.monotone);
    EXPECT_TRUE(s.bounded);
    EXPECT_DOUBLE_EQ(s.sup_norm, 2.0);
    EXPECT_LT(s.final_gap, 0.1);
}

TEST(LinfLimit, RandomGapShrinks) {
    Rng rng(20);
    for (int t = 0; t < 5; ++t) {
        const auto f = MatrixField::random(FiniteMeasureSpace::uniform(2), 2, rng);
        const auto r = linf_limit_check(f, {2, 4, 8, 16});
        EXPECT_TRUE(r.monotone);
        EXPECT_TRUE(r.bounded);
        for (std::size_t i = 0; i < r.ps.size(); ++i) {
            EXPECT_LE(r.atom_lower_bounds[i], r.norms[i] + 1e-9);
            if (i > 0) EXPECT_LE(r.sup_norm - r.norms[i], r.sup_norm - r.norms[i - 1] + 1e-9);
        }
    }
    EXPECT_THROW(linf_limit_check(MatrixField::constant(FiniteMeasureSpace({1.0, 1.0}),
                                                        ComplexMatrix::Identity(1, 1)),
                                  {2}),
                 DomainError);
}

// Invariants

TEST(Invariants, GeneralizedCauchySchwarz) {
    Rng rng(21);
    for (int t = 0; t < 60; ++t) {
        const auto sp = random_space(rng, 3, true);
        std::vector<MatrixField> as, bs;
        const int K = rng.uniform_int(1, 3);
        for (int k = 0; k < K; ++k) {
            as.push_back(MatrixField::random(sp, 2, rng));
            bs.push_back(MatrixField::random(sp, 2, rng));
        }
        for (int m : {1, 2}) EXPECT_LE(generalized_cauchy_schwarz_check(as, bs, m).ratio, 1.0 + 1e-9);
    }
}

TEST(Invariants, Lambda2IsOhNorm) {
    Rng rng(22);
    for (int t = 0; t < 20; ++t) {
        const auto f = MatrixField::random(random_space(rng, 4, false), 3, rng);
        const double v = lambda_norm(f, 2);
        EXPECT_LT(rel_err(v * v, linalg::spectral_norm(integrate(gram(f)))), 1e-12);
    }
}

TEST(Invariants, MonotoneInP) {
    Rng rng(23);
    for (int t = 0; t < 40; ++t) {
        const auto f = MatrixField::random(random_space(rng, 3, true), 2, rng);
        double prev = 0.0;
        for (int p : {2, 4, 6, 8}) {
            const double v = lambda_norm(f, p);
            EXPECT_LE(prev, v + 1e-9);
            prev = v;
        }
    }
}

TEST(Invariants, PointwiseDomination) {
    // a single Gram a (x) a-bar dominates b (x) b-bar exactly when b = c a with |c| <= 1
    Rng rng(24);
    for (int t = 0; t < 40; ++t) {
        const auto sp = random_space(rng, 3, true);
        const auto f = MatrixField::random(sp, 2, rng);
        std::vector<ComplexMatrix> gv;
        for (std::size_t w = 0; w < 3; ++w) {
            const cplx c = std::polar(rng.uniform(), 6.283185307179586 * rng.uniform());
            gv.push_back(c * f[w]);
        }
        const MatrixField g(sp, gv);
        for (std::size_t w = 0; w < 3; ++w)
            ASSERT_TRUE(ordercone::precedes(ordercone::PairedTensor::gram(g[w]),
                                            ordercone::PairedTensor::gram(f[w])));
        for (int p : {2, 4, 6}) EXPECT_LE(lambda_norm(g, p), lambda_norm(f, p) + 1e-8);
    }
}
