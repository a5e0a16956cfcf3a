#include <map>

#include "opspace/randmat.hpp"
#include "support.hpp"

using namespace opspace;
using namespace opspace::randmat;
using partitions::PairPartition;

namespace {

// E tau_N((Y Y*)^{p/2}) by summing the Wick moment of every entry product over all N^p index tuples.
// Variables: g_ab at a N + b, conj g_ab at N^2 + a N + b.
double brute_force_moment(int N, int p) {
    const int V = 2 * N * N;
    ComplexMatrix cov = ComplexMatrix::Zero(V, V);
    for (int v = 0; v < N * N; ++v) cov(v, N * N + v) = cov(N * N + v, v) = 1.0;
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    std::vector<int> word(static_cast<std::size_t>(p));
    cplx total = 0.0;
    while (true) {
        for (int k = 0; k < p; ++k) {
            const int a = idx[static_cast<std::size_t>(k)], b = idx[static_cast<std::size_t>((k + 1) % p)];
            word[static_cast<std::size_t>(k)] = k % 2 == 0 ? a * N + b : N * N + b * N + a;
        }
        total += wick_scalar_moment(cov, word);
        int pos = 0;
        while (pos < p && ++idx[static_cast<std::size_t>(pos)] == N) idx[static_cast<std::size_t>(pos++)] = 0;
        if (pos == p) break;
    }
    EXPECT_NEAR(total.imag(), 0.0, 1e-12);
    return total.real() / std::pow(static_cast<double>(N), 1.0 + p / 2.0);
}

}  // namespace

TEST(Wick, SinglePairReturnsCovariance) {
    ComplexMatrix cov(2, 2);
    cov << 1.0, cplx(0.3, -0.2), cplx(0.3, -0.2), 2.0;
    EXPECT_EQ(wick_scalar_moment(cov, {0, 1}), cplx(0.3, -0.2));
    EXPECT_EQ(wick_scalar_moment(cov, {}), cplx(1.0));
}

TEST(Wick, FourthMomentIsThreeSigmaFour) {
    ComplexMatrix cov(1, 1);
    cov(0, 0) = 1.7;
    EXPECT_NEAR(std::abs(wick_scalar_moment(cov, {0, 0, 0, 0}) - 3.0 * 1.7 * 1.7), 0.0, 1e-12);
    // sixth moment 15 sigma^6
    EXPECT_NEAR(std::abs(wick_scalar_moment(cov, {0, 0, 0, 0, 0, 0}) - 15.0 * std::pow(1.7, 3)), 0.0, 1e-11);
}

TEST(Wick, OddWordsVanish) {
    ComplexMatrix cov = ComplexMatrix::Identity(3, 3);
    EXPECT_EQ(wick_scalar_moment(cov, {0, 1, 2}), cplx(0.0));
    EXPECT_EQ(wick_scalar_moment(cov, {0}), cplx(0.0));
}

TEST(Wick, RejectsLongWordsAndAsymmetricCovariance) {
    ComplexMatrix cov = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(wick_scalar_moment(cov, std::vector<int>(14, 0)), DomainError);
    cov(0, 1) = 1.0;
    EXPECT_THROW(wick_scalar_moment(cov, {0, 1}), DomainError);
}

TEST(Wick, MatchesMonteCarloAtLengthSix) {
    Rng rng(11);
    Eigen::MatrixXd A(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = rng.normal();
    const Eigen::MatrixXd cov = A * A.transpose() / 3.0;
    for (const std::vector<int>& word : {std::vector<int>{0, 1, 2, 0, 1, 2}, std::vector<int>{0, 0, 1, 1, 2, 2},
                                         std::vector<int>{0, 0, 0, 1, 1, 2}}) {
        const double exact = wick_scalar_moment(cov.cast<cplx>(), word).real();
        const auto [mean, se] = wick_scalar_mc(cov, word, 1000000, 99);
        EXPECT_LE(std::abs(mean - exact), 3.0 * se) << exact << " vs " << mean << " +- " << se;
    }
}

TEST(GinibreWeight, PEqualsTwo) {
    for (double N : {1.0, 2.0, 7.0}) EXPECT_EQ(ginibre_pairing_weight(PairPartition(2, {{1, 2}}), N, 2), 1.0);
}

TEST(GinibreWeight, PEqualsFour) {
    for (double N : {1.0, 3.0, 10.0}) {
        EXPECT_DOUBLE_EQ(ginibre_pairing_weight(PairPartition(4, {{1, 2}, {3, 4}}), N, 4), 1.0);
        EXPECT_DOUBLE_EQ(ginibre_pairing_weight(PairPartition(4, {{1, 4}, {2, 3}}), N, 4), 1.0);
        EXPECT_EQ(ginibre_pairing_weight(PairPartition(4, {{1, 3}, {2, 4}}), N, 4), 0.0);
    }
}

TEST(GinibreWeight, PEqualsSixHistogram) {
    const double N = 5.0;
    std::map<double, int> hist;
    for (const auto& nu : partitions::enumerate_pair_partitions(6)) ++hist[ginibre_pairing_weight(nu, N, 6)];
    ASSERT_EQ(hist.size(), 3u);
    EXPECT_EQ(hist[1.0], 5);
    EXPECT_EQ(hist[0.0], 9);
    EXPECT_EQ(hist[1.0 / (N * N)], 1);
    EXPECT_DOUBLE_EQ(ginibre_pairing_weight(PairPartition(6, {{1, 4}, {2, 5}, {3, 6}}), N, 6), 1.0 / (N * N));
}

TEST(GinibreWeight, RejectsSizeMismatch) {
    EXPECT_THROW(ginibre_pairing_weight(PairPartition(2, {{1, 2}}), 2.0, 4), DomainError);
    EXPECT_THROW(ginibre_pairing_weight(PairPartition(2, {{1, 2}}), 2.0, 3), DomainError);
}

TEST(GinibreMoment, LowOrders) {
    for (double N : {1.0, 2.0, 3.0, 8.0, 100.0}) {
        EXPECT_EQ(moment_exact(N, 2), 1.0);
        EXPECT_EQ(moment_exact(N, 4), 2.0);
        EXPECT_NEAR(moment_exact(N, 6), 5.0 + 1.0 / (N * N), 1e-14);
    }
    EXPECT_EQ(moment_exact(1.0, 6), 6.0);
}

TEST(GinibreMoment, ScalarCaseIsFactorial) {
    // N = 1: E|g|^{2k} = k!
    double f = 1.0;
    for (int k = 1; k <= 6; ++k) {
        f *= k;
        EXPECT_NEAR(moment_exact(1.0, 2 * k), f, 1e-10);
    }
}

TEST(GinibreMoment, MatchesBruteForceWick) {
    for (int N = 1; N <= 3; ++N)
        for (int p = 2; p <= 6; p += 2)
            EXPECT_NEAR(moment_exact(N, p), brute_force_moment(N, p), 1e-10) << "N=" << N << " p=" << p;
}

TEST(GinibreMoment, CatalanLimit) {
    for (int k = 1; k <= 6; ++k) {
        const double cat = static_cast<double>(partitions::catalan(k));
        const double g1 = (moment_exact(100.0, 2 * k) - cat) * 1e4;
        const double g2 = (moment_exact(1000.0, 2 * k) - cat) * 1e6;
        EXPECT_GE(g1, 0.0);
        if (k <= 2) {
            EXPECT_EQ(g1, 0.0);
            continue;
        }
        // the N^{-2} coefficient stabilizes
        EXPECT_NEAR(g1, g2, 0.01 * g2) << "k=" << k;
    }
}

TEST(GinibreMoment, CapEnforced) {
    EXPECT_THROW(moment_exact(2.0, 14), DomainError);
    EXPECT_THROW(moment_exact(2.0, 5), DomainError);
}

TEST(GinibreMc, AgreesWithExact) {
    const auto e2 = moment_mc({8, 1}, 2, 20000);
    EXPECT_TRUE(e2.consistent_with(1.0));
    EXPECT_NEAR(e2.estimate, 1.0, 0.02);
    const auto e4 = moment_mc({8, 2}, 4, 20000);
    EXPECT_TRUE(e4.consistent_with(2.0)) << e4.estimate << " +- " << e4.stderr_;
}

TEST(GinibreMc, SixthMomentAtNEight) {
    const auto e = moment_mc({8, 7}, 6, 100000);
    EXPECT_TRUE(e.consistent_with(moment_exact(8.0, 6), 4.0)) << e.estimate << " +- " << e.stderr_;
}

TEST(GinibreMc, Deterministic) {
    const auto a = moment_mc({4, 42}, 4, 2000);
    const auto b = moment_mc({4, 42}, 4, 2000);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.stderr_, b.stderr_);
    EXPECT_NE(a.estimate, moment_mc({4, 43}, 4, 2000).estimate);
}

TEST(GinibreMc, RejectsFewSamples) { EXPECT_THROW(moment_mc({4, 1}, 4, 999), DomainError); }

TEST(GinibreMc, CrossMomentsFollowPairings) {
    // no admissible pairing: Y1 Y2* Y1 Y2* and Y1 Y1
    for (const std::vector<WordLetter>& w :
         {std::vector<WordLetter>{{0, false}, {1, true}, {0, false}, {1, true}},
          std::vector<WordLetter>{{0, false}, {0, false}}}) {
        const auto e = mixed_moment_mc(4, w, 20000, 5);
        EXPECT_LE(std::abs(e.estimate), 4.0 * e.stderr_);
    }
    const auto e = mixed_moment_mc(4, {{0, false}, {0, true}, {1, false}, {1, true}}, 20000, 6);
    EXPECT_LE(std::abs(e.estimate - 1.0), 4.0 * e.stderr_);
}

TEST(RmKhintchine, ScalarAndLimit) {
    EXPECT_NEAR(rm_khintchine_constant(1.0, 4), std::pow(2.0, 0.25), 1e-14);
    EXPECT_NEAR(rm_khintchine_constant(1e6, 4), std::pow(2.0, 0.25), 1e-14);
    EXPECT_NEAR(rm_khintchine_constant(1e6, 8), std::pow(14.0, 0.125), 1e-9);
}

TEST(RmKhintchine, DecreasesInN) {
    for (int p = 6; p <= 12; p += 2)
        for (double N = 1.0; N < 64.0; N *= 2.0)
            EXPECT_GT(rm_khintchine_constant(N, p), rm_khintchine_constant(2.0 * N, p));
}

// every pairing weight is nonnegative and bounded by 1
TEST(RandmatInvariants, WeightsNonnegative) {
    for (int p = 2; p <= 10; p += 2)
        for (const auto& nu : partitions::enumerate_pair_partitions(p))
            for (double N : {1.0, 3.0, 17.0}) {
                const double w = ginibre_pairing_weight(nu, N, p);
                EXPECT_GE(w, 0.0);
                EXPECT_LE(w, 1.0);
            }
}

// nonzero weights equal 1 exactly on noncrossing pairings
TEST(RandmatInvariants, UnitWeightsAreNoncrossing) {
    for (int p = 2; p <= 10; p += 2)
        for (const auto& nu : partitions::enumerate_pair_partitions(p)) {
            const double w = ginibre_pairing_weight(nu, 2.0, p);
            if (partitions::crossing_number(nu) == 0) EXPECT_EQ(w, 1.0) << nu.to_string();
            else EXPECT_LT(w, 1.0) << nu.to_string();
        }
}
