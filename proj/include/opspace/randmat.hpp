#pragma once

// Gaussian moments through pair partitions: the scalar Wick formula, exact trace moments
// of the normalized Ginibre matrix Y = N^{-1/2} (g_ij), a seeded Monte-Carlo estimator,
// and the resulting Khintchine constants.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "partitions.hpp"
#include "random.hpp"

namespace opspace::randmat {

inline constexpr int kMaxWickLength = 12;

/// E(X_{w_1} ... X_{w_n}) for centered jointly Gaussian variables with E(X_a X_b) = cov(a, b):
/// the sum over pair partitions of products of pairwise covariances.
inline cplx wick_scalar_moment(const ComplexMatrix& cov, const std::vector<int>& word) {
    require(cov.rows() == cov.cols(), "wick_scalar_moment: covariance must be square");
    require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()),
            "wick_scalar_moment: E(X_a X_b) must be symmetric in a, b");
    require(static_cast<int>(word.size()) <= kMaxWickLength,
            "wick_scalar_moment: word length must be <= " + std::to_string(kMaxWickLength));
    for (int w : word) require(w >= 0 && w < cov.rows(), "wick_scalar_moment: variable index out of range");
    if (word.empty()) return 1.0;
    if (word.size() % 2 == 1) return 0.0;
    cplx total = 0.0;
    partitions::for_each_pairing(static_cast<int>(word.size()), [&](const std::vector<int>& partner) {
        cplx prod = 1.0;
        for (std::size_t i = 0; i < partner.size() && prod != cplx(0.0); ++i) {
            const auto j = static_cast<std::size_t>(partner[i] - 1);
            if (j > i) prod *= cov(word[i], word[j]);
        }
        total += prod;
    });
    return total;
}

/// Monte-Carlo estimate of the same moment for a real positive semidefinite covariance,
/// sampling X = L xi with L L^T = cov.
inline std::pair<double, double> wick_scalar_mc(const Eigen::MatrixXd& cov, const std::vector<int>& word,
                                                std::size_t samples, std::uint64_t seed) {
    require(cov.rows() == cov.cols() && cov.rows() > 0, "wick_scalar_mc: covariance must be square");
    require(samples >= 1000, "wick_scalar_mc: need at least 1000 samples");
    for (int w : word) require(w >= 0 && w < cov.rows(), "wick_scalar_mc: variable index out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    require(es.eigenvalues().minCoeff() >= -1e-12, "wick_scalar_mc: covariance must be positive semidefinite");
    const Eigen::MatrixXd L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Rng rng(seed);
    Eigen::VectorXd xi(cov.rows());
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
        const Eigen::VectorXd x = L * xi;
        double v = 1.0;
        for (int w : word) v *= x(w);
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(samples), mean = sum / n;
    return {mean, std::sqrt(std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) / n)};
}

/// Disjoint-set forest over index positions.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }
    std::size_t classes() {
        std::size_t c = 0;
        for (std::size_t i = 0; i < parent_.size(); ++i)
            if (find(i) == i) ++c;
        return c;
    }

private:
    std::vector<std::size_t> parent_;
};

/// E tau_N of the pairing nu applied to Y Y* Y Y* ... (p factors; odd positions Y, even Y*).
/// Zero unless every block joins a Y with a Y*; otherwise N^{c - 1 - p/2} with c the
/// number of free index classes left by the Wick constraints.
inline double ginibre_pairing_weight(const partitions::PairPartition& nu, double N, int p) {
    require_even(p, "ginibre_pairing_weight");
    require(nu.n() == p, "ginibre_pairing_weight: pairing size must equal p");
    require(N >= 1.0, "ginibre_pairing_weight: N must be >= 1");
    // factor k (0-based) is Y(i_k, i_{k+1}) for even k, conj(Y(i_{k+1}, i_k)) for odd k
    UnionFind uf(static_cast<std::size_t>(p));
    const auto P = static_cast<std::size_t>(p);
    for (auto [a, b] : nu.pairs()) {
        const auto k = static_cast<std::size_t>(a - 1), l = static_cast<std::size_t>(b - 1);
        if (k % 2 == l % 2) return 0.0;
        const std::size_t y = k % 2 == 0 ? k : l, ys = k % 2 == 0 ? l : k;
        // g(i_y, i_{y+1}) pairs with conj g(i_{ys+1}, i_ys)
        uf.unite(y, (ys + 1) % P);
        uf.unite((y + 1) % P, ys);
    }
    const double c = static_cast<double>(uf.classes());
    return std::pow(N, c - 1.0 - p / 2.0);
}

/// E tau_N(|Y|^p) = sum over P_2(p) of the pairing weights.
inline double moment_exact(double N, int p) {
    require_even(p, "moment_exact");
    require(p <= kMaxWickLength, "moment_exact: p must be <= " + std::to_string(kMaxWickLength));
    double s = 0.0;
    for (const auto& nu : partitions::enumerate_pair_partitions(p)) s += ginibre_pairing_weight(nu, N, p);
    return s;
}

/// C = (E tau_N(|Y|^p))^{1/p}.
inline double rm_khintchine_constant(double N, int p) { return std::pow(moment_exact(N, p), 1.0 / p); }

struct GinibreSpec {
    int N = 1;
    std::uint64_t seed = 0;
};

/// Y = N^{-1/2} (g_ij) with g = (xi + i eta) / sqrt 2.
inline ComplexMatrix sample_ginibre(int N, Rng& rng) {
    return rng.gaussian_matrix(N) / std::sqrt(static_cast<double>(N));
}

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;

    /// |estimate - exact| <= k stderr
    bool consistent_with(double exact, double k = 4.0) const { return std::abs(estimate - exact) <= k * stderr_; }
};

/// Empirical mean of tau_N(|Y|^p) = tr((Y* Y)^{p/2}) / N.
inline McEstimate moment_mc(const GinibreSpec& g, int p, std::size_t samples) {
    require_even(p, "moment_mc");
    require(g.N >= 1, "moment_mc: N must be positive");
    require(samples >= 1000, "moment_mc: need at least 1000 samples");
    Rng rng(g.seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const ComplexMatrix Y = sample_ginibre(g.N, rng);
        const ComplexMatrix A = Y.adjoint() * Y;
        ComplexMatrix P = ComplexMatrix::Identity(g.N, g.N);
        for (int k = 0; k < p / 2; ++k) P = P * A;
        const double v = P.trace().real() / g.N;
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(samples);
    McEstimate e;
    e.samples = samples;
    e.estimate = sum / n;
    const double var = std::max(0.0, (sumsq - n * e.estimate * e.estimate) / (n - 1.0));
    e.stderr_ = std::sqrt(var / n);
    return e;
}

/// One factor of a mixed word: Y_index or its adjoint.
struct WordLetter {
    int index = 0;
    bool adjoint = false;
};

struct ComplexMcEstimate {
    cplx estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

/// Empirical E tau_N(Y_{j1}^{e1} ... Y_{jk}^{ek}) for independent normalized Ginibre Y_j.
inline ComplexMcEstimate mixed_moment_mc(int N, const std::vector<WordLetter>& word, std::size_t samples,
                                         std::uint64_t seed) {
    require(N >= 1 && !word.empty(), "mixed_moment_mc: need N >= 1 and a nonempty word");
    require(samples >= 1000, "mixed_moment_mc: need at least 1000 samples");
    int count = 0;
    for (const auto& l : word) {
        require(l.index >= 0, "mixed_moment_mc: negative variable index");
        count = std::max(count, l.index + 1);
    }
    Rng rng(seed);
    cplx sum = 0.0;
    double sumsq = 0.0;
    std::vector<ComplexMatrix> Ys(static_cast<std::size_t>(count));
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& Y : Ys) Y = sample_ginibre(N, rng);
        ComplexMatrix P = ComplexMatrix::Identity(N, N);
        for (const auto& l : word) {
            const ComplexMatrix& Y = Ys[static_cast<std::size_t>(l.index)];
            P = l.adjoint ? ComplexMatrix(P * Y.adjoint()) : ComplexMatrix(P * Y);
        }
        const cplx v = P.trace() / static_cast<double>(N);
        sum += v;
        sumsq += std::norm(v);
    }
    const double n = static_cast<double>(samples);
    ComplexMcEstimate e;
    e.samples = samples;
    e.estimate = sum / n;
    const double var = std::max(0.0, (sumsq - n * std::norm(e.estimate)) / (n - 1.0));
    e.stderr_ = std::sqrt(var / n);
    return e;
}

}  // namespace opspace::randmat
