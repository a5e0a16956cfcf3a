#pragma once

// Seeded random generation. Every random object in the library is produced from an
// explicit seed; per-instance seeds come from a root seed by fixed splitting so that
// batches are reproducible regardless of evaluation order.

#include <cstdint>
#include <random>

#include "linalg.hpp"

namespace opspace {

/// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of instance `index` derived from `root`.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    /// Complex Gaussian with independent N(0, 1/2) real and imaginary parts (E|g|^2 = 1).
    cplx complex_normal() {
        constexpr double s = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
        ComplexMatrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
        return m;
    }

    ComplexMatrix gaussian_matrix(Eigen::Index dim) { return gaussian_matrix(dim, dim); }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_;
};

}  // namespace opspace
