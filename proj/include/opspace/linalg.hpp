#pragma once

// Dense complex linear algebra and Kronecker-structured operators.
//
// Vectors acted on by a multi-slot operator are indexed row-major over the
// slots: the index of (i_1, ..., i_r) is ((i_1 d_2 + i_2) d_3 + i_3) ...,
// which is the convention of kron(A, B) where block (i, j) equals A(i, j) * B.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace opspace {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace linalg {

/// Row-major Kronecker product; block (i, j) of the result is A(i, j) * B.
inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    const std::size_t rows = checked_product(A.rows(), B.rows());
    const std::size_t cols = checked_product(A.cols(), B.cols());
    check_dim(std::max(rows, cols), "kron");
    ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

/// Kronecker product of a list of matrices (the 1x1 identity for an empty list).
inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

/// Entrywise complex conjugate: realizes x -> x-bar in B(H-bar).
inline ComplexMatrix conj_matrix(const ComplexMatrix& A) { return A.conjugate(); }

/// Largest |lambda| of the Hermitian part, used only internally after symmetrizing.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& H) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Largest singular value of a dense matrix.
inline double spectral_norm(const ComplexMatrix& A) {
    if (A.size() == 0) return 0.0;
    const ComplexMatrix gram =
        A.rows() >= A.cols() ? ComplexMatrix(A.adjoint() * A) : ComplexMatrix(A * A.adjoint());
    const double top = hermitian_eigenvalues(gram).maxCoeff();
    return std::sqrt(std::max(top, 0.0));
}

/// Smallest eigenvalue of (M + M^dagger) / 2. Rejects M whose anti-Hermitian part
/// exceeds `hermiticity_tol * (1 + ||M||)`.
inline double min_eig_hermitian(const ComplexMatrix& M, double hermiticity_tol = 1e-9) {
    require(M.rows() == M.cols(), "min_eig_hermitian: matrix must be square");
    if (M.size() == 0) return 0.0;
    const double defect = spectral_norm(M - M.adjoint());
    const double scale = 1.0 + spectral_norm(M);
    if (defect > hermiticity_tol * scale)
        throw DomainError("min_eig_hermitian: Hermiticity defect " + std::to_string(defect) +
                          " exceeds " + std::to_string(hermiticity_tol * scale));
    const ComplexMatrix H = 0.5 * (M + M.adjoint());
    return hermitian_eigenvalues(H).minCoeff();
}

/// Power-iteration settings for the matrix-free spectral norm.
struct PowerOptions {
    double rel_tol = 1e-10;
    int max_iter = 10000;
};

/// Largest singular value of an implicit operator by power iteration on A^dagger A.
///
/// `apply(v)` must return A v and `apply_adjoint(w)` A^dagger w, both of length `dim`.
/// The start vector is all-ones with a fixed pseudo-random perturbation; a second run
/// from an independent fixed pseudo-random vector is made if the first stagnates.
template <class Apply, class ApplyAdjoint>
double power_spectral_norm(std::size_t dim, Apply&& apply, ApplyAdjoint&& apply_adjoint,
                           const PowerOptions& opts = {}) {
    if (dim == 0) return 0.0;
    const auto n = static_cast<Eigen::Index>(dim);

    auto run = [&](ComplexVector v, double& last, double& prev) -> bool {
        v.normalize();
        last = prev = 0.0;
        int satisfied = 0;
        for (int it = 0; it < opts.max_iter; ++it) {
            const ComplexVector w = apply(v);
            const double lambda = w.squaredNorm();
            prev = last;
            last = lambda;
            if (lambda == 0.0) return false;
            ComplexVector u = apply_adjoint(w);
            const double un = u.norm();
            if (un == 0.0) return false;
            v = u / un;
            if (it > 0 && std::abs(last - prev) <= opts.rel_tol * last) {
                if (++satisfied >= 2) return true;
            } else {
                satisfied = 0;
            }
        }
        return false;
    };

    std::mt19937_64 gen(0x5eed5eedULL);
    std::normal_distribution<double> nd;
    ComplexVector start = ComplexVector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] += 0.25 * cplx(nd(gen), nd(gen));

    double last = 0.0, prev = 0.0;
    if (run(start, last, prev)) return std::sqrt(last);
    const bool zero_image = last == 0.0;

    ComplexVector restart(n);
    for (Eigen::Index i = 0; i < n; ++i) restart[i] = cplx(nd(gen), nd(gen));
    double last2 = 0.0, prev2 = 0.0;
    if (run(restart, last2, prev2)) return std::sqrt(last2);
    if (zero_image && last2 == 0.0) return 0.0;  // the operator is zero
    throw ConvergenceError(std::sqrt(last2), std::sqrt(prev2), opts.max_iter);
}

/// A finite sum of elementary Kronecker tensors: sum_k coeff_k * (a_k1 x ... x a_kr).
///
/// Every term has the same arity and the same per-slot square dimensions. The
/// total dimension is checked against the dimension guard at construction.
class KronSumOperator {
public:
    struct Term {
        cplx coeff{1.0, 0.0};
        std::vector<ComplexMatrix> factors;
    };

    KronSumOperator() = default;

    explicit KronSumOperator(std::vector<std::size_t> factor_dims)
        : dims_(std::move(factor_dims)) {
        total_ = 1;
        for (auto d : dims_) {
            require(d > 0, "KronSumOperator: factor dimensions must be positive");
            total_ = checked_product(total_, d);
        }
        check_dim(total_, "KronSumOperator");
    }

    KronSumOperator(std::vector<std::size_t> factor_dims, std::vector<Term> terms)
        : KronSumOperator(std::move(factor_dims)) {
        for (auto& t : terms) add_term(std::move(t));
    }

    void add_term(Term t) {
        require(t.factors.size() == dims_.size(), "KronSumOperator: term arity mismatch");
        for (std::size_t s = 0; s < dims_.size(); ++s) {
            const auto d = static_cast<Eigen::Index>(dims_[s]);
            require(t.factors[s].rows() == d && t.factors[s].cols() == d,
                    "KronSumOperator: factor " + std::to_string(s) + " has wrong dimension");
        }
        terms_.push_back(std::move(t));
    }

    void add_term(cplx coeff, std::vector<ComplexMatrix> factors) {
        add_term(Term{coeff, std::move(factors)});
    }

    std::size_t arity() const noexcept { return dims_.size(); }
    const std::vector<std::size_t>& factor_dims() const noexcept { return dims_; }
    std::size_t total_dim() const noexcept { return total_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

    /// Dense materialization of the represented matrix.
    ComplexMatrix dense() const {
        const auto n = static_cast<Eigen::Index>(total_);
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (const auto& t : terms_) out += t.coeff * kron_all(t.factors);
        return out;
    }

    /// Matrix-free product with a vector.
    ComplexVector apply(const ComplexVector& v) const { return apply_impl(v, false); }
    ComplexVector apply_adjoint(const ComplexVector& v) const { return apply_impl(v, true); }

    /// Same operator with slots reordered: new slot s holds old slot perm[s].
    KronSumOperator permuted(std::span<const std::size_t> perm) const {
        require(perm.size() == dims_.size(), "KronSumOperator::permuted: wrong permutation size");
        std::vector<std::size_t> nd(dims_.size());
        for (std::size_t s = 0; s < perm.size(); ++s) nd[s] = dims_.at(perm[s]);
        KronSumOperator out(nd);
        for (const auto& t : terms_) {
            Term u{t.coeff, {}};
            for (auto p : perm) u.factors.push_back(t.factors[p]);
            out.add_term(std::move(u));
        }
        return out;
    }

private:
    ComplexVector apply_impl(const ComplexVector& v, bool adjoint) const {
        const auto n = static_cast<Eigen::Index>(total_);
        require(v.size() == n, "KronSumOperator::apply: vector length mismatch");
        ComplexVector out = ComplexVector::Zero(n);
        ComplexVector cur(n), nxt(n);
        using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        for (const auto& t : terms_) {
            cur = v;
            std::size_t left = 1;
            for (std::size_t s = 0; s < dims_.size(); ++s) {
                const auto d = static_cast<Eigen::Index>(dims_[s]);
                const auto right = static_cast<Eigen::Index>(total_ / (left * dims_[s]));
                const ComplexMatrix F = adjoint ? ComplexMatrix(t.factors[s].adjoint())
                                                : t.factors[s];
                for (std::size_t l = 0; l < left; ++l) {
                    const auto off = static_cast<Eigen::Index>(l) * d * right;
                    Eigen::Map<const RowMat> in(cur.data() + off, d, right);
                    Eigen::Map<RowMat> o(nxt.data() + off, d, right);
                    o.noalias() = F * in;
                }
                std::swap(cur, nxt);
                left *= dims_[s];
            }
            out += (adjoint ? std::conj(t.coeff) : t.coeff) * cur;
        }
        return out;
    }

    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
    std::vector<Term> terms_;
};

/// Total dimension at or below which spectral norms use a full decomposition.
inline constexpr std::size_t kDenseCrossover = 512;

/// Largest singular value of a Kronecker sum: dense up to the crossover, else matrix-free.
inline double spectral_norm(const KronSumOperator& op, const PowerOptions& opts = {}) {
    if (op.terms().empty()) return 0.0;
    if (op.total_dim() <= kDenseCrossover) return spectral_norm(op.dense());
    return power_spectral_norm(
        op.total_dim(), [&](const ComplexVector& v) { return op.apply(v); },
        [&](const ComplexVector& v) { return op.apply_adjoint(v); }, opts);
}

/// Reorders the slots of a dense multi-slot matrix: new slot s is old slot perm[s].
inline ComplexMatrix permute_slots(const ComplexMatrix& M, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> perm) {
    const std::size_t r = dims.size();
    require(perm.size() == r, "permute_slots: permutation size mismatch");
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    require(static_cast<std::size_t>(M.rows()) == total && M.rows() == M.cols(),
            "permute_slots: matrix does not match slot dimensions");

    std::vector<std::size_t> new_dims(r);
    for (std::size_t s = 0; s < r; ++s) new_dims[s] = dims[perm[s]];
    // Map each old flat index to its new flat index.
    std::vector<Eigen::Index> remap(total);
    std::vector<std::size_t> digits(r);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t s = r; s-- > 0;) {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        std::size_t out = 0;
        for (std::size_t s = 0; s < r; ++s) out = out * new_dims[s] + digits[perm[s]];
        remap[idx] = static_cast<Eigen::Index>(out);
    }
    ComplexMatrix P(M.rows(), M.cols());
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < total; ++j)
            P(remap[i], remap[j]) = M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return P;
}

}  // namespace linalg
}  // namespace opspace
