#pragma once

// The order x < y on tensors whose slots come in conjugate pairs (K_j, K_j-bar).
//
// x is in the cone C_+ (finite sums of a (x) a-bar) iff the sesquilinear form it
// defines is positive, i.e. iff its realigned coefficient matrix is PSD. The
// pairing of slots is explicit data and is carried by every derived value.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace opspace::ordercone {

/// Which slot holds K_j and which holds its conjugate, for j = 1..m.
struct Pairing {
    std::vector<std::size_t> plain;
    std::vector<std::size_t> conj;

    std::size_t m() const noexcept { return plain.size(); }
    std::size_t slots() const noexcept { return 2 * plain.size(); }

    /// (K_1, ..., K_m, K_1-bar, ..., K_m-bar).
    static Pairing standard(std::size_t m) {
        Pairing p;
        for (std::size_t j = 0; j < m; ++j) {
            p.plain.push_back(j);
            p.conj.push_back(m + j);
        }
        return p;
    }

    /// (K_1, K_1-bar, K_2, K_2-bar, ...).
    static Pairing interleaved(std::size_t m) {
        Pairing p;
        for (std::size_t j = 0; j < m; ++j) {
            p.plain.push_back(2 * j);
            p.conj.push_back(2 * j + 1);
        }
        return p;
    }

    /// From a permutation sigma (0-based) such that sigma^{-1} rearranges the slots as
    /// (K_1, ..., K_m, K_1-bar, ..., K_m-bar): K_j sits at slot sigma^{-1}(j).
    static Pairing from_permutation(const std::vector<std::size_t>& sigma) {
        require(sigma.size() % 2 == 0 && !sigma.empty(),
                "Pairing: permutation must act on an even number of slots");
        const std::size_t n = sigma.size();
        std::vector<std::size_t> inv(n, n);
        for (std::size_t s = 0; s < n; ++s) {
            require(sigma[s] < n && inv[sigma[s]] == n, "Pairing: not a permutation");
            inv[sigma[s]] = s;
        }
        Pairing p;
        const std::size_t m = n / 2;
        for (std::size_t j = 0; j < m; ++j) {
            p.plain.push_back(inv[j]);
            p.conj.push_back(inv[m + j]);
        }
        return p;
    }

    /// Slot-wise merge for a tensor product x (x) y, y's slots shifted by x's count.
    static Pairing merged(const Pairing& a, const Pairing& b) {
        Pairing p = a;
        const std::size_t shift = a.slots();
        for (std::size_t j = 0; j < b.m(); ++j) {
            p.plain.push_back(b.plain[j] + shift);
            p.conj.push_back(b.conj[j] + shift);
        }
        return p;
    }

    bool operator==(const Pairing&) const = default;

    void validate(std::size_t slot_count) const {
        require(plain.size() == conj.size(), "Pairing: plain/conj size mismatch");
        require(2 * plain.size() == slot_count, "Pairing: does not cover every slot");
        std::vector<bool> seen(slot_count, false);
        for (std::size_t j = 0; j < plain.size(); ++j) {
            for (auto s : {plain[j], conj[j]}) {
                require(s < slot_count && !seen[s], "Pairing: slots must be distinct");
                seen[s] = true;
            }
        }
    }
};

/// An element of B(H_1) (x) ... (x) B(H_2m) stored densely, with a declared pairing.
class PairedTensor {
public:
    PairedTensor(ComplexMatrix value, std::vector<std::size_t> slot_dims, Pairing pairing)
        : value_(std::move(value)), dims_(std::move(slot_dims)), pairing_(std::move(pairing)) {
        pairing_.validate(dims_.size());
        std::size_t total = 1;
        for (auto d : dims_) total = checked_product(total, d);
        check_dim(total, "PairedTensor");
        require(static_cast<std::size_t>(value_.rows()) == total && value_.rows() == value_.cols(),
                "PairedTensor: matrix size does not match slot dimensions");
        for (std::size_t j = 0; j < pairing_.m(); ++j)
            require(dims_[pairing_.plain[j]] == dims_[pairing_.conj[j]],
                    "PairedTensor: paired slots must have equal dimensions");
    }

    static PairedTensor from_kron_sum(const linalg::KronSumOperator& op, Pairing pairing) {
        return PairedTensor(op.dense(), op.factor_dims(), std::move(pairing));
    }

    /// a (x) a-bar in the standard pairing, a acting on a single slot.
    static PairedTensor gram(const ComplexMatrix& a) {
        const auto d = static_cast<std::size_t>(a.rows());
        return PairedTensor(linalg::kron(a, a.conjugate()), {d, d}, Pairing::standard(1));
    }

    static PairedTensor zero_like(const PairedTensor& x) {
        return PairedTensor(ComplexMatrix::Zero(x.value_.rows(), x.value_.cols()), x.dims_,
                            x.pairing_);
    }

    const ComplexMatrix& value() const noexcept { return value_; }
    const std::vector<std::size_t>& slot_dims() const noexcept { return dims_; }
    const Pairing& pairing() const noexcept { return pairing_; }

    bool compatible(const PairedTensor& o) const {
        return dims_ == o.dims_ && pairing_ == o.pairing_;
    }

    PairedTensor& operator+=(const PairedTensor& o) {
        require_compatible(o);
        value_ += o.value_;
        return *this;
    }
    PairedTensor& operator-=(const PairedTensor& o) {
        require_compatible(o);
        value_ -= o.value_;
        return *this;
    }
    friend PairedTensor operator+(PairedTensor a, const PairedTensor& b) { return a += b; }
    friend PairedTensor operator-(PairedTensor a, const PairedTensor& b) { return a -= b; }
    friend PairedTensor operator*(double s, PairedTensor a) {
        a.value_ *= s;
        return a;
    }
    friend PairedTensor operator-(PairedTensor a) {
        a.value_ = -a.value_;
        return a;
    }

private:
    void require_compatible(const PairedTensor& o) const {
        require(compatible(o), "PairedTensor: pairing or slot dimensions mismatch");
    }

    ComplexMatrix value_;
    std::vector<std::size_t> dims_;
    Pairing pairing_;
};

/// Matrix of the sesquilinear form defined by x. Rows are indexed by the (row, col)
/// digits of the plain slots, columns by those of the conjugate slots, both in the
/// pairing order. x is in C_+ iff this matrix is PSD.
inline ComplexMatrix realign(const PairedTensor& x) {
    const auto& dims = x.slot_dims();
    const auto& pr = x.pairing();
    const std::size_t r = dims.size();
    const std::size_t total = static_cast<std::size_t>(x.value().rows());

    std::size_t side = 1;
    for (std::size_t j = 0; j < pr.m(); ++j) side *= dims[pr.plain[j]] * dims[pr.plain[j]];

    // digit tables of every flat index
    std::vector<std::size_t> digits(total * r);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t s = r; s-- > 0;) {
            digits[idx * r + s] = rem % dims[s];
            rem /= dims[s];
        }
    }
    auto pair_index = [&](std::size_t ri, std::size_t ci, const std::vector<std::size_t>& slots) {
        std::size_t out = 0;
        for (auto s : slots) {
            const std::size_t d = dims[s];
            out = (out * d + digits[ri * r + s]) * d + digits[ci * r + s];
        }
        return static_cast<Eigen::Index>(out);
    };

    ComplexMatrix R = ComplexMatrix::Zero(static_cast<Eigen::Index>(side),
                                          static_cast<Eigen::Index>(side));
    for (std::size_t ri = 0; ri < total; ++ri)
        for (std::size_t ci = 0; ci < total; ++ci)
            R(pair_index(ri, ci, pr.plain), pair_index(ri, ci, pr.conj)) +=
                x.value()(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ci));
    return R;
}

/// Membership in C_+: min eigenvalue of the realigned matrix >= -tol (1 + ||realign||).
/// A Hermiticity defect above 1e-6 (relative) signals an inconsistent pairing.
inline bool is_positive(const PairedTensor& x, double tol = 1e-9) {
    require(tol >= 0.0, "is_positive: tolerance must be nonnegative");
    const ComplexMatrix R = realign(x);
    const double scale = 1.0 + linalg::spectral_norm(R);
    const double defect = linalg::spectral_norm(R - R.adjoint());
    if (defect > 1e-6 * scale)
        throw DomainError("is_positive: realigned matrix is not Hermitian (defect " +
                          std::to_string(defect) + "); the pairing is inconsistent");
    const double lo = linalg::min_eig_hermitian(R, 1e-6);
    return lo >= -tol * scale;
}

/// x < y, i.e. y - x in C_+. Both must share pairing and slot dimensions.
inline bool precedes(const PairedTensor& x, const PairedTensor& y, double tol = 1e-9) {
    require(x.compatible(y), "precedes: pairing or slot dimensions mismatch");
    return is_positive(y - x, tol);
}

/// x (x) y with the merged pairing.
inline PairedTensor tensor_positive_product(const PairedTensor& x, const PairedTensor& y) {
    std::vector<std::size_t> dims = x.slot_dims();
    dims.insert(dims.end(), y.slot_dims().begin(), y.slot_dims().end());
    return PairedTensor(linalg::kron(x.value(), y.value()), std::move(dims),
                        Pairing::merged(x.pairing(), y.pairing()));
}

/// m-fold tensor power.
inline PairedTensor tensor_power(const PairedTensor& x, int m) {
    require(m >= 1, "tensor_power: m must be >= 1");
    PairedTensor out = x;
    for (int k = 1; k < m; ++k) out = tensor_positive_product(out, x);
    return out;
}

/// Same tensor with slots reordered (new slot s = old slot perm[s]); the pairing follows.
inline PairedTensor permute(const PairedTensor& x, const std::vector<std::size_t>& perm) {
    const auto& dims = x.slot_dims();
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t s = 0; s < perm.size(); ++s) inv[perm[s]] = s;
    std::vector<std::size_t> nd(dims.size());
    for (std::size_t s = 0; s < perm.size(); ++s) nd[s] = dims[perm[s]];
    Pairing p;
    for (std::size_t j = 0; j < x.pairing().m(); ++j) {
        p.plain.push_back(inv[x.pairing().plain[j]]);
        p.conj.push_back(inv[x.pairing().conj[j]]);
    }
    return PairedTensor(linalg::permute_slots(x.value(), dims, perm), std::move(nd), std::move(p));
}

inline double spectral_norm(const PairedTensor& x) { return linalg::spectral_norm(x.value()); }

}  // namespace opspace::ordercone
