#pragma once

// The space Lambda_p over a finite measure space: B(H)-valued fields, the pointwise
// tensor, integration, the Lambda_p norm and conditional expectations.
//
//   ||f||_(p) = || int f^{(x)m} (x) conj(f)^{(x)m} dmu ||^{1/2m},  p = 2m.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "random.hpp"
#include "report.hpp"

namespace opspace::comm {

/// Finitely many atoms with strictly positive weights.
class FiniteMeasureSpace {
public:
    explicit FiniteMeasureSpace(std::vector<double> weights, std::vector<std::string> labels = {})
        : weights_(std::move(weights)), labels_(std::move(labels)) {
        require(!weights_.empty(), "FiniteMeasureSpace: needs at least one atom");
        for (double w : weights_)
            require(w > 0.0 && std::isfinite(w), "FiniteMeasureSpace: weights must be positive");
        if (labels_.empty())
            for (std::size_t i = 0; i < weights_.size(); ++i) labels_.push_back(std::to_string(i));
        require(labels_.size() == weights_.size(), "FiniteMeasureSpace: label count mismatch");
    }

    /// n atoms of mass 1/n.
    static FiniteMeasureSpace uniform(std::size_t n) {
        require(n > 0, "FiniteMeasureSpace::uniform: n must be positive");
        return FiniteMeasureSpace(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    std::size_t size() const noexcept { return weights_.size(); }
    double weight(std::size_t i) const { return weights_.at(i); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    double total_mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
    bool is_probability() const { return std::abs(total_mass() - 1.0) <= 1e-12; }

    bool operator==(const FiniteMeasureSpace& o) const { return weights_ == o.weights_; }

    /// Same atoms listed in reverse order.
    FiniteMeasureSpace reversed() const {
        return FiniteMeasureSpace({weights_.rbegin(), weights_.rend()},
                                  {labels_.rbegin(), labels_.rend()});
    }

private:
    std::vector<double> weights_;
    std::vector<std::string> labels_;
};

/// f : atoms -> B(H), dim H = opdim.
class MatrixField {
public:
    MatrixField(FiniteMeasureSpace space, std::vector<ComplexMatrix> values)
        : space_(std::move(space)), values_(std::move(values)) {
        require(values_.size() == space_.size(), "MatrixField: one value per atom required");
        opdim_ = static_cast<std::size_t>(values_.front().rows());
        require(opdim_ > 0, "MatrixField: opdim must be positive");
        for (const auto& v : values_)
            require(static_cast<std::size_t>(v.rows()) == opdim_ && v.rows() == v.cols(),
                    "MatrixField: every value must be a square matrix of size opdim");
    }

    static MatrixField constant(const FiniteMeasureSpace& space, const ComplexMatrix& b) {
        return MatrixField(space, std::vector<ComplexMatrix>(space.size(), b));
    }
    static MatrixField zero(const FiniteMeasureSpace& space, std::size_t opdim) {
        const auto d = static_cast<Eigen::Index>(opdim);
        return constant(space, ComplexMatrix::Zero(d, d));
    }
    /// opdim 1 field with the given values.
    static MatrixField scalar(const FiniteMeasureSpace& space, const std::vector<cplx>& vals) {
        std::vector<ComplexMatrix> v;
        for (auto z : vals) v.push_back(ComplexMatrix::Constant(1, 1, z));
        return MatrixField(space, std::move(v));
    }
    /// i.i.d. complex Gaussian entries.
    static MatrixField random(const FiniteMeasureSpace& space, std::size_t opdim, Rng& rng) {
        std::vector<ComplexMatrix> v;
        for (std::size_t i = 0; i < space.size(); ++i)
            v.push_back(rng.gaussian_matrix(static_cast<Eigen::Index>(opdim)));
        return MatrixField(space, std::move(v));
    }

    const FiniteMeasureSpace& space() const noexcept { return space_; }
    std::size_t opdim() const noexcept { return opdim_; }
    std::size_t size() const noexcept { return values_.size(); }
    const ComplexMatrix& operator[](std::size_t i) const { return values_[i]; }
    const ComplexMatrix& at(std::size_t i) const { return values_.at(i); }
    const std::vector<ComplexMatrix>& values() const noexcept { return values_; }

    MatrixField& operator+=(const MatrixField& o) {
        require_same(o);
        for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    MatrixField& operator-=(const MatrixField& o) {
        require_same(o);
        for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
    friend MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
    friend MatrixField operator*(cplx s, MatrixField a) {
        for (auto& v : a.values_) v *= s;
        return a;
    }

    /// Largest ||f(w)|| over the atoms.
    double sup_norm() const {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, linalg::spectral_norm(v));
        return m;
    }

    /// Same field on the reversed atom list.
    MatrixField reversed() const {
        return MatrixField(space_.reversed(), {values_.rbegin(), values_.rend()});
    }

private:
    void require_same(const MatrixField& o) const {
        require(space_ == o.space_ && opdim_ == o.opdim_,
                "MatrixField: space or opdim mismatch");
    }

    FiniteMeasureSpace space_;
    std::vector<ComplexMatrix> values_;
    std::size_t opdim_ = 0;
};

/// Pointwise complex conjugate, the field f-bar with values in B(H-bar).
inline MatrixField conj(const MatrixField& f) {
    std::vector<ComplexMatrix> v;
    for (const auto& x : f.values()) v.push_back(x.conjugate());
    return MatrixField(f.space(), std::move(v));
}

/// (f .x g)(w) = f(w) (x) g(w).
inline MatrixField pointwise_tensor(const MatrixField& f, const MatrixField& g) {
    require(f.space() == g.space(), "pointwise_tensor: fields live on different spaces");
    check_dim(checked_product(f.opdim(), g.opdim()), "pointwise_tensor");
    std::vector<ComplexMatrix> v;
    for (std::size_t i = 0; i < f.size(); ++i) v.push_back(linalg::kron(f[i], g[i]));
    return MatrixField(f.space(), std::move(v));
}

inline MatrixField tensor_power(const MatrixField& f, int m) {
    require(m >= 1, "tensor_power: m must be >= 1");
    MatrixField out = f;
    for (int k = 1; k < m; ++k) out = pointwise_tensor(out, f);
    return out;
}

/// f .x f-bar.
inline MatrixField gram(const MatrixField& f) { return pointwise_tensor(f, conj(f)); }

/// sum_w mu(w) f(w).
inline ComplexMatrix integrate(const MatrixField& f) {
    const auto d = static_cast<Eigen::Index>(f.opdim());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < f.size(); ++i) out += f.space().weight(i) * f[i];
    return out;
}

/// int f_1 .x ... .x f_r as a Kronecker sum with one term per atom (never densified here).
inline linalg::KronSumOperator integral_operator(const std::vector<MatrixField>& slots) {
    require(!slots.empty(), "integral_operator: needs at least one slot");
    std::vector<std::size_t> dims;
    for (const auto& f : slots) {
        require(f.space() == slots.front().space(), "integral_operator: space mismatch");
        dims.push_back(f.opdim());
    }
    linalg::KronSumOperator op(dims);
    const auto& space = slots.front().space();
    for (std::size_t w = 0; w < space.size(); ++w) {
        std::vector<ComplexMatrix> factors;
        factors.reserve(slots.size());
        for (const auto& f : slots) factors.push_back(f[w]);
        op.add_term(space.weight(w), std::move(factors));
    }
    return op;
}

/// || int f_1 .x ... .x f_r dmu ||.
inline double integral_tensor_norm(const std::vector<MatrixField>& slots) {
    return linalg::spectral_norm(integral_operator(slots));
}

/// ||f||_(p) for even p.
inline double lambda_norm(const MatrixField& f, int p) {
    require_even(p, "lambda_norm");
    const int m = p / 2;
    const MatrixField fb = conj(f);
    std::vector<MatrixField> slots;
    for (int k = 0; k < m; ++k) slots.push_back(f);
    for (int k = 0; k < m; ++k) slots.push_back(fb);
    return std::pow(integral_tensor_norm(slots), 1.0 / p);
}

/// || int S^{.x m} dmu ||, the m-th power of the Lambda_m norm of a cone-positive S
/// (S = sum d .x d-bar), valid for every integer m >= 1.
inline double positive_power_norm(const MatrixField& S, int m) {
    require(m >= 1, "positive_power_norm: m must be >= 1");
    return integral_tensor_norm(std::vector<MatrixField>(static_cast<std::size_t>(m), S));
}

/// Blocks of atoms; each atom in exactly one block.
using AtomPartition = std::vector<std::vector<std::size_t>>;

inline void validate_partition(const AtomPartition& blocks, std::size_t atoms) {
    std::vector<int> seen(atoms, 0);
    for (const auto& b : blocks) {
        require(!b.empty(), "partition: empty block");
        for (auto a : b) {
            require(a < atoms, "partition: atom index out of range");
            require(seen[a]++ == 0, "partition: atom listed twice");
        }
    }
    for (auto s : seen) require(s == 1, "partition: atoms not covered");
}

/// E^B f: on each block, the mu-weighted average of f over the block.
inline MatrixField conditional_expectation(const MatrixField& f, const AtomPartition& blocks) {
    validate_partition(blocks, f.size());
    std::vector<ComplexMatrix> v(f.size());
    for (const auto& b : blocks) {
        const auto d = static_cast<Eigen::Index>(f.opdim());
        ComplexMatrix avg = ComplexMatrix::Zero(d, d);
        double mass = 0.0;
        for (auto a : b) {
            avg += f.space().weight(a) * f[a];
            mass += f.space().weight(a);
        }
        avg /= mass;
        for (auto a : b) v[a] = avg;
    }
    return MatrixField(f.space(), std::move(v));
}

/// || int f_1 .x ... .x f_p || <= prod ||f_k||_(p).
inline RatioReport holder_check(const std::vector<MatrixField>& fs, int p) {
    require_even(p, "holder_check");
    require(fs.size() == static_cast<std::size_t>(p), "holder_check: need exactly p fields");
    const double lhs = integral_tensor_norm(fs);
    double rhs = 1.0;
    for (const auto& f : fs) rhs *= lambda_norm(f, p);
    return RatioReport::make(lhs, rhs, "Holder inequality for the pointwise tensor in Lambda_p");
}

/// || int f .x g || <= || int f .x f-bar ||^{1/2} || int g .x g-bar ||^{1/2}.
inline RatioReport cauchy_schwarz_check(const MatrixField& f, const MatrixField& g) {
    const double lhs = integral_tensor_norm({f, g});
    const double rhs = std::sqrt(integral_tensor_norm({f, conj(f)})) *
                       std::sqrt(integral_tensor_norm({g, conj(g)}));
    return RatioReport::make(lhs, rhs, "Haagerup Cauchy-Schwarz for int f .x g");
}

/// || E((sum a_k .x b_k)^{.x m}) || <= || E((sum a_k .x a_k-bar)^{.x m}) ||^{1/2}
///                                      || E((sum b_k .x b_k-bar)^{.x m}) ||^{1/2}.
inline RatioReport generalized_cauchy_schwarz_check(const std::vector<MatrixField>& as,
                                                    const std::vector<MatrixField>& bs, int m) {
    require(!as.empty() && as.size() == bs.size(),
            "generalized_cauchy_schwarz_check: need equally many a_k and b_k");
    MatrixField ab = pointwise_tensor(as[0], bs[0]);
    MatrixField aa = gram(as[0]);
    MatrixField bb = gram(bs[0]);
    for (std::size_t k = 1; k < as.size(); ++k) {
        ab += pointwise_tensor(as[k], bs[k]);
        aa += gram(as[k]);
        bb += gram(bs[k]);
    }
    const double lhs = positive_power_norm(ab, m);
    const double rhs = std::sqrt(positive_power_norm(aa, m)) * std::sqrt(positive_power_norm(bb, m));
    return RatioReport::make(lhs, rhs, "generalized Cauchy-Schwarz for sums of pointwise tensors");
}

struct LinfReport {
    std::vector<int> ps;
    std::vector<double> norms;
    /// max_w mu(w)^{1/p} ||f(w)||, a lower bound for ||f||_(p).
    std::vector<double> atom_lower_bounds;
    double sup_norm = 0.0;
    double final_gap = 0.0;
    bool monotone = true;
    bool bounded = true;
};

/// ||f||_(p) along p_list against max_w ||f(w)|| on a probability space.
inline LinfReport linf_limit_check(const MatrixField& f, const std::vector<int>& p_list,
                                   double slack = 1e-9) {
    require(f.space().is_probability(), "linf_limit_check: needs a probability space");
    require(!p_list.empty(), "linf_limit_check: empty p list");
    LinfReport r;
    r.sup_norm = f.sup_norm();
    for (int p : p_list) {
        require_even(p, "linf_limit_check");
        require(r.ps.empty() || p > r.ps.back(), "linf_limit_check: p list must increase");
        const double v = lambda_norm(f, p);
        double lower = 0.0;
        for (std::size_t w = 0; w < f.size(); ++w)
            lower = std::max(lower, std::pow(f.space().weight(w), 1.0 / p) *
                                        linalg::spectral_norm(f[w]));
        if (!r.norms.empty() && v < r.norms.back() - slack) r.monotone = false;
        if (v > r.sup_norm + slack) r.bounded = false;
        r.ps.push_back(p);
        r.norms.push_back(v);
        r.atom_lower_bounds.push_back(lower);
    }
    r.final_gap = r.sup_norm - r.norms.back();
    return r;
}

}  // namespace opspace::comm
