#pragma once

// Lambda_p over (M_n, tau) with tau = weight * tr. Elements of B(H) (x) M_n are kept in
// matrix-unit form f = sum_{ij} B_ij (x) e_ij; trace words
// tau-hat(f_1 .x ... .x f_r) = weight * sum B^1_{i1 i2} (x) B^2_{i2 i3} (x) ... (x) B^r_{ir i1}
// are applied as implicit operators, contracting one slot at a time.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lambda.hpp"
#include "linalg.hpp"
#include "report.hpp"

namespace opspace::nc {

class NcElement {
public:
    /// Zero element; weight 0 selects the normalized trace 1/n.
    NcElement(std::size_t opdim, std::size_t n, double trace_weight = 0.0)
        : opdim_(opdim), n_(n), weight_(trace_weight > 0.0 ? trace_weight : 1.0 / static_cast<double>(n)) {
        require(opdim > 0 && n > 0, "NcElement: opdim and n must be positive");
        const auto d = static_cast<Eigen::Index>(opdim);
        blocks_.assign(n * n, ComplexMatrix::Zero(d, d));
    }

    /// sum_k b_k (x) x_k.
    static NcElement from_terms(const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& terms,
                                double trace_weight = 0.0) {
        require(!terms.empty(), "NcElement: need at least one term");
        const auto opdim = static_cast<std::size_t>(terms.front().first.rows());
        const auto n = static_cast<std::size_t>(terms.front().second.rows());
        NcElement f(opdim, n, trace_weight);
        for (const auto& [b, x] : terms) f.add_term(b, x);
        return f;
    }

    /// b (x) 1.
    static NcElement identity_like(const ComplexMatrix& b, std::size_t n, double trace_weight = 0.0) {
        return from_terms({{b, ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))}},
                          trace_weight);
    }

    /// i.i.d. complex Gaussian blocks.
    static NcElement random(std::size_t opdim, std::size_t n, Rng& rng, double trace_weight = 0.0) {
        NcElement f(opdim, n, trace_weight);
        for (auto& b : f.blocks_) b = rng.gaussian_matrix(static_cast<Eigen::Index>(opdim));
        return f;
    }

    void add_term(const ComplexMatrix& b, const ComplexMatrix& x) {
        require(static_cast<std::size_t>(b.rows()) == opdim_ && b.rows() == b.cols(),
                "NcElement: B part has wrong size");
        require(static_cast<std::size_t>(x.rows()) == n_ && x.rows() == x.cols(),
                "NcElement: M_n part has wrong size");
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const cplx c = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (c != cplx(0.0)) block(i, j) += c * b;
            }
    }

    std::size_t opdim() const noexcept { return opdim_; }
    std::size_t n() const noexcept { return n_; }
    double trace_weight() const noexcept { return weight_; }

    /// Coefficient of e_ij.
    const ComplexMatrix& block(std::size_t i, std::size_t j) const { return blocks_[i * n_ + j]; }
    ComplexMatrix& block(std::size_t i, std::size_t j) { return blocks_[i * n_ + j]; }

    /// sum_{ij} B_ij (x) e_ij as an (opdim n) x (opdim n) matrix.
    ComplexMatrix dense() const {
        const auto d = static_cast<Eigen::Index>(opdim_), n = static_cast<Eigen::Index>(n_);
        ComplexMatrix D = ComplexMatrix::Zero(d * n, d * n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const ComplexMatrix& B = block(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                for (Eigen::Index a = 0; a < d; ++a)
                    for (Eigen::Index c = 0; c < d; ++c) D(a * n + i, c * n + j) = B(a, c);
            }
        return D;
    }

    bool compatible(const NcElement& o) const { return n_ == o.n_ && weight_ == o.weight_; }

    NcElement& operator+=(const NcElement& o) {
        require(compatible(o) && opdim_ == o.opdim_, "NcElement: shape or trace mismatch");
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
        return *this;
    }
    NcElement& operator-=(const NcElement& o) {
        require(compatible(o) && opdim_ == o.opdim_, "NcElement: shape or trace mismatch");
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
        return *this;
    }
    friend NcElement operator+(NcElement a, const NcElement& b) { return a += b; }
    friend NcElement operator-(NcElement a, const NcElement& b) { return a -= b; }
    friend NcElement operator*(cplx s, NcElement a) {
        for (auto& b : a.blocks_) b *= s;
        return a;
    }

private:
    std::size_t opdim_;
    std::size_t n_;
    double weight_;
    std::vector<ComplexMatrix> blocks_;
};

/// f* = sum b-bar (x) x*.
inline NcElement nc_star(const NcElement& f) {
    NcElement out(f.opdim(), f.n(), f.trace_weight());
    for (std::size_t i = 0; i < f.n(); ++i)
        for (std::size_t j = 0; j < f.n(); ++j) out.block(i, j) = f.block(j, i).conjugate();
    return out;
}

/// f .x g = sum b (x) c (x) xy.
inline NcElement nc_product(const NcElement& f, const NcElement& g) {
    require(f.compatible(g), "nc_product: different n or trace");
    const std::size_t d = checked_product(f.opdim(), g.opdim());
    check_dim(d, "nc_product");
    NcElement out(d, f.n(), f.trace_weight());
    for (std::size_t i = 0; i < f.n(); ++i)
        for (std::size_t k = 0; k < f.n(); ++k)
            for (std::size_t j = 0; j < f.n(); ++j) {
                if (f.block(i, j).isZero(0.0) || g.block(j, k).isZero(0.0)) continue;
                out.block(i, k) += linalg::kron(f.block(i, j), g.block(j, k));
            }
    return out;
}

/// tau-hat(f) = sum b tau(x).
inline ComplexMatrix hat_tau(const NcElement& f) {
    const auto d = static_cast<Eigen::Index>(f.opdim());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < f.n(); ++i) out += f.block(i, i);
    return f.trace_weight() * out;
}

/// tau-hat(f_1 .x ... .x f_r) on H_1 (x) ... (x) H_r, never densified above the crossover.
class TraceWordOperator {
public:
    explicit TraceWordOperator(std::vector<NcElement> slots) : slots_(std::move(slots)) {
        require(!slots_.empty(), "TraceWordOperator: needs at least one slot");
        total_ = 1;
        for (const auto& f : slots_) {
            require(f.compatible(slots_.front()), "TraceWordOperator: slots disagree on n or trace");
            dims_.push_back(f.opdim());
            total_ = checked_product(total_, f.opdim());
        }
        check_dim(total_, "trace word");
    }

    std::size_t total_dim() const noexcept { return total_; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    ComplexVector apply(const ComplexVector& v) const { return run(v, false); }
    ComplexVector apply_adjoint(const ComplexVector& v) const { return run(v, true); }

    ComplexMatrix dense() const {
        const auto N = static_cast<Eigen::Index>(total_);
        ComplexMatrix D(N, N);
        ComplexVector e = ComplexVector::Zero(N);
        for (Eigen::Index c = 0; c < N; ++c) {
            e[c] = 1.0;
            D.col(c) = apply(e);
            e[c] = 0.0;
        }
        return D;
    }

    double norm(const linalg::PowerOptions& opts = {}) const {
        if (total_ <= linalg::kDenseCrossover) return linalg::spectral_norm(dense());
        return linalg::power_spectral_norm(
            total_, [&](const ComplexVector& v) { return apply(v); },
            [&](const ComplexVector& v) { return apply_adjoint(v); }, opts);
    }

private:
    // M acting on slot k of a vector laid out with slot 0 most significant
    ComplexVector on_slot(const ComplexMatrix& M, const ComplexVector& v, std::size_t k) const {
        std::size_t post = 1;
        for (std::size_t s = k + 1; s < dims_.size(); ++s) post *= dims_[s];
        const auto dk = static_cast<Eigen::Index>(dims_[k]);
        const std::size_t pre = total_ / (dims_[k] * post);
        using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        ComplexVector out(v.size());
        const auto chunk = static_cast<std::size_t>(dk) * post;
        for (std::size_t a = 0; a < pre; ++a) {
            Eigen::Map<const RowMat> X(v.data() + a * chunk, dk, static_cast<Eigen::Index>(post));
            Eigen::Map<RowMat> Y(out.data() + a * chunk, dk, static_cast<Eigen::Index>(post));
            Y.noalias() = M * X;
        }
        return out;
    }

    ComplexVector run(const ComplexVector& v, bool adjoint) const {
        const std::size_t n = slots_.front().n();
        const double w = slots_.front().trace_weight();
        ComplexVector result = ComplexVector::Zero(v.size());
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            std::vector<std::optional<ComplexVector>> state(n);
            state[i1] = v;
            for (std::size_t k = 0; k < slots_.size(); ++k) {
                std::vector<std::optional<ComplexVector>> next(n);
                for (std::size_t i = 0; i < n; ++i) {
                    if (!state[i]) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        const ComplexMatrix& B = slots_[k].block(i, j);
                        if (B.isZero(0.0)) continue;
                        ComplexVector y = adjoint ? on_slot(B.adjoint(), *state[i], k) : on_slot(B, *state[i], k);
                        if (next[j])
                            *next[j] += y;
                        else
                            next[j] = std::move(y);
                    }
                }
                state = std::move(next);
            }
            if (state[i1]) result += *state[i1];
        }
        return w * result;
    }

    std::vector<NcElement> slots_;
    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
};

/// || tau-hat(f_1 .x ... .x f_r) ||.
inline double trace_word_norm(const std::vector<NcElement>& slots) { return TraceWordOperator(slots).norm(); }

/// ||f||_(p) = || tau-hat(f* .x f .x ... .x f* .x f) ||^{1/p}.
inline double nc_lambda_norm(const NcElement& f, int p) {
    require_even(p, "nc_lambda_norm");
    const NcElement fs = nc_star(f);
    std::vector<NcElement> slots;
    for (int k = 0; k < p / 2; ++k) {
        slots.push_back(fs);
        slots.push_back(f);
    }
    return std::pow(trace_word_norm(slots), 1.0 / p);
}

/// || tau-hat(f_1 .x ... .x f_p) || <= prod ||f_j||_(p).
inline RatioReport nc_holder_check(const std::vector<NcElement>& fs) {
    const int p = static_cast<int>(fs.size());
    require_even(p, "nc_holder_check");
    double rhs = 1.0;
    for (const auto& f : fs) rhs *= nc_lambda_norm(f, p);
    return RatioReport::make(trace_word_norm(fs), rhs, "Holder inequality for trace words in Lambda_p(M_n)");
}

/// || sum_k tau-hat(f_k* .x g_k) || <= || sum tau-hat(f_k* .x f_k) ||^{1/2} || sum tau-hat(g_k* .x g_k) ||^{1/2}.
inline RatioReport state_cauchy_schwarz_check(const std::vector<NcElement>& fs, const std::vector<NcElement>& gs) {
    require(!fs.empty() && fs.size() == gs.size(), "state_cauchy_schwarz_check: need equally many f_k and g_k");
    auto word = [](const NcElement& a, const NcElement& b) { return hat_tau(nc_product(nc_star(a), b)); };
    ComplexMatrix fg = word(fs[0], gs[0]), ff = word(fs[0], fs[0]), gg = word(gs[0], gs[0]);
    for (std::size_t k = 1; k < fs.size(); ++k) {
        fg += word(fs[k], gs[k]);
        ff += word(fs[k], fs[k]);
        gg += word(gs[k], gs[k]);
    }
    return RatioReport::make(linalg::spectral_norm(fg),
                             std::sqrt(linalg::spectral_norm(ff)) * std::sqrt(linalg::spectral_norm(gg)),
                             "Haagerup Cauchy-Schwarz for tau-hat");
}

enum class BlockKind { full, scalar };

/// Block-diagonal *-subalgebra of M_n: consecutive intervals, each carrying either all of
/// M_|block| or only its scalars.
class BlockSubalgebra {
public:
    struct Block {
        std::size_t start;
        std::size_t size;
        BlockKind kind;
    };

    BlockSubalgebra(std::size_t n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
        std::size_t pos = 0;
        for (const auto& b : blocks_) {
            require(b.size > 0 && b.start == pos, "BlockSubalgebra: blocks must be consecutive intervals");
            pos += b.size;
        }
        require(pos == n_, "BlockSubalgebra: blocks must cover [1..n]");
    }

    /// Interval sizes, all of one kind.
    static BlockSubalgebra from_sizes(const std::vector<std::size_t>& sizes, BlockKind kind) {
        std::vector<Block> b;
        std::size_t pos = 0;
        for (auto s : sizes) {
            b.push_back({pos, s, kind});
            pos += s;
        }
        return BlockSubalgebra(pos, std::move(b));
    }
    static BlockSubalgebra full(std::size_t n) { return from_sizes({n}, BlockKind::full); }
    static BlockSubalgebra scalars(std::size_t n) { return from_sizes({n}, BlockKind::scalar); }
    static BlockSubalgebra diagonal(std::size_t n) {
        return from_sizes(std::vector<std::size_t>(n, 1), BlockKind::full);
    }

    std::size_t n() const noexcept { return n_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }

    /// this is a subalgebra of `larger`.
    bool contained_in(const BlockSubalgebra& larger) const {
        if (larger.n_ != n_) return false;
        for (const auto& b : blocks_) {
            const std::size_t b_end = b.start + b.size;
            if (b.kind == BlockKind::full && b.size > 1) {
                // M_b must sit inside one full block
                bool found = false;
                for (const auto& c : larger.blocks_)
                    if (c.kind == BlockKind::full && c.start <= b.start && b_end <= c.start + c.size) found = true;
                if (!found) return false;
            } else {
                // the unit 1_b must lie in `larger`: no scalar block may straddle b
                for (const auto& c : larger.blocks_) {
                    const std::size_t c_end = c.start + c.size;
                    const bool overlaps = c.start < b_end && b.start < c_end;
                    if (overlaps && c.kind == BlockKind::scalar && !(b.start <= c.start && c_end <= b_end))
                        return false;
                }
            }
        }
        return true;
    }

private:
    std::size_t n_;
    std::vector<Block> blocks_;
};

/// Trace-preserving conditional expectation onto the block subalgebra, applied to the M_n slot:
/// off-block entries vanish, full blocks are kept, scalar blocks become their normalized trace.
inline NcElement nc_conditional_expectation(const NcElement& f, const BlockSubalgebra& alg) {
    require(alg.n() == f.n(), "nc_conditional_expectation: algebra acts on a different M_n");
    NcElement out(f.opdim(), f.n(), f.trace_weight());
    for (const auto& b : alg.blocks()) {
        if (b.kind == BlockKind::full) {
            for (std::size_t i = b.start; i < b.start + b.size; ++i)
                for (std::size_t j = b.start; j < b.start + b.size; ++j) out.block(i, j) = f.block(i, j);
        } else {
            const auto d = static_cast<Eigen::Index>(f.opdim());
            ComplexMatrix avg = ComplexMatrix::Zero(d, d);
            for (std::size_t i = b.start; i < b.start + b.size; ++i) avg += f.block(i, i);
            avg /= static_cast<double>(b.size);
            for (std::size_t i = b.start; i < b.start + b.size; ++i) out.block(i, i) = avg;
        }
    }
    return out;
}

/// d_0 = E_0 f, d_k = E_k f - E_{k-1} f along an increasing chain; f must lie in the last algebra.
inline std::vector<NcElement> nc_martingale_differences(const NcElement& f, const std::vector<BlockSubalgebra>& chain) {
    require(!chain.empty(), "nc_martingale_differences: empty chain");
    for (std::size_t k = 1; k < chain.size(); ++k)
        require(chain[k - 1].contained_in(chain[k]), "nc_martingale_differences: chain is not increasing at level " +
                                                         std::to_string(k));
    const NcElement last = nc_conditional_expectation(f, chain.back());
    double off = 0.0;
    for (std::size_t i = 0; i < f.n(); ++i)
        for (std::size_t j = 0; j < f.n(); ++j)
            off = std::max(off, (last.block(i, j) - f.block(i, j)).cwiseAbs().maxCoeff());
    require(off <= 1e-12, "nc_martingale_differences: f does not belong to the last algebra of the chain");
    std::vector<NcElement> ds;
    NcElement prev = nc_conditional_expectation(f, chain.front());
    ds.push_back(prev);
    for (std::size_t k = 1; k < chain.size(); ++k) {
        NcElement cur = nc_conditional_expectation(f, chain[k]);
        ds.push_back(cur - prev);
        prev = std::move(cur);
    }
    return ds;
}

struct NcBurkholderReport {
    /// ||f||_(4)
    double norm = 0.0;
    /// max(||sum d .x d*||^{1/2}_(2), ||sum d* .x d||^{1/2}_(2))
    double square = 0.0;
    /// ||tau-hat(sum d .x d* .x d .x d*)||^{1/4}
    double diagonal = 0.0;
    double sigma_r = 0.0;
    double sigma_c = 0.0;
    /// max(diagonal, sigma_r, sigma_c)
    double bracket = 0.0;

    double square_ratio() const { return square > 0.0 ? norm / square : 0.0; }
    double bracket_ratio() const { return bracket > 0.0 ? norm / bracket : 0.0; }
};

/// p = 4 square-function and bracket quantities for a matrix martingale along `chain`.
inline NcBurkholderReport nc_burkholder4(const NcElement& f, const std::vector<BlockSubalgebra>& chain) {
    const auto ds = nc_martingale_differences(f, chain);
    auto rr = [](const NcElement& d) { return nc_product(d, nc_star(d)); };
    auto cc = [](const NcElement& d) { return nc_product(nc_star(d), d); };
    NcElement Sr = rr(ds[0]), Sc = cc(ds[0]);
    NcElement sr = Sr, sc = Sc;
    NcElement D = nc_product(rr(ds[0]), rr(ds[0]));
    for (std::size_t k = 1; k < ds.size(); ++k) {
        const NcElement a = rr(ds[k]), b = cc(ds[k]);
        Sr += a;
        Sc += b;
        sr += nc_conditional_expectation(a, chain[k - 1]);
        sc += nc_conditional_expectation(b, chain[k - 1]);
        D += nc_product(a, a);
    }
    NcBurkholderReport r;
    r.norm = nc_lambda_norm(f, 4);
    r.square = std::max(std::sqrt(nc_lambda_norm(Sr, 2)), std::sqrt(nc_lambda_norm(Sc, 2)));
    r.sigma_r = std::sqrt(nc_lambda_norm(sr, 2));
    r.sigma_c = std::sqrt(nc_lambda_norm(sc, 2));
    r.diagonal = std::pow(linalg::spectral_norm(hat_tau(D)), 0.25);
    r.bracket = std::max({r.diagonal, r.sigma_r, r.sigma_c});
    return r;
}

struct CbOhReport {
    std::vector<int> ps;
    std::vector<double> values;
    /// values[k] - values[k-1]
    std::vector<double> gaps;
    /// p at which the dimension guard stopped the sequence, 0 if it did not
    int guard_tripped_at = 0;
    std::size_t guard_required = 0;

    bool nondecreasing(double slack = 1e-10) const {
        for (std::size_t k = 1; k < values.size(); ++k)
            if (values[k] < values[k - 1] - slack) return false;
        return true;
    }
};

/// ||f||_(2^m) for m = 1..m_max: nondecreasing lower approximations to the B (x) CB(OH_n) norm.
inline CbOhReport cb_oh_limit(const NcElement& f, int m_max) {
    require(m_max >= 1 && m_max <= 6, "cb_oh_limit: m_max must be in [1, 6]");
    CbOhReport r;
    for (int m = 1; m <= m_max; ++m) {
        const int p = 1 << m;
        try {
            const double v = nc_lambda_norm(f, p);
            if (!r.values.empty()) r.gaps.push_back(v - r.values.back());
            r.ps.push_back(p);
            r.values.push_back(v);
        } catch (const DimensionGuardError& e) {
            r.guard_tripped_at = p;
            r.guard_required = e.required();
            break;
        }
    }
    return r;
}

/// The element sum_j b_j (x) e_jj as a field on n equally weighted atoms.
inline comm::MatrixField diagonal_as_field(const NcElement& f) {
    std::vector<ComplexMatrix> v;
    for (std::size_t i = 0; i < f.n(); ++i) v.push_back(f.block(i, i));
    std::vector<double> w(f.n(), f.trace_weight());
    return comm::MatrixField(comm::FiniteMeasureSpace(w, {}), std::move(v));
}

}  // namespace opspace::nc
