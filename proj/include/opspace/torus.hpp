#pragma once

// B(H)-valued trigonometric polynomials, the Hilbert transform (multiplier -i sign(n))
// and Lambda_p norms on the circle. Norms are computed by equispaced quadrature with
// more nodes than the degree of the integrand, which is exact.

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "lambda.hpp"
#include "random.hpp"
#include "report.hpp"

namespace opspace::torus {

class TrigPolynomial {
public:
    explicit TrigPolynomial(std::size_t opdim) : opdim_(opdim) {
        require(opdim > 0, "TrigPolynomial: opdim must be positive");
    }

    TrigPolynomial(std::size_t opdim, std::map<int, ComplexMatrix> coeffs) : TrigPolynomial(opdim) {
        for (auto& [n, c] : coeffs) add(n, c);
    }

    static TrigPolynomial monomial(int n, const ComplexMatrix& b) {
        TrigPolynomial f(static_cast<std::size_t>(b.rows()));
        f.add(n, b);
        return f;
    }
    static TrigPolynomial constant(const ComplexMatrix& b) { return monomial(0, b); }

    /// Gaussian coefficients on every frequency in [-deg, deg] (or [1, deg] when analytic).
    static TrigPolynomial random(int deg, std::size_t opdim, Rng& rng, bool mean_zero = false,
                                 bool analytic = false) {
        TrigPolynomial f(opdim);
        for (int n = analytic ? 1 : -deg; n <= deg; ++n) {
            if (n == 0 && mean_zero) continue;
            f.add(n, rng.gaussian_matrix(static_cast<Eigen::Index>(opdim)));
        }
        return f;
    }

    /// Adds c to the coefficient of e^{int}.
    void add(int n, const ComplexMatrix& c) {
        require(static_cast<std::size_t>(c.rows()) == opdim_ && c.rows() == c.cols(),
                "TrigPolynomial: coefficient has wrong size");
        auto it = coeffs_.find(n);
        if (it == coeffs_.end())
            coeffs_.emplace(n, c);
        else
            it->second += c;
    }

    std::size_t opdim() const noexcept { return opdim_; }
    const std::map<int, ComplexMatrix>& coeffs() const noexcept { return coeffs_; }

    ComplexMatrix coeff(int n) const {
        auto it = coeffs_.find(n);
        if (it != coeffs_.end()) return it->second;
        const auto d = static_cast<Eigen::Index>(opdim_);
        return ComplexMatrix::Zero(d, d);
    }

    /// max |n| over nonzero coefficients (0 for the zero polynomial).
    int degree() const {
        int d = 0;
        for (const auto& [n, c] : coeffs_)
            if (!c.isZero(0.0)) d = std::max(d, std::abs(n));
        return d;
    }

    ComplexMatrix evaluate(double t) const {
        const auto d = static_cast<Eigen::Index>(opdim_);
        ComplexMatrix out = ComplexMatrix::Zero(d, d);
        for (const auto& [n, c] : coeffs_) out += std::polar(1.0, n * t) * c;
        return out;
    }

    /// max over n of the largest entry modulus of the coefficient.
    double max_coeff_entry() const {
        double m = 0.0;
        for (const auto& [n, c] : coeffs_)
            if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
        return m;
    }

    /// sum over n of ||f^(n)||.
    double coeff_l1() const {
        double s = 0.0;
        for (const auto& [n, c] : coeffs_) s += linalg::spectral_norm(c);
        return s;
    }

    TrigPolynomial& operator+=(const TrigPolynomial& o) {
        require(opdim_ == o.opdim_, "TrigPolynomial: opdim mismatch");
        for (const auto& [n, c] : o.coeffs_) add(n, c);
        return *this;
    }
    TrigPolynomial& operator-=(const TrigPolynomial& o) {
        require(opdim_ == o.opdim_, "TrigPolynomial: opdim mismatch");
        for (const auto& [n, c] : o.coeffs_) add(n, -c);
        return *this;
    }
    friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
    friend TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b) { return a -= b; }
    friend TrigPolynomial operator*(cplx s, TrigPolynomial a) {
        for (auto& [n, c] : a.coeffs_) c *= s;
        return a;
    }

private:
    std::size_t opdim_;
    std::map<int, ComplexMatrix> coeffs_;
};

/// f-bar: coefficient n becomes conj(f^(-n)).
inline TrigPolynomial conj(const TrigPolynomial& f) {
    TrigPolynomial out(f.opdim());
    for (const auto& [n, c] : f.coeffs()) out.add(-n, c.conjugate());
    return out;
}

/// (f .x g)(t) = f(t) (x) g(t), by convolution of the coefficients.
inline TrigPolynomial pointwise_tensor(const TrigPolynomial& f, const TrigPolynomial& g) {
    check_dim(checked_product(f.opdim(), g.opdim()), "torus::pointwise_tensor");
    TrigPolynomial out(f.opdim() * g.opdim());
    for (const auto& [n, a] : f.coeffs())
        for (const auto& [m, b] : g.coeffs()) out.add(n + m, linalg::kron(a, b));
    return out;
}

/// Fourier multiplier phi(n) = -i sign(n).
inline TrigPolynomial hilbert_transform(const TrigPolynomial& f) {
    TrigPolynomial out(f.opdim());
    for (const auto& [n, c] : f.coeffs()) {
        if (n == 0) continue;
        out.add(n, cplx(0.0, n > 0 ? -1.0 : 1.0) * c);
    }
    return out;
}

/// Part of f with frequencies in [lo, hi].
inline TrigPolynomial restrict_frequencies(const TrigPolynomial& f, int lo, int hi) {
    TrigPolynomial out(f.opdim());
    for (const auto& [n, c] : f.coeffs())
        if (n >= lo && n <= hi) out.add(n, c);
    return out;
}

/// f on N equispaced nodes 2 pi j / N, each of mass 1/N.
inline comm::MatrixField sample(const TrigPolynomial& f, std::size_t nodes) {
    require(nodes >= 1, "torus::sample: needs at least one node");
    std::vector<ComplexMatrix> v;
    v.reserve(nodes);
    for (std::size_t j = 0; j < nodes; ++j)
        v.push_back(f.evaluate(2.0 * std::numbers::pi * static_cast<double>(j) /
                               static_cast<double>(nodes)));
    return comm::MatrixField(comm::FiniteMeasureSpace::uniform(nodes), std::move(v));
}

/// || int f_1 .x ... .x f_r dm ||; nodes = 0 selects sum of degrees + 1 (exact).
inline double integral_tensor_norm(const std::vector<TrigPolynomial>& slots, std::size_t nodes = 0) {
    require(!slots.empty(), "torus::integral_tensor_norm: needs at least one slot");
    if (nodes == 0) {
        nodes = 1;
        for (const auto& f : slots) nodes += static_cast<std::size_t>(f.degree());
    }
    std::vector<comm::MatrixField> fields;
    for (const auto& f : slots) fields.push_back(sample(f, nodes));
    return comm::integral_tensor_norm(fields);
}

/// Default node count p * degree + 1.
inline std::size_t exact_nodes(const TrigPolynomial& f, int p) {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(f.degree()) + 1;
}

/// ||f||_(p) on (T, dm); nodes = 0 selects p * degree + 1.
inline double torus_lambda_norm(const TrigPolynomial& f, int p, std::size_t nodes = 0) {
    require_even(p, "torus_lambda_norm");
    if (nodes == 0) nodes = exact_nodes(f, p);
    return comm::lambda_norm(sample(f, nodes), p);
}

/// || E(S^{.x m}) ||^{1/m}, the Lambda_m norm of a cone-positive S = sum d .x d-bar.
inline double torus_positive_norm(const TrigPolynomial& S, int m) {
    require(m >= 1, "torus_positive_norm: m must be >= 1");
    return std::pow(integral_tensor_norm(std::vector<TrigPolynomial>(static_cast<std::size_t>(m), S)),
                    1.0 / m);
}

struct CotlarReport {
    /// T(f.g - Tf.Tg) - (f.Tg + Tf.g)
    double residual = 0.0;
    /// same with g-bar in place of g
    double residual_conjugate = 0.0;
    /// conj(Tf) - T(conj f)
    double residual_star = 0.0;
    double scale = 1.0;

    double worst() const { return std::max({residual, residual_conjugate, residual_star}); }
    bool holds(double rel_tol = 1e-10) const { return worst() <= rel_tol * scale; }
};

/// Residuals of Cotlar's identity for the pointwise tensor, its conjugate variant
/// and the *-compatibility of T, all measured as the largest coefficient entry.
inline CotlarReport cotlar_residual(const TrigPolynomial& f, const TrigPolynomial& g) {
    auto defect = [](const TrigPolynomial& u, const TrigPolynomial& w) -> double {
        require(u.opdim() == w.opdim(), "cotlar_residual: opdim mismatch");
        TrigPolynomial d = u - w;
        return d.max_coeff_entry();
    };
    auto identity_defect = [&](const TrigPolynomial& a, const TrigPolynomial& b) {
        const TrigPolynomial Ta = hilbert_transform(a), Tb = hilbert_transform(b);
        const TrigPolynomial lhs =
            hilbert_transform(pointwise_tensor(a, b) - pointwise_tensor(Ta, Tb));
        const TrigPolynomial rhs = pointwise_tensor(a, Tb) + pointwise_tensor(Ta, b);
        return defect(lhs, rhs);
    };
    CotlarReport r;
    r.residual = identity_defect(f, g);
    r.residual_conjugate = identity_defect(f, conj(g));
    r.residual_star = std::max(defect(conj(hilbert_transform(f)), hilbert_transform(conj(f))),
                               defect(conj(hilbert_transform(g)), hilbert_transform(conj(g))));
    r.scale = 1.0 + f.coeff_l1() * g.coeff_l1();
    return r;
}

/// Tf .x T(f-bar) - f .x f-bar - T(f .x conj(Tf) + Tf .x f-bar) for mean-zero f.
inline double squared_cotlar_residual(const TrigPolynomial& f) {
    const TrigPolynomial Tf = hilbert_transform(f);
    const TrigPolynomial fb = conj(f);
    const TrigPolynomial lhs = pointwise_tensor(Tf, hilbert_transform(fb)) - pointwise_tensor(f, fb);
    const TrigPolynomial rhs =
        hilbert_transform(pointwise_tensor(f, conj(Tf)) + pointwise_tensor(Tf, fb));
    return (lhs - rhs).max_coeff_entry();
}

struct HilbertReport {
    double norm_f = 0.0;
    double norm_Tf = 0.0;
    double ratio = 0.0;
};

/// ||f||_(p) and ||Tf||_(p); the ratio is an empirical lower bound for ||T||_cb.
inline HilbertReport hilbert_cb_experiment(const TrigPolynomial& f, int p) {
    require_even(p, "hilbert_cb_experiment");
    HilbertReport r;
    r.norm_f = torus_lambda_norm(f, p);
    r.norm_Tf = torus_lambda_norm(hilbert_transform(f), p);
    r.ratio = r.norm_f > 0.0 ? r.norm_Tf / r.norm_f : 0.0;
    return r;
}

/// Dyadic blocks Delta_n (2^n <= k < 2^{n+1}) of an f supported on positive frequencies.
inline std::vector<TrigPolynomial> dyadic_blocks(const TrigPolynomial& f) {
    std::vector<TrigPolynomial> out;
    for (const auto& [n, c] : f.coeffs())
        require(n > 0 || c.isZero(0.0), "dyadic_blocks: f must be supported on n > 0");
    const int deg = f.degree();
    for (int lo = 1; lo <= deg; lo *= 2) {
        TrigPolynomial block = restrict_frequencies(f, lo, 2 * lo - 1);
        if (block.degree() > 0) out.push_back(std::move(block));
    }
    return out;
}

/// S(f) = sum_n Delta_n .x conj(Delta_n).
inline TrigPolynomial lp_square_function(const TrigPolynomial& f) {
    TrigPolynomial S(f.opdim() * f.opdim());
    for (const auto& d : dyadic_blocks(f)) S += pointwise_tensor(d, conj(d));
    return S;
}

/// ||f||_(p) against ||S(f)||^{1/2}_(p/2); the ratio is logged, no constant is asserted.
inline RatioReport littlewood_paley_check(const TrigPolynomial& f, int p) {
    require_even(p, "littlewood_paley_check");
    const double lhs = torus_lambda_norm(f, p);
    const TrigPolynomial S = lp_square_function(f);
    const double rhs = std::sqrt(torus_positive_norm(S, p / 2));
    return RatioReport::make(lhs, rhs, "Littlewood-Paley upper estimate in Lambda_p");
}

}  // namespace opspace::torus
