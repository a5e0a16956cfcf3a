#pragma once

// Finite filtrations, martingale differences and square functions, with the
// Burkholder, dual Doob, Stein and Rosenthal-type quantities on Lambda_p.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "lambda.hpp"
#include "partitions.hpp"
#include "report.hpp"

namespace opspace::martingale {

using comm::AtomPartition;
using comm::FiniteMeasureSpace;
using comm::MatrixField;

/// A refining chain of atom partitions: level 0 is trivial, the last level is discrete.
class Filtration {
public:
    Filtration(FiniteMeasureSpace space, std::vector<AtomPartition> levels)
        : space_(std::move(space)), levels_(std::move(levels)) {
        require(space_.is_probability(), "Filtration: space must be a probability space");
        require(!levels_.empty(), "Filtration: needs at least one level");
        const std::size_t n = space_.size();
        for (const auto& l : levels_) comm::validate_partition(l, n);
        require(levels_.front().size() == 1, "Filtration: level 0 must be trivial");
        require(levels_.back().size() == n, "Filtration: last level must consist of singletons");
        for (std::size_t k = 1; k < levels_.size(); ++k)
            require(refines(levels_[k], levels_[k - 1]), "Filtration: level " + std::to_string(k) +
                                                             " does not refine level " + std::to_string(k - 1));
    }

    const FiniteMeasureSpace& space() const noexcept { return space_; }
    /// Index of the last level.
    std::size_t depth() const noexcept { return levels_.size() - 1; }
    const AtomPartition& level(std::size_t n) const { return levels_.at(n); }

    /// E_n f.
    MatrixField expectation(const MatrixField& f, std::size_t n) const {
        require(f.space() == space_, "Filtration: field lives on another space");
        return comm::conditional_expectation(f, level(n));
    }

    /// f is A_n-measurable (constant on every level-n block, exactly).
    bool is_measurable(const MatrixField& f, std::size_t n, double tol = 0.0) const {
        for (const auto& b : level(n))
            for (auto a : b)
                if ((f[a] - f[b.front()]).cwiseAbs().maxCoeff() > tol) return false;
        return true;
    }

private:
    static bool refines(const AtomPartition& fine, const AtomPartition& coarse) {
        std::size_t atoms = 0;
        for (const auto& b : coarse) atoms += b.size();
        std::vector<std::size_t> owner(atoms);
        for (std::size_t k = 0; k < coarse.size(); ++k)
            for (auto a : coarse[k]) owner[a] = k;
        for (const auto& b : fine)
            for (auto a : b)
                if (owner[a] != owner[b.front()]) return false;
        return true;
    }

    FiniteMeasureSpace space_;
    std::vector<AtomPartition> levels_;
};

/// {-1, 1}^N with uniform weights. Atom a carries bits b_1 (most significant) .. b_N,
/// and eps_k(a) = 1 - 2 b_k.
class DyadicSpace {
public:
    explicit DyadicSpace(int N) : N_(N) {
        require(N >= 1 && N <= 16, "DyadicSpace: N must be in [1, 16]");
    }

    int N() const noexcept { return N_; }
    std::size_t atoms() const noexcept { return std::size_t{1} << N_; }
    FiniteMeasureSpace space() const { return FiniteMeasureSpace::uniform(atoms()); }

    int epsilon(int k, std::size_t atom) const {
        require(k >= 1 && k <= N_, "DyadicSpace: coordinate index out of range");
        return ((atom >> (N_ - k)) & 1U) ? -1 : 1;
    }

    /// eps_k as a scalar field.
    MatrixField epsilon_field(int k) const {
        std::vector<cplx> v(atoms());
        for (std::size_t a = 0; a < atoms(); ++a) v[a] = static_cast<double>(epsilon(k, a));
        return MatrixField::scalar(space(), v);
    }

    /// Level n knows eps_1 .. eps_n: blocks are runs of 2^{N-n} consecutive atoms.
    Filtration filtration() const {
        std::vector<AtomPartition> levels;
        for (int n = 0; n <= N_; ++n) {
            const std::size_t run = std::size_t{1} << (N_ - n);
            AtomPartition blocks;
            for (std::size_t start = 0; start < atoms(); start += run) {
                std::vector<std::size_t> b(run);
                for (std::size_t i = 0; i < run; ++i) b[i] = start + i;
                blocks.push_back(std::move(b));
            }
            levels.push_back(std::move(blocks));
        }
        return Filtration(space(), std::move(levels));
    }

    /// sum_k b_k eps_k, with bs.size() == N.
    MatrixField rademacher_sum(const std::vector<ComplexMatrix>& bs) const {
        require(bs.size() == static_cast<std::size_t>(N_), "rademacher_sum: need one coefficient per coordinate");
        std::vector<ComplexMatrix> v(atoms(), ComplexMatrix::Zero(bs.front().rows(), bs.front().cols()));
        for (std::size_t a = 0; a < atoms(); ++a)
            for (int k = 1; k <= N_; ++k) v[a] += static_cast<double>(epsilon(k, a)) * bs[static_cast<std::size_t>(k - 1)];
        return MatrixField(space(), std::move(v));
    }

private:
    int N_;
};

/// d_0 = E_0 f, d_n = E_n f - E_{n-1} f for n = 1..depth.
inline std::vector<MatrixField> martingale_differences(const MatrixField& f, const Filtration& fil) {
    std::vector<MatrixField> ds;
    MatrixField prev = fil.expectation(f, 0);
    ds.push_back(prev);
    for (std::size_t n = 1; n <= fil.depth(); ++n) {
        MatrixField cur = fil.expectation(f, n);
        ds.push_back(cur - prev);
        prev = std::move(cur);
    }
    return ds;
}

/// S = sum_n d_n .x d_n-bar.
inline MatrixField square_function(const std::vector<MatrixField>& ds) {
    require(!ds.empty(), "square_function: empty difference sequence");
    MatrixField S = comm::gram(ds.front());
    for (std::size_t n = 1; n < ds.size(); ++n) S += comm::gram(ds[n]);
    return S;
}

/// sigma = d_0 .x d_0-bar + sum_{n>=1} E_{n-1}(d_n .x d_n-bar).
inline MatrixField conditioned_square(const std::vector<MatrixField>& ds, const Filtration& fil) {
    require(!ds.empty() && ds.size() <= fil.depth() + 1, "conditioned_square: too many differences");
    MatrixField s = comm::gram(ds.front());
    for (std::size_t n = 1; n < ds.size(); ++n) s += fil.expectation(comm::gram(ds[n]), n - 1);
    return s;
}

inline const double kBurkholderP4Bound = std::numbers::sqrt2 + std::sqrt(3.0);

struct BurkholderReport {
    int p = 0;
    /// ||f||_(p)
    double x = 0.0;
    /// ||S(f)||^{1/2} in Lambda_{p/2}
    double y = 0.0;
    double x_over_y = 0.0;
    double y_over_x = 0.0;

    double max_ratio() const { return std::max(x_over_y, y_over_x); }
};

/// x = ||f||_(p) against y = ||E(S^{.x p/2})||^{1/p}.
inline BurkholderReport burkholder_experiment(const MatrixField& f, const Filtration& fil, int p) {
    require_even(p, "burkholder_experiment");
    require(p >= 2, "burkholder_experiment: p must be >= 2");
    BurkholderReport r;
    r.p = p;
    r.x = comm::lambda_norm(f, p);
    r.y = std::pow(comm::positive_power_norm(square_function(martingale_differences(f, fil)), p / 2), 1.0 / p);
    r.x_over_y = r.y > 0.0 ? r.x / r.y : (r.x > 0.0 ? INFINITY : 1.0);
    r.y_over_x = r.x > 0.0 ? r.y / r.x : (r.y > 0.0 ? INFINITY : 1.0);
    return r;
}

/// ||E(alpha^{.x m})|| <= m^m ||E(beta^{.x m})|| with alpha = sum_n E_n(theta_n .x theta_n-bar),
/// beta = sum_n theta_n .x theta_n-bar; thetas[k] is theta_{k+1}.
inline RatioReport dual_doob_check(const std::vector<MatrixField>& thetas, const Filtration& fil, int m) {
    require(m >= 1, "dual_doob_check: m must be >= 1");
    require(!thetas.empty() && thetas.size() <= fil.depth(), "dual_doob_check: need 1..depth fields");
    MatrixField beta = comm::gram(thetas.front());
    MatrixField alpha = fil.expectation(beta, 1);
    for (std::size_t k = 1; k < thetas.size(); ++k) {
        const MatrixField g = comm::gram(thetas[k]);
        beta += g;
        alpha += fil.expectation(g, k + 1);
    }
    const double lhs = comm::positive_power_norm(alpha, m);
    const double rhs = std::pow(static_cast<double>(m), m) * comm::positive_power_norm(beta, m);
    return RatioReport::make(lhs, rhs, "dual Doob: ||E(alpha^m)|| <= m^m ||E(beta^m)||");
}

/// ||E(v^{.x m})|| <= m^m ||E(delta^{.x m})|| with
/// v = sum_n E_{n-1}(x_n .x x_n-bar) .x E_{n-1}(x_n-bar .x x_n), delta = sum_n x_n .x x_n-bar .x x_n-bar .x x_n;
/// xs[k] is x_{k+1}.
inline RatioReport stein_check(const std::vector<MatrixField>& xs, const Filtration& fil, int m) {
    require(m >= 1, "stein_check: m must be >= 1");
    require(!xs.empty() && xs.size() <= fil.depth(), "stein_check: need 1..depth fields");
    auto v_term = [&](std::size_t k) {
        const MatrixField& x = xs[k];
        const MatrixField xb = comm::conj(x);
        return comm::pointwise_tensor(fil.expectation(comm::pointwise_tensor(x, xb), k),
                                      fil.expectation(comm::pointwise_tensor(xb, x), k));
    };
    auto delta_term = [&](std::size_t k) {
        const MatrixField& x = xs[k];
        const MatrixField xb = comm::conj(x);
        return comm::pointwise_tensor(comm::pointwise_tensor(x, xb), comm::pointwise_tensor(xb, x));
    };
    MatrixField v = v_term(0), delta = delta_term(0);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        v += v_term(k);
        delta += delta_term(k);
    }
    const double lhs = comm::positive_power_norm(v, m);
    const double rhs = std::pow(static_cast<double>(m), m) * comm::positive_power_norm(delta, m);
    return RatioReport::make(lhs, rhs, "Stein: ||E(v^m)|| <= m^m ||E(delta^m)||");
}

struct RosenthalReport {
    int p = 0;
    double norm = 0.0;
    /// ||E(sigma^{.x p/2})||^{1/p}
    double sigma_term = 0.0;
    /// ||E((sum d .x d-bar .x d .x d-bar)^{.x p/4})||^{1/p}
    double diagonal_term = 0.0;
    double bracket = 0.0;
    double ratio = 0.0;
};

/// ||f||_(p) and [f]_p = sigma term + diagonal term; needs p divisible by 4.
inline RosenthalReport rosenthal_bracket(const MatrixField& f, const Filtration& fil, int p) {
    require(p >= 4 && p % 4 == 0, "rosenthal_bracket: p must be a positive multiple of 4");
    const auto ds = martingale_differences(f, fil);
    MatrixField D = comm::pointwise_tensor(comm::gram(ds.front()), comm::gram(ds.front()));
    for (std::size_t n = 1; n < ds.size(); ++n) D += comm::pointwise_tensor(comm::gram(ds[n]), comm::gram(ds[n]));
    RosenthalReport r;
    r.p = p;
    r.norm = comm::lambda_norm(f, p);
    r.sigma_term = std::pow(comm::positive_power_norm(conditioned_square(ds, fil), p / 2), 1.0 / p);
    r.diagonal_term = std::pow(comm::positive_power_norm(D, p / 4), 1.0 / p);
    r.bracket = r.sigma_term + r.diagonal_term;
    r.ratio = r.bracket > 0.0 ? r.norm / r.bracket : 0.0;
    return r;
}

struct KhintchineReport {
    /// ||sum b_k eps_k||_(p)
    double lhs = 0.0;
    /// ||sum b_k (x) b_k-bar||^{1/2}
    double rhs = 0.0;
    /// Gaussian constant ((p-1)!!)^{1/p}
    double constant = 0.0;

    bool lower_holds(double slack = 1e-9) const { return rhs <= lhs + slack * std::max(1.0, rhs); }
    bool upper_holds(double slack = 1e-9) const { return lhs <= constant * rhs + slack * std::max(1.0, rhs); }
};

/// Rademacher sums on {-1,1}^N, N = bs.size(), against the OH norm of (b_k).
inline KhintchineReport rademacher_khintchine(const std::vector<ComplexMatrix>& bs, int p) {
    require_even(p, "rademacher_khintchine");
    require(!bs.empty(), "rademacher_khintchine: need at least one coefficient");
    const DyadicSpace dy(static_cast<int>(bs.size()));
    const auto d = bs.front().rows();
    ComplexMatrix oh = ComplexMatrix::Zero(d * d, d * d);
    for (const auto& b : bs) oh += linalg::kron(b, b.conjugate());
    KhintchineReport r;
    r.lhs = comm::lambda_norm(dy.rademacher_sum(bs), p);
    r.rhs = std::sqrt(linalg::spectral_norm(oh));
    r.constant = partitions::khintchine_constant(partitions::MomentFunction::gaussian(), p);
    return r;
}

inline constexpr double kPOrthogonalityCap = 1e6;

struct POrthogonalityReport {
    bool is_p_orthogonal = true;
    std::size_t words_checked = 0;
    /// largest word norm relative to the product of the factors' Lambda_p norms
    double worst_word = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;

    bool holds(double slack = 1e-9) const { return !is_p_orthogonal || ratio <= 1.0 + slack; }
};

/// Checks that every injective alternating word int d_g1-bar .x d_g2 .x d_g3-bar .x ... vanishes,
/// then compares ||sum d_j||_(p) with (3 pi / 2) p max(||sum d .x d-bar||, ||sum d-bar .x d||)^{1/2}
/// (the inner norms in Lambda_{p/2}).
inline POrthogonalityReport p_orthogonality_check(const std::vector<MatrixField>& ds, int p) {
    require_even(p, "p_orthogonality_check");
    require(p >= 4, "p_orthogonality_check: p must be > 2");
    require(!ds.empty(), "p_orthogonality_check: empty family");
    require(std::pow(static_cast<double>(ds.size()), p) <= kPOrthogonalityCap,
            "p_orthogonality_check: |I|^p exceeds 1e6");
    std::vector<double> norms;
    for (const auto& d : ds) norms.push_back(comm::lambda_norm(d, p));
    std::vector<MatrixField> conjs;
    for (const auto& d : ds) conjs.push_back(comm::conj(d));

    POrthogonalityReport r;
    const std::size_t I = ds.size();
    std::vector<std::size_t> g;
    std::vector<bool> used(I, false);
    std::function<void()> rec = [&]() {
        if (g.size() == static_cast<std::size_t>(p)) {
            std::vector<MatrixField> slots;
            double scale = 1.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                slots.push_back(k % 2 == 0 ? conjs[g[k]] : ds[g[k]]);
                scale *= norms[g[k]];
            }
            ++r.words_checked;
            const double w = comm::integral_tensor_norm(slots);
            const double rel = scale > 0.0 ? w / scale : (w > 0.0 ? INFINITY : 0.0);
            r.worst_word = std::max(r.worst_word, rel);
            if (w > 1e-10 * scale) r.is_p_orthogonal = false;
            return;
        }
        for (std::size_t i = 0; i < I; ++i) {
            if (used[i]) continue;
            used[i] = true;
            g.push_back(i);
            rec();
            g.pop_back();
            used[i] = false;
        }
    };
    rec();

    MatrixField f = ds.front();
    MatrixField s1 = comm::gram(ds.front());
    MatrixField s2 = comm::gram(conjs.front());
    for (std::size_t j = 1; j < I; ++j) {
        f += ds[j];
        s1 += comm::gram(ds[j]);
        s2 += comm::gram(conjs[j]);
    }
    r.lhs = comm::lambda_norm(f, p);
    const double inner = std::max(std::pow(comm::positive_power_norm(s1, p / 2), 1.0 / p),
                                  std::pow(comm::positive_power_norm(s2, p / 2), 1.0 / p));
    r.rhs = 1.5 * std::numbers::pi * p * inner;
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? INFINITY : 0.0);
    return r;
}

}  // namespace opspace::martingale
