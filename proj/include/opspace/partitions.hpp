#pragma once

// Set partitions of [1..n], the refinement lattice and its Moebius function, pair
// partitions with crossing numbers, Khintchine constants of moment functions defined
// by pairings, the Moebius decomposition of a multilinear sum, and Lambda(p)-set counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "random.hpp"
#include "report.hpp"
#include "torus.hpp"

namespace opspace::partitions {

/// A partition of [1..n] (elements are 1-based). Blocks are sorted, and ordered by
/// their smallest element.
class SetPartition {
public:
    SetPartition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
        require(n >= 1, "SetPartition: n must be positive");
        std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
        for (auto& b : blocks_) {
            require(!b.empty(), "SetPartition: empty block");
            std::sort(b.begin(), b.end());
            for (int x : b) {
                require(x >= 1 && x <= n, "SetPartition: element out of range");
                require(seen[static_cast<std::size_t>(x)]++ == 0, "SetPartition: blocks overlap");
            }
        }
        for (int x = 1; x <= n; ++x)
            require(seen[static_cast<std::size_t>(x)] == 1, "SetPartition: blocks do not cover [1..n]");
        std::sort(blocks_.begin(), blocks_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }

    /// From block labels of elements 1..n (any integer labels).
    static SetPartition from_labels(const std::vector<int>& labels) {
        std::map<int, std::vector<int>> by;
        for (std::size_t i = 0; i < labels.size(); ++i)
            by[labels[i]].push_back(static_cast<int>(i) + 1);
        std::vector<std::vector<int>> blocks;
        for (auto& [k, b] : by) blocks.push_back(std::move(b));
        return SetPartition(static_cast<int>(labels.size()), std::move(blocks));
    }

    /// 0-hat: all singletons.
    static SetPartition finest(int n) {
        std::vector<std::vector<int>> b;
        for (int i = 1; i <= n; ++i) b.push_back({i});
        return SetPartition(n, std::move(b));
    }
    /// 1-hat: a single block.
    static SetPartition coarsest(int n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 1);
        return SetPartition(n, {all});
    }

    int n() const noexcept { return n_; }
    const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
    std::size_t block_count() const noexcept { return blocks_.size(); }

    /// Block index (in canonical order) of each element 1..n, stored at position i - 1.
    std::vector<int> labels() const {
        std::vector<int> l(static_cast<std::size_t>(n_));
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            for (int x : blocks_[k]) l[static_cast<std::size_t>(x - 1)] = static_cast<int>(k);
        return l;
    }

    /// r_i: number of blocks of size i, for i = 1..n (index 0 unused).
    std::vector<int> block_size_counts() const {
        std::vector<int> r(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& b : blocks_) ++r[b.size()];
        return r;
    }

    bool operator==(const SetPartition& o) const { return n_ == o.n_ && blocks_ == o.blocks_; }
    bool operator<(const SetPartition& o) const {
        return n_ != o.n_ ? n_ < o.n_ : blocks_ < o.blocks_;
    }

    std::string to_string() const {
        std::string s;
        for (const auto& b : blocks_) {
            s += '{';
            for (std::size_t i = 0; i < b.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(b[i]);
            }
            s += '}';
        }
        return s;
    }

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
};

/// A set partition with every block of size two.
class PairPartition {
public:
    explicit PairPartition(SetPartition p) : p_(std::move(p)) {
        require(p_.n() % 2 == 0, "PairPartition: n must be even");
        for (const auto& b : p_.blocks()) require(b.size() == 2, "PairPartition: blocks must be pairs");
    }
    PairPartition(int n, const std::vector<std::pair<int, int>>& pairs)
        : PairPartition(SetPartition(n, to_blocks(pairs))) {}

    int n() const noexcept { return p_.n(); }
    const SetPartition& partition() const noexcept { return p_; }
    /// (a, b) with a < b, ordered by a.
    std::vector<std::pair<int, int>> pairs() const {
        std::vector<std::pair<int, int>> out;
        for (const auto& b : p_.blocks()) out.emplace_back(b[0], b[1]);
        return out;
    }
    /// Partner of each element (1-based), at position i - 1.
    std::vector<int> partner() const {
        std::vector<int> m(static_cast<std::size_t>(n()));
        for (const auto& b : p_.blocks()) {
            m[static_cast<std::size_t>(b[0] - 1)] = b[1];
            m[static_cast<std::size_t>(b[1] - 1)] = b[0];
        }
        return m;
    }
    bool operator==(const PairPartition& o) const { return p_ == o.p_; }
    std::string to_string() const { return p_.to_string(); }

private:
    static std::vector<std::vector<int>> to_blocks(const std::vector<std::pair<int, int>>& pairs) {
        std::vector<std::vector<int>> b;
        for (auto [x, y] : pairs) b.push_back({x, y});
        return b;
    }
    SetPartition p_;
};

inline constexpr int kMaxPartitionN = 12;
inline constexpr int kMaxPairN = 16;

/// Visits every partition of [1..n] as a restricted growth string (labels 0, 1, ...).
inline void for_each_partition_labels(int n, const std::function<void(const std::vector<int>&)>& visit) {
    require(n >= 1, "for_each_partition: n must be positive");
    std::vector<int> a(static_cast<std::size_t>(n), 0), maxp(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int m) {
        if (i == n) {
            visit(a);
            return;
        }
        for (int v = 0; v <= m + 1; ++v) {
            a[static_cast<std::size_t>(i)] = v;
            rec(i + 1, std::max(m, v));
        }
    };
    a[0] = 0;
    rec(1, 0);
}

/// All of P_n, n <= 12.
inline std::vector<SetPartition> enumerate_partitions(int n) {
    require(n >= 1 && n <= kMaxPartitionN,
            "enumerate_partitions: n must be in [1, " + std::to_string(kMaxPartitionN) + "]");
    std::vector<SetPartition> out;
    for_each_partition_labels(n, [&](const std::vector<int>& l) { out.push_back(SetPartition::from_labels(l)); });
    return out;
}

/// Visits every pair partition of [1..n] through its partner array (1-based partners).
inline void for_each_pairing(int n, const std::function<void(const std::vector<int>&)>& visit) {
    require(n >= 0 && n % 2 == 0, "for_each_pairing: n must be even");
    std::vector<int> partner(static_cast<std::size_t>(n), 0);
    std::function<void()> rec = [&]() {
        int first = -1;
        for (int i = 0; i < n; ++i)
            if (partner[static_cast<std::size_t>(i)] == 0) {
                first = i;
                break;
            }
        if (first < 0) {
            visit(partner);
            return;
        }
        for (int j = first + 1; j < n; ++j) {
            if (partner[static_cast<std::size_t>(j)] != 0) continue;
            partner[static_cast<std::size_t>(first)] = j + 1;
            partner[static_cast<std::size_t>(j)] = first + 1;
            rec();
            partner[static_cast<std::size_t>(first)] = 0;
            partner[static_cast<std::size_t>(j)] = 0;
        }
    };
    rec();
}

/// All of P_2(n), n even <= 16.
inline std::vector<PairPartition> enumerate_pair_partitions(int n) {
    require(n >= 2 && n % 2 == 0 && n <= kMaxPairN,
            "enumerate_pair_partitions: n must be even in [2, " + std::to_string(kMaxPairN) + "]");
    std::vector<PairPartition> out;
    for_each_pairing(n, [&](const std::vector<int>& partner) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 1; i <= n; ++i)
            if (partner[static_cast<std::size_t>(i - 1)] > i)
                pairs.emplace_back(i, partner[static_cast<std::size_t>(i - 1)]);
        out.emplace_back(n, pairs);
    });
    return out;
}

/// pi <= sigma in the refinement order: every block of pi lies inside a block of sigma.
inline bool leq(const SetPartition& pi, const SetPartition& sigma) {
    require(pi.n() == sigma.n(), "leq: partitions of different sets");
    const auto ls = sigma.labels();
    for (const auto& b : pi.blocks())
        for (int x : b)
            if (ls[static_cast<std::size_t>(x - 1)] != ls[static_cast<std::size_t>(b.front() - 1)])
                return false;
    return true;
}

/// (-1)^{k-1} (k-1)!
inline std::int64_t signed_factorial_term(std::size_t k) {
    std::int64_t f = 1;
    for (std::size_t i = 2; i < k; ++i) f *= static_cast<std::int64_t>(i);
    return (k % 2 == 1) ? f : -f;
}

/// mu(0-hat, pi) = prod_i [(-1)^{i-1} (i-1)!]^{r_i(pi)}.
inline std::int64_t mobius(const SetPartition& pi) {
    std::int64_t m = 1;
    for (const auto& b : pi.blocks()) m *= signed_factorial_term(b.size());
    return m;
}

/// mu(pi, sigma): 0 unless pi <= sigma; otherwise the product over blocks of sigma of
/// (-1)^{k-1} (k-1)!, k the number of pi-blocks inside that block.
inline std::int64_t mobius_interval(const SetPartition& pi, const SetPartition& sigma) {
    if (!leq(pi, sigma)) return 0;
    const auto ls = sigma.labels();
    std::vector<std::size_t> count(sigma.block_count(), 0);
    for (const auto& b : pi.blocks()) ++count[static_cast<std::size_t>(ls[static_cast<std::size_t>(b.front() - 1)])];
    std::int64_t m = 1;
    for (auto k : count) m *= signed_factorial_term(k);
    return m;
}

/// mu(pi, sigma) from the defining recursion mu(pi, pi) = 1,
/// mu(pi, sigma) = -sum_{pi <= rho < sigma} mu(pi, rho); n <= 7.
inline std::int64_t mobius_recursive(const SetPartition& pi, const SetPartition& sigma) {
    require(pi.n() <= 7, "mobius_recursive: n must be <= 7");
    if (!leq(pi, sigma)) return 0;
    std::vector<SetPartition> interval;
    for (auto& r : enumerate_partitions(pi.n()))
        if (leq(pi, r) && leq(r, sigma)) interval.push_back(std::move(r));
    // a refinement is never coarser by block count, so sort finest-last by block count
    std::sort(interval.begin(), interval.end(), [](const SetPartition& a, const SetPartition& b) {
        return a.block_count() > b.block_count();
    });
    std::map<SetPartition, std::int64_t> mu;
    for (const auto& r : interval) {
        if (r == pi) {
            mu[r] = 1;
            continue;
        }
        std::int64_t s = 0;
        for (const auto& [q, v] : mu)
            if (leq(q, r) && !(q == r)) s += v;
        mu[r] = -s;
    }
    return mu.at(sigma);
}

/// Number of block pairs {a<b}, {c<d} with a < c < b < d.
inline int crossing_number(const PairPartition& nu) {
    const auto pr = nu.pairs();
    int c = 0;
    for (std::size_t i = 0; i < pr.size(); ++i)
        for (std::size_t j = 0; j < pr.size(); ++j) {
            const auto [a, b] = pr[i];
            const auto [x, y] = pr[j];
            if (a < x && x < b && b < y) ++c;
        }
    return c;
}

inline int crossing_number_of_partner(const std::vector<int>& partner) {
    const int n = static_cast<int>(partner.size());
    int c = 0;
    for (int a = 1; a <= n; ++a) {
        const int b = partner[static_cast<std::size_t>(a - 1)];
        if (b < a) continue;
        for (int x = a + 1; x < b; ++x) {
            const int y = partner[static_cast<std::size_t>(x - 1)];
            if (y > b) ++c;
        }
    }
    return c;
}

/// Number of pair partitions of [1..p] with each crossing number (index = crossings).
inline std::vector<std::uint64_t> crossing_histogram(int p) {
    require(p >= 2 && p % 2 == 0 && p <= kMaxPairN,
            "crossing_histogram: p must be even in [2, " + std::to_string(kMaxPairN) + "]");
    std::vector<std::uint64_t> h;
    for_each_pairing(p, [&](const std::vector<int>& partner) {
        const auto c = static_cast<std::size_t>(crossing_number_of_partner(partner));
        if (h.size() <= c) h.resize(c + 1, 0);
        ++h[c];
    });
    return h;
}

inline std::uint64_t double_factorial_odd(int p) {  // (p-1)!! for even p
    std::uint64_t r = 1;
    for (int k = p - 1; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
    return r;
}

inline std::uint64_t catalan(int m) {
    std::uint64_t c = 1;
    for (int k = 0; k < m; ++k) c = c * 2 * (2 * static_cast<std::uint64_t>(k) + 1) / (static_cast<std::uint64_t>(k) + 2);
    return c;
}

enum class PsiKind { gaussian, q_gaussian, free_, spin };

/// A moment function psi on pair partitions.
struct MomentFunction {
    PsiKind kind = PsiKind::gaussian;
    double q = 1.0;

    static MomentFunction gaussian() { return {PsiKind::gaussian, 1.0}; }
    static MomentFunction q_gaussian(double q) {
        require(q >= -1.0 && q <= 1.0, "q_gaussian: q must lie in [-1, 1]");
        return {PsiKind::q_gaussian, q};
    }
    static MomentFunction free() { return {PsiKind::free_, 0.0}; }
    static MomentFunction spin() { return {PsiKind::spin, -1.0}; }

    /// psi as a function of the crossing number.
    double of_crossings(int c) const {
        switch (kind) {
            case PsiKind::gaussian: return 1.0;
            case PsiKind::q_gaussian: return c == 0 ? 1.0 : std::pow(q, c);
            case PsiKind::free_: return c == 0 ? 1.0 : 0.0;
            case PsiKind::spin: return c % 2 == 0 ? 1.0 : -1.0;
        }
        return 0.0;
    }
    double operator()(const PairPartition& nu) const { return of_crossings(crossing_number(nu)); }

    std::string name() const {
        switch (kind) {
            case PsiKind::gaussian: return "gaussian";
            case PsiKind::q_gaussian: return "q_gaussian";
            case PsiKind::free_: return "free";
            case PsiKind::spin: return "spin";
        }
        return "";
    }
};

/// sum over P_2(p) of |psi(nu)|.
inline double khintchine_moment(const MomentFunction& psi, int p) {
    require_even(p, "khintchine_constant");
    switch (psi.kind) {
        case PsiKind::gaussian:
        case PsiKind::spin: return static_cast<double>(double_factorial_odd(p));
        case PsiKind::free_: return static_cast<double>(catalan(p / 2));
        case PsiKind::q_gaussian: break;
    }
    const auto h = crossing_histogram(p);
    double s = 0.0;
    for (std::size_t c = 0; c < h.size(); ++c)
        s += static_cast<double>(h[c]) * std::abs(psi.of_crossings(static_cast<int>(c)));
    return s;
}

/// C_{psi,p} = (sum_nu |psi(nu)|)^{1/p}.
inline double khintchine_constant(const MomentFunction& psi, int p) {
    require(p <= kMaxPairN, "khintchine_constant: p must be <= " + std::to_string(kMaxPairN));
    return std::pow(khintchine_moment(psi, p), 1.0 / p);
}

/// Both sides of the Moebius decomposition of phi(F_1, ..., F_n).
struct MobiusDecompositionReport {
    cplx lhs;
    cplx rhs;
    double residual = 0.0;
    double scale = 1.0;
};

/// phi(F_1, ..., F_n) = Phi(0) - sum_{pi > 0} Psi(pi) mu(0, pi) for a random scalar
/// multilinear form phi on (C^dim)^n and random d_i(k), i in I = {0..index_count-1}.
inline MobiusDecompositionReport mobius_decomposition_check(int n, int index_count, std::uint64_t seed,
                                                            int dim = 2, bool zero_data = false) {
    require(n >= 1 && n <= 6, "mobius_decomposition_check: n must be in [1, 6]");
    require(index_count >= 1 && index_count <= 4, "mobius_decomposition_check: |I| must be in [1, 4]");
    require(dim >= 1 && dim <= 3, "mobius_decomposition_check: dim must be in [1, 3]");
    Rng rng(seed);
    std::size_t tsize = 1;
    for (int k = 0; k < n; ++k) tsize *= static_cast<std::size_t>(dim);
    std::vector<cplx> T(tsize);
    for (auto& t : T) t = rng.complex_normal();
    // d[i][k] in C^dim
    std::vector<std::vector<ComplexVector>> d(static_cast<std::size_t>(index_count),
                                              std::vector<ComplexVector>(static_cast<std::size_t>(n)));
    for (auto& row : d)
        for (auto& v : row) {
            v = ComplexVector::Zero(dim);
            if (!zero_data)
                for (int j = 0; j < dim; ++j) v[j] = rng.complex_normal();
        }

    auto phi = [&](const std::vector<const ComplexVector*>& xs) {
        cplx s = 0.0;
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        for (std::size_t flat = 0; flat < tsize; ++flat) {
            std::size_t rem = flat;
            cplx term = T[flat];
            for (int k = n - 1; k >= 0; --k) {
                idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
                rem /= static_cast<std::size_t>(dim);
            }
            for (int k = 0; k < n; ++k) term *= (*xs[static_cast<std::size_t>(k)])[idx[static_cast<std::size_t>(k)]];
            s += term;
        }
        return s;
    };

    // all functions g: [1..n] -> I
    std::size_t gcount = 1;
    for (int k = 0; k < n; ++k) gcount *= static_cast<std::size_t>(index_count);
    std::vector<int> g(static_cast<std::size_t>(n));
    std::vector<const ComplexVector*> xs(static_cast<std::size_t>(n));
    auto decode = [&](std::size_t code) {
        for (int k = n - 1; k >= 0; --k) {
            g[static_cast<std::size_t>(k)] = static_cast<int>(code % static_cast<std::size_t>(index_count));
            code /= static_cast<std::size_t>(index_count);
        }
    };
    auto eval_g = [&]() {
        for (int k = 0; k < n; ++k)
            xs[static_cast<std::size_t>(k)] = &d[static_cast<std::size_t>(g[static_cast<std::size_t>(k)])][static_cast<std::size_t>(k)];
        return phi(xs);
    };

    MobiusDecompositionReport r;
    // left side: phi(F_1, ..., F_n) with F_k = sum_i d_i(k)
    std::vector<ComplexVector> F(static_cast<std::size_t>(n), ComplexVector::Zero(dim));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < index_count; ++i) F[static_cast<std::size_t>(k)] += d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = &F[static_cast<std::size_t>(k)];
    r.lhs = phi(xs);

    cplx phi0 = 0.0;
    double abs_total = 0.0;
    for (std::size_t code = 0; code < gcount; ++code) {
        decode(code);
        const cplx v = eval_g();
        abs_total += std::abs(v);
        std::vector<int> sorted = g;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) phi0 += v;
    }

    cplx correction = 0.0;
    for (const auto& pi : enumerate_partitions(n)) {
        if (pi.block_count() == static_cast<std::size_t>(n)) continue;  // pi = 0-hat
        // Psi(pi): g constant on the blocks of pi, blocks assigned freely
        const auto labels = pi.labels();
        std::size_t hcount = 1;
        for (std::size_t b = 0; b < pi.block_count(); ++b) hcount *= static_cast<std::size_t>(index_count);
        cplx psi = 0.0;
        std::vector<int> h(pi.block_count());
        for (std::size_t code = 0; code < hcount; ++code) {
            std::size_t rem = code;
            for (auto& x : h) {
                x = static_cast<int>(rem % static_cast<std::size_t>(index_count));
                rem /= static_cast<std::size_t>(index_count);
            }
            for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = h[static_cast<std::size_t>(labels[static_cast<std::size_t>(k)])];
            psi += eval_g();
        }
        correction += psi * static_cast<double>(mobius(pi));
    }
    r.rhs = phi0 - correction;
    r.residual = std::abs(r.lhs - r.rhs);
    r.scale = std::max(1.0, abs_total);
    return r;
}

/// Count of injective g: [1..p/2] -> E with g(1) - g(2) + g(3) - ... = gamma (alternating)
/// or g(1) + ... + g(p/2) = gamma (plain).
inline constexpr double kMaxLambdaSetWork = 1e7;

namespace detail {
inline void for_each_injective(const std::vector<std::int64_t>& E, int len,
                               const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    require(len >= 1, "lambda_set_count: p must be >= 2");
    require(std::pow(static_cast<double>(E.size()), len) <= kMaxLambdaSetWork,
            "lambda_set_count: |E|^{p/2} exceeds 1e7");
    std::set<std::int64_t> uniq(E.begin(), E.end());
    require(uniq.size() == E.size(), "lambda_set_count: E must not repeat elements");
    std::vector<std::int64_t> cur;
    std::vector<bool> used(E.size(), false);
    std::function<void()> rec = [&]() {
        if (static_cast<int>(cur.size()) == len) {
            visit(cur);
            return;
        }
        for (std::size_t i = 0; i < E.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            cur.push_back(E[i]);
            rec();
            cur.pop_back();
            used[i] = false;
        }
    };
    rec();
}

inline std::int64_t combine(const std::vector<std::int64_t>& g, bool plain) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < g.size(); ++k) s += (plain || k % 2 == 0) ? g[k] : -g[k];
    return s;
}

inline std::map<std::int64_t, std::int64_t> representation_counts(const std::vector<std::int64_t>& E, int p,
                                                                  bool plain) {
    require_even(p, "lambda_set_count");
    std::map<std::int64_t, std::int64_t> counts;
    for_each_injective(E, p / 2, [&](const std::vector<std::int64_t>& g) { ++counts[combine(g, plain)]; });
    return counts;
}
}  // namespace detail

/// Z_p(gamma, E) with alternating signs.
inline std::int64_t lambda_set_count(const std::vector<std::int64_t>& E, int p, std::int64_t gamma) {
    const auto c = detail::representation_counts(E, p, false);
    auto it = c.find(gamma);
    return it == c.end() ? 0 : it->second;
}

/// Z(E) = max over gamma of Z_p(gamma, E).
inline std::int64_t lambda_set_Z(const std::vector<std::int64_t>& E, int p) {
    std::int64_t z = 0;
    for (const auto& [g, c] : detail::representation_counts(E, p, false)) z = std::max(z, c);
    return z;
}

/// Z_{p+}(gamma, E) with plain sums.
inline std::int64_t lambda_set_count_plus(const std::vector<std::int64_t>& E, int p, std::int64_t gamma) {
    const auto c = detail::representation_counts(E, p, true);
    auto it = c.find(gamma);
    return it == c.end() ? 0 : it->second;
}

/// Z_+(E) = max over gamma of Z_{p+}(gamma, E).
inline std::int64_t lambda_set_Z_plus(const std::vector<std::int64_t>& E, int p) {
    std::int64_t z = 0;
    for (const auto& [g, c] : detail::representation_counts(E, p, true)) z = std::max(z, c);
    return z;
}

struct LacunaryReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::int64_t Z = 0;
    bool plain_sums = false;

    bool holds(double slack = 1e-9) const { return ratio <= 1.0 + slack; }
};

/// || sum_{t in E} b(t) e^{it.} ||_(p) <= ((4 Z(E))^{1/p} + (9 pi / 8) p) || sum b(t) (x) b(t)-bar ||^{1/2}
/// on the circle; with plain_sums = true, Z_+(E) replaces Z(E).
inline LacunaryReport lacunary_khintchine_check(const std::vector<std::int64_t>& E,
                                                const std::vector<ComplexMatrix>& bs, int p,
                                                bool plain_sums = false) {
    require_even(p, "lacunary_khintchine_check");
    require(!E.empty() && E.size() == bs.size(), "lacunary_khintchine_check: need one b(t) per t in E");
    const auto d = static_cast<std::size_t>(bs.front().rows());
    torus::TrigPolynomial f(d);
    ComplexMatrix oh = ComplexMatrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    for (std::size_t k = 0; k < E.size(); ++k) {
        require(std::abs(E[k]) < (std::int64_t{1} << 20), "lacunary_khintchine_check: frequency too large");
        f.add(static_cast<int>(E[k]), bs[k]);
        oh += linalg::kron(bs[k], bs[k].conjugate());
    }
    LacunaryReport r;
    r.plain_sums = plain_sums;
    r.Z = plain_sums ? lambda_set_Z_plus(E, p) : lambda_set_Z(E, p);
    r.lhs = torus::torus_lambda_norm(f, p);
    r.rhs = (std::pow(4.0 * static_cast<double>(r.Z), 1.0 / p) + 9.0 * std::numbers::pi / 8.0 * p) *
            std::sqrt(linalg::spectral_norm(oh));
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    return r;
}

}  // namespace opspace::partitions
