#pragma once

// Seeded random instances of the inequalities, one trial per seed. Shared by the
// fuzzing subcommand of the CLI and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lambda.hpp"
#include "martingale.hpp"
#include "nc.hpp"
#include "ordercone.hpp"
#include "random.hpp"
#include "torus.hpp"

namespace opspace::experiments {

enum class Target {
    holder,
    cauchy_schwarz,
    nc_holder,
    nc_cauchy_schwarz,
    order_cone,
    burkholder4,
    dual_doob,
    stein,
    contraction,
    nc_contraction,
    cotlar,
    quadrature,
    p_orthogonality,
};

inline constexpr std::array kAllTargets{
    Target::holder,       Target::cauchy_schwarz, Target::nc_holder,      Target::nc_cauchy_schwarz,
    Target::order_cone,   Target::burkholder4,    Target::dual_doob,      Target::stein,
    Target::contraction,  Target::nc_contraction, Target::cotlar,         Target::quadrature,
    Target::p_orthogonality,
};

inline std::string target_name(Target t) {
    switch (t) {
        case Target::holder: return "holder";
        case Target::cauchy_schwarz: return "cauchy-schwarz";
        case Target::nc_holder: return "nc-holder";
        case Target::nc_cauchy_schwarz: return "nc-cauchy-schwarz";
        case Target::order_cone: return "order-cone";
        case Target::burkholder4: return "burkholder4";
        case Target::dual_doob: return "dual-doob";
        case Target::stein: return "stein";
        case Target::contraction: return "contraction";
        case Target::nc_contraction: return "nc-contraction";
        case Target::cotlar: return "cotlar";
        case Target::quadrature: return "quadrature";
        case Target::p_orthogonality: return "p-orthogonality";
    }
    return "?";
}

inline std::optional<Target> parse_target(const std::string& s) {
    for (auto t : kAllTargets)
        if (target_name(t) == s) return t;
    return std::nullopt;
}

struct TrialOptions {
    /// 0 draws p (or m = p/2) from the target's default set
    int p = 0;
    /// upper bounds for randomly drawn sizes
    int max_dim = 3;
    int max_atoms = 4;
    int max_n = 3;
    int max_levels = 3;
    /// the trial passes when lhs <= rhs + slack * max(1, rhs)
    double slack = 1e-9;
};

/// One random instance of lhs <= rhs.
struct Trial {
    Target target{};
    std::uint64_t seed = 0;
    std::string params;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool ok = true;
};

namespace detail {

inline int pick(Rng& rng, std::initializer_list<int> xs) {
    const int i = rng.uniform_int(0, static_cast<int>(xs.size()) - 1);
    return *(xs.begin() + i);
}

inline comm::FiniteMeasureSpace random_space(Rng& rng, int max_atoms) {
    const int n = rng.uniform_int(1, max_atoms);
    std::vector<double> w(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& x : w) s += (x = 0.1 + rng.uniform());
    for (auto& x : w) x /= s;
    return comm::FiniteMeasureSpace(std::move(w));
}

inline comm::AtomPartition random_atom_partition(Rng& rng, std::size_t atoms) {
    const int k = rng.uniform_int(1, static_cast<int>(atoms));
    std::vector<std::vector<std::size_t>> blocks(static_cast<std::size_t>(k));
    for (std::size_t a = 0; a < atoms; ++a) blocks[static_cast<std::size_t>(rng.uniform_int(0, k - 1))].push_back(a);
    comm::AtomPartition out;
    for (auto& b : blocks)
        if (!b.empty()) out.push_back(std::move(b));
    return out;
}

inline nc::BlockSubalgebra random_block_subalgebra(Rng& rng, std::size_t n) {
    std::vector<nc::BlockSubalgebra::Block> blocks;
    std::size_t pos = 0;
    while (pos < n) {
        const auto size = static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(n - pos)));
        blocks.push_back({pos, size, rng.uniform_int(0, 1) ? nc::BlockKind::full : nc::BlockKind::scalar});
        pos += size;
    }
    return nc::BlockSubalgebra(n, std::move(blocks));
}

/// sum_k A_k (x) conj(A_k) on K (x) K-bar, K = C^{d_1} (x) ... (x) C^{d_m}.
inline ordercone::PairedTensor random_cone_element(Rng& rng, const std::vector<std::size_t>& kdims, int terms) {
    std::size_t d = 1;
    for (auto k : kdims) d *= k;
    std::vector<std::size_t> slots = kdims;
    slots.insert(slots.end(), kdims.begin(), kdims.end());
    const auto D = static_cast<Eigen::Index>(d);
    ComplexMatrix v = ComplexMatrix::Zero(D * D, D * D);
    for (int t = 0; t < terms; ++t) {
        const ComplexMatrix A = rng.gaussian_matrix(D);
        v += linalg::kron(A, A.conjugate());
    }
    return ordercone::PairedTensor(v, slots, ordercone::Pairing::standard(kdims.size()));
}

inline std::string describe(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

}  // namespace detail

/// Draws and evaluates one instance of `target` from `seed`.
inline Trial run_trial(Target target, std::uint64_t seed, const TrialOptions& opt = {}) {
    using detail::describe;
    using detail::pick;
    Rng rng(seed);
    Trial t;
    t.target = target;
    t.seed = seed;
    auto finish = [&](const RatioReport& r) {
        t.lhs = r.lhs;
        t.rhs = r.rhs;
        t.ratio = r.ratio;
    };
    const auto dim = [&] { return static_cast<std::size_t>(rng.uniform_int(1, opt.max_dim)); };

    switch (target) {
        case Target::holder: {
            const int p = opt.p ? opt.p : pick(rng, {2, 4, 6});
            const auto sp = detail::random_space(rng, opt.max_atoms);
            const auto d = dim();
            std::vector<comm::MatrixField> fs;
            for (int k = 0; k < p; ++k) fs.push_back(comm::MatrixField::random(sp, d, rng));
            finish(comm::holder_check(fs, p));
            t.params = describe({{"p", p}, {"atoms", double(sp.size())}, {"dim", double(d)}});
            break;
        }
        case Target::cauchy_schwarz: {
            const auto sp = detail::random_space(rng, opt.max_atoms);
            const auto d = dim();
            const auto f = comm::MatrixField::random(sp, d, rng), g = comm::MatrixField::random(sp, d, rng);
            finish(comm::cauchy_schwarz_check(f, g));
            t.params = describe({{"atoms", double(sp.size())}, {"dim", double(d)}});
            break;
        }
        case Target::nc_holder: {
            const int p = opt.p ? opt.p : pick(rng, {2, 4, 6});
            const auto d = dim();
            const auto n = static_cast<std::size_t>(rng.uniform_int(1, opt.max_n));
            std::vector<nc::NcElement> fs;
            for (int k = 0; k < p; ++k) fs.push_back(nc::NcElement::random(d, n, rng));
            finish(nc::nc_holder_check(fs));
            t.params = describe({{"p", p}, {"n", double(n)}, {"dim", double(d)}});
            break;
        }
        case Target::nc_cauchy_schwarz: {
            const auto d = dim();
            const auto n = static_cast<std::size_t>(rng.uniform_int(1, opt.max_n));
            const int terms = rng.uniform_int(1, 3);
            std::vector<nc::NcElement> fs, gs;
            for (int k = 0; k < terms; ++k) {
                fs.push_back(nc::NcElement::random(d, n, rng));
                gs.push_back(nc::NcElement::random(d, n, rng));
            }
            finish(nc::state_cauchy_schwarz_check(fs, gs));
            t.params = describe({{"terms", terms}, {"n", double(n)}, {"dim", double(d)}});
            break;
        }
        case Target::order_cone: {
            const int m = rng.uniform_int(1, 2);
            std::vector<std::size_t> kd;
            for (int j = 0; j < m; ++j) kd.push_back(static_cast<std::size_t>(rng.uniform_int(1, 2)));
            const auto x = detail::random_cone_element(rng, kd, rng.uniform_int(1, 3));
            const auto y = x + detail::random_cone_element(rng, kd, rng.uniform_int(1, 2));
            t.lhs = ordercone::spectral_norm(x);
            t.rhs = ordercone::spectral_norm(y);
            t.ratio = t.rhs > 0.0 ? t.lhs / t.rhs : 0.0;
            t.params = describe({{"m", m}});
            t.ok = t.lhs <= t.rhs + 1e-8;
            return t;
        }
        case Target::burkholder4: {
            const int N = rng.uniform_int(1, opt.max_levels);
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const martingale::DyadicSpace dy(N);
            const auto f = comm::MatrixField::random(dy.space(), d, rng);
            const auto r = martingale::burkholder_experiment(f, dy.filtration(), 4);
            t.lhs = r.max_ratio();
            t.rhs = martingale::kBurkholderP4Bound;
            t.ratio = t.lhs / t.rhs;
            t.params = describe({{"levels", N}, {"dim", double(d)}, {"x", r.x}, {"y", r.y}});
            break;
        }
        case Target::dual_doob:
        case Target::stein: {
            const int m = opt.p ? opt.p / 2 : rng.uniform_int(1, 2);
            const int N = rng.uniform_int(1, opt.max_levels);
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const martingale::DyadicSpace dy(N);
            const int count = rng.uniform_int(1, N);
            std::vector<comm::MatrixField> xs;
            for (int k = 0; k < count; ++k) xs.push_back(comm::MatrixField::random(dy.space(), d, rng));
            finish(target == Target::dual_doob ? martingale::dual_doob_check(xs, dy.filtration(), m)
                                               : martingale::stein_check(xs, dy.filtration(), m));
            t.params = describe({{"m", m}, {"levels", N}, {"fields", count}, {"dim", double(d)}});
            break;
        }
        case Target::contraction: {
            const int p = opt.p ? opt.p : pick(rng, {2, 4});
            const auto sp = detail::random_space(rng, opt.max_atoms);
            const auto d = dim();
            const auto f = comm::MatrixField::random(sp, d, rng);
            const auto blocks = detail::random_atom_partition(rng, sp.size());
            t.lhs = comm::lambda_norm(comm::conditional_expectation(f, blocks), p);
            t.rhs = comm::lambda_norm(f, p);
            t.ratio = t.rhs > 0.0 ? t.lhs / t.rhs : 0.0;
            t.params = describe({{"p", p}, {"atoms", double(sp.size())}, {"blocks", double(blocks.size())}, {"dim", double(d)}});
            break;
        }
        case Target::nc_contraction: {
            const int p = opt.p ? opt.p : pick(rng, {2, 4});
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const auto n = static_cast<std::size_t>(rng.uniform_int(1, opt.max_n));
            const auto f = nc::NcElement::random(d, n, rng);
            const auto alg = detail::random_block_subalgebra(rng, n);
            t.lhs = nc::nc_lambda_norm(nc::nc_conditional_expectation(f, alg), p);
            t.rhs = nc::nc_lambda_norm(f, p);
            t.ratio = t.rhs > 0.0 ? t.lhs / t.rhs : 0.0;
            t.params = describe({{"p", p}, {"n", double(n)}, {"dim", double(d)}});
            break;
        }
        case Target::cotlar: {
            const int deg = rng.uniform_int(0, 4);
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const auto f = torus::TrigPolynomial::random(deg, d, rng);
            const auto g = torus::TrigPolynomial::random(rng.uniform_int(0, 4), d, rng);
            const auto h = torus::TrigPolynomial::random(std::max(deg, 1), d, rng, true);
            const double involution = (torus::hilbert_transform(torus::hilbert_transform(h)) + h).max_coeff_entry();
            t.lhs = std::max(torus::cotlar_residual(f, g).worst(), involution);
            t.rhs = 1e-10;
            t.ratio = t.lhs / t.rhs;
            t.params = describe({{"deg", deg}, {"dim", double(d)}});
            t.ok = t.lhs <= t.rhs;
            return t;
        }
        case Target::quadrature: {
            const int p = opt.p ? opt.p : pick(rng, {2, 4, 6});
            const int deg = rng.uniform_int(1, 4);
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const auto f = torus::TrigPolynomial::random(deg, d, rng);
            const double a = torus::torus_lambda_norm(f, p);
            const double b = torus::torus_lambda_norm(f, p, 2 * torus::exact_nodes(f, p));
            t.lhs = std::abs(a - b) / std::max(1.0, a);
            t.rhs = 1e-12;
            t.ratio = t.lhs / t.rhs;
            t.params = describe({{"p", p}, {"deg", deg}, {"dim", double(d)}, {"norm", a}});
            t.ok = t.lhs <= t.rhs;
            return t;
        }
        case Target::p_orthogonality: {
            const int p = opt.p ? opt.p : 4;
            const int N = rng.uniform_int(std::max(1, p - 1), std::max(p, opt.max_levels));
            const auto d = static_cast<std::size_t>(rng.uniform_int(1, std::min(opt.max_dim, 2)));
            const martingale::DyadicSpace dy(N);
            const auto f = comm::MatrixField::random(dy.space(), d, rng);
            const auto r = martingale::p_orthogonality_check(martingale::martingale_differences(f, dy.filtration()), p);
            t.lhs = r.lhs;
            t.rhs = r.rhs;
            t.ratio = r.ratio;
            t.params = describe({{"p", p}, {"levels", N}, {"dim", double(d)}, {"words", double(r.words_checked)}});
            t.ok = r.is_p_orthogonal && r.holds(opt.slack);
            return t;
        }
    }
    t.ok = t.lhs <= t.rhs + opt.slack * std::max(1.0, t.rhs);
    return t;
}

/// Trials for seeds split_seed(root, 0 .. count-1).
inline std::vector<Trial> run_campaign(Target target, std::uint64_t root, std::size_t count, const TrialOptions& opt = {}) {
    std::vector<Trial> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(run_trial(target, split_seed(root, i), opt));
    return out;
}

}  // namespace opspace::experiments
