// opspace: experiment driver over the header-only library.
//
// Exit codes: 0 ok, 1 inequality violation found, 2 invalid arguments,
// 3 dimension guard tripped, 4 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opspace/experiments.hpp"
#include "opspace/lambda.hpp"
#include "opspace/martingale.hpp"
#include "opspace/nc.hpp"
#include "opspace/partitions.hpp"
#include "opspace/randmat.hpp"
#include "opspace/torus.hpp"

using json = nlohmann::ordered_json;
using namespace opspace;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    int p = 4;
    int dim = 2;
    int n = 3;
    int levels = 3;
    std::uint64_t seed = 1;
    std::size_t samples = 10000;
    std::size_t instances = 10;
    double tol = 1e-9;
    std::string out;
    std::string format = "json";
    std::size_t max_dim = 0;
    bool timing = false;
};

struct Output {
    json params = json::object();
    json results = json::array();
    json violations = json::array();

    void violation(json v) { violations.push_back(std::move(v)); }
};

json common_params(const Common& c) {
    return {{"p", c.p},           {"dim", c.dim},       {"n", c.n},          {"levels", c.levels},
            {"seed", c.seed},     {"samples", c.samples}, {"instances", c.instances}, {"tol", c.tol}};
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--p", c.p, "exponent (even)")->capture_default_str();
    sub->add_option("--dim", c.dim, "operator dimension")->check(CLI::Range(1, 64))->capture_default_str();
    sub->add_option("--n", c.n, "size parameter (atoms, matrix size, degree)")->check(CLI::Range(1, 4096))->capture_default_str();
    sub->add_option("--levels", c.levels, "filtration depth or coefficient count")->check(CLI::Range(1, 16))->capture_default_str();
    sub->add_option("--seed", c.seed, "root seed")->capture_default_str();
    sub->add_option("--samples", c.samples, "Monte-Carlo sample count")->capture_default_str();
    sub->add_option("--instances", c.instances, "random instances")->capture_default_str();
    sub->add_option("--tol", c.tol, "relative slack for inequality checks")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--max-dim", c.max_dim, "dimension guard (overrides OPSPACE_MAX_DIM)");
    sub->add_flag("--timing", c.timing, "record wall-clock time in the manifest");
}

std::uint64_t instance_seed(const Common& c, std::size_t i) { return split_seed(c.seed, i); }

// ---- matrix input --------------------------------------------------------------

cplx parse_entry(const json& e) {
    if (e.is_number()) return e.get<double>();
    require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
            "input: matrix entries must be numbers or [re, im] pairs");
    return {e[0].get<double>(), e[1].get<double>()};
}

ComplexMatrix parse_matrix(const json& m) {
    require(m.is_array() && !m.empty() && m[0].is_array(), "input: a matrix is an array of rows");
    const auto rows = static_cast<Eigen::Index>(m.size()), cols = static_cast<Eigen::Index>(m[0].size());
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        require(m[static_cast<std::size_t>(i)].is_array() && static_cast<Eigen::Index>(m[static_cast<std::size_t>(i)].size()) == cols,
                "input: ragged matrix");
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = parse_entry(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open input file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("input: ") + e.what());
    }
}

// ---- subcommands ---------------------------------------------------------------

void cmd_norms(const Common& c, const std::string& input, bool nc_mode, Output& o) {
    require_even(c.p, "norms");
    o.params["input"] = input;
    o.params["nc"] = nc_mode;
    std::function<double(int)> norm;
    if (!input.empty()) {
        const json j = read_json_file(input);
        const std::string type = j.value("type", "field");
        if (type == "field") {
            require(j.contains("values"), "input: field needs \"values\"");
            std::vector<ComplexMatrix> vals;
            for (const auto& m : j["values"]) vals.push_back(parse_matrix(m));
            std::vector<double> w = j.contains("weights") ? j["weights"].get<std::vector<double>>()
                                                          : std::vector<double>(vals.size(), 1.0 / static_cast<double>(vals.size()));
            const comm::MatrixField f(comm::FiniteMeasureSpace(w), vals);
            norm = [f](int p) { return comm::lambda_norm(f, p); };
        } else if (type == "nc") {
            require(j.contains("terms"), "input: nc element needs \"terms\"");
            std::vector<std::pair<ComplexMatrix, ComplexMatrix>> terms;
            for (const auto& t : j["terms"]) terms.emplace_back(parse_matrix(t.at("b")), parse_matrix(t.at("x")));
            const nc::NcElement f = nc::NcElement::from_terms(terms, j.value("trace_weight", 0.0));
            norm = [f](int p) { return nc::nc_lambda_norm(f, p); };
        } else {
            throw DomainError("input: type must be \"field\" or \"nc\"");
        }
    } else {
        Rng rng(c.seed);
        if (nc_mode) {
            const auto f = nc::NcElement::random(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(c.n), rng);
            norm = [f](int p) { return nc::nc_lambda_norm(f, p); };
        } else {
            const auto f = comm::MatrixField::random(comm::FiniteMeasureSpace::uniform(static_cast<std::size_t>(c.n)),
                                                     static_cast<std::size_t>(c.dim), rng);
            norm = [f](int p) { return comm::lambda_norm(f, p); };
        }
    }
    for (int p = 2; p <= c.p; p += 2) o.results.push_back({{"p", p}, {"norm", norm(p)}});
}

void cmd_burkholder(const Common& c, Output& o) {
    require_even(c.p, "burkholder");
    const martingale::DyadicSpace dy(c.levels);
    const auto fil = dy.filtration();
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = comm::MatrixField::random(dy.space(), static_cast<std::size_t>(c.dim), rng);
        const auto r = martingale::burkholder_experiment(f, fil, c.p);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"x", r.x}, {"y", r.y},
                             {"x_over_y", r.x_over_y}, {"y_over_x", r.y_over_x}, {"max_ratio", r.max_ratio()}});
        const double bound = martingale::kBurkholderP4Bound;
        if (c.p == 4 && r.max_ratio() > bound + c.tol * bound)
            o.violation({{"instance", i}, {"seed", instance_seed(c, i)}, {"max_ratio", r.max_ratio()}, {"bound", bound}});
    }
}

void cmd_doob_stein(const Common& c, bool stein, Output& o) {
    require_even(c.p, stein ? "stein" : "dualdoob");
    const int m = c.p / 2;
    o.params["m"] = m;
    const martingale::DyadicSpace dy(c.levels);
    const auto fil = dy.filtration();
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        std::vector<comm::MatrixField> xs;
        for (int k = 0; k < c.levels; ++k) xs.push_back(comm::MatrixField::random(dy.space(), static_cast<std::size_t>(c.dim), rng));
        const auto r = stein ? martingale::stein_check(xs, fil, m) : martingale::dual_doob_check(xs, fil, m);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
        if (!r.holds(c.tol)) o.violation({{"instance", i}, {"seed", instance_seed(c, i)}, {"ratio", r.ratio}, {"inequality", r.inequality}});
    }
}

void cmd_rosenthal(const Common& c, Output& o) {
    const martingale::DyadicSpace dy(c.levels);
    const auto fil = dy.filtration();
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = comm::MatrixField::random(dy.space(), static_cast<std::size_t>(c.dim), rng);
        const auto r = martingale::rosenthal_bracket(f, fil, c.p);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"norm", r.norm}, {"sigma_term", r.sigma_term},
                             {"diagonal_term", r.diagonal_term}, {"bracket", r.bracket}, {"ratio", r.ratio}});
    }
}

void cmd_hilbert(const Common& c, Output& o) {
    require_even(c.p, "hilbert");
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = torus::TrigPolynomial::random(c.n, static_cast<std::size_t>(c.dim), rng);
        const auto g = torus::TrigPolynomial::random(c.n, static_cast<std::size_t>(c.dim), rng);
        const auto h = torus::hilbert_cb_experiment(f, c.p);
        const auto cot = torus::cotlar_residual(f, g);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"norm_f", h.norm_f}, {"norm_Tf", h.norm_Tf},
                             {"ratio", h.ratio}, {"cotlar_residual", cot.worst()}, {"cotlar_scale", cot.scale}});
        if (!cot.holds(c.tol)) o.violation({{"instance", i}, {"seed", instance_seed(c, i)}, {"cotlar_residual", cot.worst()}});
    }
}

void cmd_lpaley(const Common& c, Output& o) {
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = torus::TrigPolynomial::random(c.n, static_cast<std::size_t>(c.dim), rng, false, true);
        const auto r = torus::littlewood_paley_check(f, c.p);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
    }
}

void cmd_khintchine(const Common& c, const std::string& kind, double q, Output& o) {
    o.params["kind"] = kind;
    if (kind == "rademacher") {
        for (std::size_t i = 0; i < c.instances; ++i) {
            Rng rng(instance_seed(c, i));
            std::vector<ComplexMatrix> bs;
            for (int k = 0; k < c.levels; ++k) bs.push_back(rng.gaussian_matrix(c.dim));
            const auto r = martingale::rademacher_khintchine(bs, c.p);
            o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"lhs", r.lhs}, {"rhs", r.rhs},
                                 {"ratio", r.rhs > 0.0 ? r.lhs / r.rhs : 0.0}, {"constant", r.constant}});
            if (!r.lower_holds(c.tol) || !r.upper_holds(c.tol))
                o.violation({{"instance", i}, {"seed", instance_seed(c, i)}, {"lhs", r.lhs}, {"rhs", r.rhs}});
        }
        return;
    }
    partitions::MomentFunction psi = partitions::MomentFunction::gaussian();
    if (kind == "q-gaussian") {
        o.params["q"] = q;
        psi = partitions::MomentFunction::q_gaussian(q);
    } else if (kind == "free") {
        psi = partitions::MomentFunction::free();
    } else if (kind == "spin") {
        psi = partitions::MomentFunction::spin();
    }
    require_even(c.p, "khintchine");
    for (int p = 2; p <= c.p; p += 2)
        o.results.push_back({{"p", p}, {"moment", partitions::khintchine_moment(psi, p)},
                             {"constant", partitions::khintchine_constant(psi, p)}});
}

void cmd_randmat(const Common& c, const std::string& mode, Output& o) {
    o.params["mode"] = mode;
    require_even(c.p, "randmat");
    if (mode == "exact") {
        for (int p = 2; p <= c.p; p += 2) o.results.push_back({{"N", c.n}, {"p", p}, {"moment", randmat::moment_exact(c.n, p)}});
    } else if (mode == "mc") {
        const auto e = randmat::moment_mc({c.n, c.seed}, c.p, c.samples);
        const double exact = randmat::moment_exact(c.n, c.p);
        const double z = e.stderr_ > 0.0 ? (e.estimate - exact) / e.stderr_ : 0.0;
        o.results.push_back({{"N", c.n}, {"p", c.p}, {"estimate", e.estimate}, {"stderr", e.stderr_}, {"exact", exact}, {"z", z}});
        if (!e.consistent_with(exact, 4.0)) o.violation({{"z", z}, {"message", "Monte-Carlo estimate more than 4 standard errors from exact"}});
    } else {
        for (int N = 1; N <= c.n; N *= 2)
            o.results.push_back({{"N", N}, {"p", c.p}, {"constant", randmat::rm_khintchine_constant(N, c.p)}});
        o.results.push_back({{"N", "inf"}, {"p", c.p},
                             {"constant", std::pow(static_cast<double>(partitions::catalan(c.p / 2)), 1.0 / c.p)}});
    }
}

void cmd_mobius(const Common& c, bool decomposition, Output& o) {
    o.params["decomposition"] = decomposition;
    if (decomposition) {
        for (std::size_t i = 0; i < c.instances; ++i) {
            const auto r = partitions::mobius_decomposition_check(c.n, c.levels, instance_seed(c, i), c.dim);
            o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"residual", r.residual}, {"scale", r.scale}});
            if (r.residual > 1e-10 * r.scale) o.violation({{"instance", i}, {"residual", r.residual}});
        }
        return;
    }
    require(c.n <= 10, "mobius: n must be <= 10");
    std::uint64_t fact = 1;
    for (int k = 1; k <= c.n; ++k) {
        fact *= static_cast<std::uint64_t>(k);
        std::uint64_t count = 0, sum_abs = 0;
        partitions::for_each_partition_labels(k, [&](const std::vector<int>& labels) {
            ++count;
            sum_abs += static_cast<std::uint64_t>(std::llabs(partitions::mobius(partitions::SetPartition::from_labels(labels))));
        });
        o.results.push_back({{"n", k}, {"partitions", count}, {"sum_abs_mobius", sum_abs}, {"factorial", fact}});
        if (sum_abs != fact) o.violation({{"n", k}, {"sum_abs_mobius", sum_abs}, {"factorial", fact}});
    }
}

void cmd_lacunary(const Common& c, std::vector<std::int64_t> E, bool plain, Output& o) {
    if (E.empty())
        for (int k = 0; k < c.levels; ++k) E.push_back(std::int64_t{1} << (2 * k));
    o.params["E"] = E;
    o.params["plain_sums"] = plain;
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        std::vector<ComplexMatrix> bs;
        for (std::size_t k = 0; k < E.size(); ++k) bs.push_back(rng.gaussian_matrix(c.dim));
        const auto r = partitions::lacunary_khintchine_check(E, bs, c.p, plain);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}, {"Z", r.Z}});
        if (!r.holds(c.tol)) o.violation({{"instance", i}, {"ratio", r.ratio}});
    }
}

void cmd_cb_limit(const Common& c, Output& o) {
    const int m_max = std::min(c.levels, 6);
    o.params["m_max"] = m_max;
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = nc::NcElement::random(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(c.n), rng);
        const auto r = nc::cb_oh_limit(f, m_max);
        for (std::size_t k = 0; k < r.ps.size(); ++k)
            o.results.push_back({{"instance", i}, {"p", r.ps[k]}, {"value", r.values[k]}, {"guard_required", 0}});
        if (r.guard_tripped_at)
            o.results.push_back({{"instance", i}, {"p", r.guard_tripped_at}, {"value", nullptr}, {"guard_required", r.guard_required}});
        if (!r.nondecreasing(c.tol)) o.violation({{"instance", i}, {"message", "sequence decreased"}});
    }
}

std::vector<nc::BlockSubalgebra> dyadic_chain(std::size_t n) {
    // scalars on ever finer halvings, then the diagonal, then all of M_n
    std::vector<nc::BlockSubalgebra> chain;
    std::vector<std::size_t> sizes{n};
    while (true) {
        chain.push_back(nc::BlockSubalgebra::from_sizes(sizes, nc::BlockKind::scalar));
        std::vector<std::size_t> next;
        bool split = false;
        for (auto s : sizes) {
            if (s > 1) {
                next.push_back(s - s / 2);
                next.push_back(s / 2);
                split = true;
            } else {
                next.push_back(s);
            }
        }
        if (!split) break;
        sizes = std::move(next);
    }
    if (n > 1) chain.push_back(nc::BlockSubalgebra::full(n));
    return chain;
}

void cmd_nc_burkholder4(const Common& c, Output& o) {
    const auto chain = dyadic_chain(static_cast<std::size_t>(c.n));
    o.params["chain_length"] = chain.size();
    for (std::size_t i = 0; i < c.instances; ++i) {
        Rng rng(instance_seed(c, i));
        const auto f = nc::NcElement::random(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(c.n), rng);
        const auto r = nc::nc_burkholder4(f, chain);
        o.results.push_back({{"instance", i}, {"seed", instance_seed(c, i)}, {"norm", r.norm}, {"square", r.square},
                             {"diagonal", r.diagonal}, {"sigma_r", r.sigma_r}, {"sigma_c", r.sigma_c}, {"bracket", r.bracket},
                             {"square_ratio", r.square_ratio()}, {"bracket_ratio", r.bracket_ratio()}});
    }
}

void cmd_fuzz(const Common& c, const std::string& target, int atoms, Output& o) {
    o.params["target"] = target;
    o.params["atoms"] = atoms;
    std::vector<experiments::Target> targets;
    if (target == "all") {
        targets.assign(experiments::kAllTargets.begin(), experiments::kAllTargets.end());
    } else {
        const auto t = experiments::parse_target(target);
        require(t.has_value(), "fuzz: unknown target " + target);
        targets.push_back(*t);
    }
    experiments::TrialOptions opt;
    opt.p = c.p;
    opt.max_dim = c.dim;
    opt.max_n = c.n;
    opt.max_levels = c.levels;
    opt.max_atoms = atoms;
    opt.slack = c.tol;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const auto name = experiments::target_name(targets[ti]);
        const auto trials = experiments::run_campaign(targets[ti], split_seed(c.seed, ti), c.instances, opt);
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            o.results.push_back({{"target", name}, {"instance", i}, {"seed", t.seed}, {"params", t.params},
                                 {"lhs", t.lhs}, {"rhs", t.rhs}, {"ratio", t.ratio}, {"ok", t.ok}});
            if (!t.ok) o.violation({{"target", name}, {"seed", t.seed}, {"params", t.params}, {"lhs", t.lhs}, {"rhs", t.rhs}});
        }
    }
}

// ---- output --------------------------------------------------------------------

std::string csv_cell(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (v.is_null()) return "";
    return v.dump();
}

std::string render(const json& doc, const std::string& format) {
    if (format == "json") return doc.dump(2) + "\n";
    std::ostringstream os;
    os << "# manifest " << doc["manifest"].dump() << "\n";
    os << "# violations " << doc["violations"].size() << "\n";
    const auto& rows = doc["results"];
    std::vector<std::string> cols;
    for (const auto& r : rows)
        for (const auto& [k, _] : r.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << (r.contains(cols[i]) ? csv_cell(r[cols[i]]) : "");
        os << "\n";
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opspace: operator-space Lp experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::map<std::string, Common> common;
    std::map<std::string, std::function<void(const Common&, Output&)>> handlers;
    auto sub = [&](const std::string& name, const std::string& help, int default_p = 4) {
        CLI::App* s = app.add_subcommand(name, help);
        common[name].p = default_p;
        add_common(s, common[name]);
        return s;
    };

    std::string norms_input;
    bool norms_nc = false;
    auto* s = sub("norms", "Lambda_p norms of a supplied or random element for p = 2, 4, .., --p");
    s->add_option("--input", norms_input, "JSON file with a field or nc element")->check(CLI::ExistingFile);
    s->add_flag("--nc", norms_nc, "random element of B (x) M_n instead of a field");
    handlers["norms"] = [&](const Common& c, Output& o) { cmd_norms(c, norms_input, norms_nc, o); };

    sub("burkholder", "||f||_(p) against the square function on dyadic martingales");
    handlers["burkholder"] = [](const Common& c, Output& o) { cmd_burkholder(c, o); };
    sub("dualdoob", "dual Doob inequality with m = p/2", 2);
    handlers["dualdoob"] = [](const Common& c, Output& o) { cmd_doob_stein(c, false, o); };
    sub("stein", "Stein inequality with m = p/2", 2);
    handlers["stein"] = [](const Common& c, Output& o) { cmd_doob_stein(c, true, o); };
    sub("rosenthal", "norm against the conditioned-square plus diagonal bracket (p divisible by 4)");
    handlers["rosenthal"] = [](const Common& c, Output& o) { cmd_rosenthal(c, o); };
    sub("hilbert", "Hilbert transform ratios and Cotlar residuals on degree --n polynomials");
    handlers["hilbert"] = [](const Common& c, Output& o) { cmd_hilbert(c, o); };
    sub("lpaley", "Littlewood-Paley ratios on analytic degree --n polynomials");
    handlers["lpaley"] = [](const Common& c, Output& o) { cmd_lpaley(c, o); };

    std::string kh_kind;
    double kh_q = 0.0;
    s = sub("khintchine", "Khintchine constants and Rademacher sums");
    s->add_option("kind", kh_kind, "rademacher | gaussian-const | q-gaussian | free | spin")
        ->required()
        ->check(CLI::IsMember({"rademacher", "gaussian-const", "q-gaussian", "free", "spin"}));
    s->add_option("--q", kh_q, "q for the q-Gaussian kind")->check(CLI::Range(-1.0, 1.0));
    handlers["khintchine"] = [&](const Common& c, Output& o) { cmd_khintchine(c, kh_kind, kh_q, o); };

    std::string rm_mode;
    s = sub("randmat", "Ginibre trace moments (N = --n)", 6);
    s->add_option("mode", rm_mode, "exact | mc | constant")->required()->check(CLI::IsMember({"exact", "mc", "constant"}));
    handlers["randmat"] = [&](const Common& c, Output& o) { cmd_randmat(c, rm_mode, o); };

    bool mob_decomp = false;
    s = sub("mobius", "sum of |mu(0, pi)| over partitions of k <= --n, or the decomposition identity");
    s->add_flag("--sum-abs", "tabulate the sum of |mu| (default)");
    s->add_flag("--decomposition", mob_decomp, "check the Moebius decomposition on random multilinear data (|I| = --levels)");
    handlers["mobius"] = [&](const Common& c, Output& o) { cmd_mobius(c, mob_decomp, o); };

    std::vector<std::int64_t> lac_E;
    bool lac_plain = false;
    s = sub("lacunary", "Khintchine bound for lacunary frequency sets");
    s->add_option("--E", lac_E, "frequencies (default 1, 4, 16, ..)")->delimiter(',');
    s->add_flag("--plain-sums", lac_plain, "count representations by plain sums");
    handlers["lacunary"] = [&](const Common& c, Output& o) { cmd_lacunary(c, lac_E, lac_plain, o); };

    sub("cb-limit", "||f||_(2^m) for m = 1..--levels on random elements of B (x) M_n");
    handlers["cb-limit"] = [](const Common& c, Output& o) { cmd_cb_limit(c, o); };
    sub("nc-burkholder4", "p = 4 square function and bracket for matrix martingales");
    handlers["nc-burkholder4"] = [](const Common& c, Output& o) { cmd_nc_burkholder4(c, o); };

    std::string fz_target = "all";
    int fz_atoms = 4;
    s = sub("fuzz", "random inequality campaigns (--p 0 draws p per instance)", 0);
    s->add_option("--target", fz_target, "target name or all")->capture_default_str();
    s->add_option("--atoms", fz_atoms, "largest number of atoms")->check(CLI::Range(1, 64))->capture_default_str();
    handlers["fuzz"] = [&](const Common& c, Output& o) { cmd_fuzz(c, fz_target, fz_atoms, o); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const Common& c = common[name];
    if (c.max_dim > 0) setenv("OPSPACE_MAX_DIM", std::to_string(c.max_dim).c_str(), 1);

    Output o;
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        handlers[name](c, o);
    } catch (const DimensionGuardError& e) {
        std::cerr << "dimension guard: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest = {{"subcommand", name}, {"parameters", common_params(c)}, {"seed", c.seed},
                     {"tolerance", c.tol}, {"version", kVersion}, {"max_dim", max_dim()}};
    for (const auto& [k, v] : o.params.items()) manifest["parameters"][k] = v;
    if (c.timing) manifest["wall_clock_s"] = wall;
    const json doc = {{"manifest", manifest}, {"results", o.results}, {"violations", o.violations}};
    if (!o.violations.empty()) code = 1;

    const std::string text = render(doc, c.format);
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!f) {
            std::cerr << "cannot write " << c.out << "\n";
            return 2;
        }
        f << text;
    }
    return code;
}
