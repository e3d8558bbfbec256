#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcl/cli.hpp"
#include "pcl/errors.hpp"
#include "pcl/fft.hpp"
#include "pcl/lab.hpp"

namespace pcl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Config {
    std::string command;
    std::uint64_t limit = 1 << 20;
    int n = 16;
    std::int64_t Q = 2;
    std::string mode = "grh";
    double c = 1.0;
    double epsilon = 0.05;
    double alpha_cut = 1.0 / 400.0;
    int t = 2;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string cache;
    std::string out;
    std::string csv;
    std::string svg;
    std::string baseline;
    bool freeze = false;
    bool scaled = false;
    bool no_q_bound = false;

    // subcommand options
    std::string kind = "err";
    std::size_t samples = 33;
    std::vector<std::int64_t> qs{8, 16, 32, 64};
    bool sharpness = false;
    bool search = false;
    int nmin = 10;
    int nmax = 22;
    std::string strategy = "random-density";
    std::size_t trials = 100;
    std::size_t pairs = 300;
    bool s_sweep = false;
    bool low_check = false;
    std::int64_t xmax = 10000;
    std::string in;

    json echo() const {
        return {{"command", command}, {"limit", limit},         {"n", n},           {"Q", Q},
                {"mode", mode},       {"c", c},                 {"epsilon", epsilon}, {"alpha_cut", alpha_cut},
                {"t", t},             {"seed", seed},           {"scaled", scaled}, {"no_q_bound", no_q_bound},
                {"kind", kind},       {"samples", samples},     {"qs", qs},         {"sharpness", sharpness},
                {"search", search},   {"nmin", nmin},           {"nmax", nmax},     {"strategy", strategy},
                {"trials", trials},   {"pairs", pairs},         {"s_sweep", s_sweep}, {"low_check", low_check},
                {"xmax", xmax}};
    }

    multiplier::CutoffParams params() const {
        multiplier::CutoffParams p = scaled ? multiplier::scaled_grh_preset(Q) : multiplier::CutoffParams{};
        p.mode = multiplier::parse_mode(mode);
        p.c = c;
        p.epsilon = epsilon;
        if (!scaled) p.alpha_cut = alpha_cut;
        p.Q = Q;
        p.enforce_q_bound = !no_q_bound;
        return p;
    }

    std::uint64_t N() const { return std::uint64_t{1} << n; }
};

struct Outcome {
    json results = json::object();
    json metrics = json::object();
    Table plot;
    Table sidecar;
    std::string title;
};

fs::path cache_path(const Config& cfg) {
    const char* dir = std::getenv("PCL_CACHE_DIR");
    if (dir && *dir) return fs::path(dir) / (cfg.cache.empty() ? fs::path("pcl-sieve.bin") : fs::path(cfg.cache).filename());
    return cfg.cache;
}

struct TableHandle {
    std::shared_ptr<const ntheory::ArithmeticTables> tables;
    bool loaded = false;
    std::string path;
};

TableHandle acquire_tables(const Config& cfg, std::uint64_t need) {
    TableHandle h;
    const fs::path p = cache_path(cfg);
    h.path = p.string();
    if (!p.empty() && fs::exists(p)) {
        auto t = std::make_shared<ntheory::ArithmeticTables>(ntheory::load_tables(p));
        if (t->limit >= need) {
            h.tables = std::move(t);
            h.loaded = true;
            return h;
        }
    }
    h.tables = std::make_shared<ntheory::ArithmeticTables>(ntheory::build_tables(need));
    if (!p.empty()) ntheory::save_tables(*h.tables, p);
    return h;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

void validate(const Config& cfg) {
    require(cfg.n >= 1 && cfg.n <= 26, "--n must lie in [1, 26]");
    require(cfg.Q >= 1, "--Q must be positive");
    require(cfg.t >= 0 && cfg.t <= 2, "--t must be 0, 1 or 2");
    require(cfg.limit >= 2 && cfg.limit <= ntheory::kDefaultTableBudget, "--limit out of range");
    require(cfg.nmin >= 1 && cfg.nmax >= cfg.nmin && cfg.nmax <= 26, "--nmin/--nmax out of range");
    require(cfg.xmax >= 1 && cfg.xmax <= 10'000'000, "--xmax out of range");
    require(!cfg.freeze || !cfg.baseline.empty(), "--freeze-baseline needs --baseline");
    (void)multiplier::parse_mode(cfg.mode);
}

Outcome run_tables(const Config& cfg) {
    const auto h = acquire_tables(cfg, cfg.limit);
    Outcome o;
    const auto sum = ntheory::psi_checksum(*h.tables);
    o.results = {{"limit", h.tables->limit},
                 {"loaded_from_cache", h.loaded},
                 {"cache", h.path},
                 {"psi_checksum", sum},
                 {"psi_limit", h.tables->psi(h.tables->limit)}};
    o.metrics = {{"psi_checksum", static_cast<double>(sum)}, {"psi_limit", h.tables->psi(h.tables->limit)}};
    return o;
}

Outcome run_scan(const Config& cfg) {
    const auto p = cfg.params();
    const std::uint64_t N = cfg.N();
    Outcome o;
    if (cfg.kind == "err") {
        p.validate(N);
        const auto h = acquire_tables(cfg, N);
        const auto rep = lab::err_norm_scan(N, p, {}, h.tables);
        o.results = {{"kindA", rep.kindA},
                     {"kindB", rep.kindB},
                     {"N", rep.N},
                     {"Q", rep.Q},
                     {"mode", rep.mode},
                     {"sup", rep.sup},
                     {"argmax_xi", rep.argmax_xi},
                     {"grid_points", rep.grid_points},
                     {"refined_points", rep.refined_points},
                     {"curve_reference", rep.curve_reference},
                     {"curve_value", rep.curve_value},
                     {"fitted_constant", rep.fitted_constant}};
        o.metrics = {{"sup", rep.sup}};
        const multiplier::MultiplierModel A(multiplier::ModelKind::A_hat, N, p, {}, h.tables);
        const multiplier::MultiplierModel B(multiplier::ModelKind::B, N, p, {}, h.tables);
        const std::size_t M = 4 * N;
        const auto a = A.on_grid(M);
        const auto b = B.on_grid(M);
        const std::size_t bins = std::min<std::size_t>(1024, M);
        o.plot.columns = {"xi", "|diff|"};
        for (std::size_t k = 0; k < bins; ++k) {
            double m = 0.0;
            for (std::size_t j = k * M / bins; j < (k + 1) * M / bins; ++j) m = std::max(m, std::abs(a[j] - b[j]));
            o.plot.rows.push_back({(static_cast<double>(k) + 0.5) / static_cast<double>(bins), m});
        }
        o.sidecar.columns = {"q", "vinogradov"};
        for (int q = 1; q <= 64; ++q) o.sidecar.rows.push_back({double(q), multiplier::vinogradov_curve(q, N)});
        o.title = "sup |A_hat - B|, N = 2^" + std::to_string(cfg.n);
    } else if (cfg.kind == "major") {
        if (p.enforce_q_bound) p.validate(N);
        const auto h = acquire_tables(cfg, N);
        const auto r = lab::major_arc_error(N, cfg.Q, cfg.samples, {}, h.tables, p);
        o.results = {{"N", r.N},
                     {"Q", r.Q},
                     {"samples", r.samples},
                     {"max_error", r.max_error},
                     {"argmax_xi", r.argmax_xi},
                     {"error_at_zero", r.error_at_zero},
                     {"curve_grh", r.curve_grh},
                     {"curve_uncond", r.curve_uncond}};
        o.metrics = {{"max_error", r.max_error}};
    } else if (cfg.kind == "hi") {
        std::vector<std::uint64_t> Ns;
        for (int k = std::max(1, cfg.n - 2); k <= cfg.n; ++k) Ns.push_back(std::uint64_t{1} << k);
        const auto rows = lab::hi_norm_scan(cfg.qs, Ns, p, 4, 1024, cfg.seed);
        json arr = json::array();
        o.plot.columns = {"Q", "multiplier_sup", "norm_fixed", "norm_maximal", "curve_fixed", "curve_maximal"};
        for (const auto& r : rows) {
            arr.push_back({{"Q", r.Q},
                           {"hi_levels", {r.hi_first, r.hi_last}},
                           {"multiplier_sup", r.multiplier_sup},
                           {"norm_fixed", r.norm_fixed},
                           {"norm_maximal", r.norm_maximal},
                           {"curve_fixed", r.curve_fixed},
                           {"curve_maximal", r.curve_maximal},
                           {"fitted_constant", r.fitted_constant}});
            o.metrics["fitted_constant_Q" + std::to_string(r.Q)] = r.fitted_constant;
            o.plot.rows.push_back({double(r.Q), r.multiplier_sup, r.norm_fixed, r.norm_maximal, r.curve_fixed,
                                   r.curve_maximal});
        }
        o.results = {{"rows", arr}};
        o.title = "Hi norms";
    } else {
        throw DomainError("scan: --kind must be err, major or hi");
    }
    return o;
}

Outcome run_improve(const Config& cfg) {
    Outcome o;
    if (cfg.sharpness) {
        const auto h = acquire_tables(cfg, std::uint64_t{1} << cfg.nmax);
        const auto pts = lab::sharpness_experiment(cfg.nmin, cfg.nmax, *h.tables);
        json arr = json::array();
        std::vector<double> n, r0;
        o.plot.columns = {"N", "ratio_t0", "ratio_t1"};
        for (const auto& p : pts) {
            arr.push_back({{"N", p.N}, {"ratio_t0", p.ratio_t0}, {"ratio_t1", p.ratio_t1}});
            o.plot.rows.push_back({double(p.N), p.ratio_t0, p.ratio_t1});
            o.metrics["ratio_t1_N" + std::to_string(p.N)] = p.ratio_t1;
            n.push_back(std::log2(double(p.N)));
            r0.push_back(p.ratio_t0);
        }
        o.results = {{"rows", arr}};
        if (pts.size() >= 2) o.results["spearman_t0"] = lab::spearman(n, r0);
        o.title = "sharpness: primes against a point";
        return o;
    }
    const std::uint64_t N = cfg.N();
    const auto h = acquire_tables(cfg, N);
    const auto st = lab::parse_strategy(cfg.strategy);
    const auto res = lab::set_search(N, {0, static_cast<std::int64_t>(N)}, st, cfg.search ? cfg.trials : 1, cfg.seed,
                                     *h.tables);
    auto trial = [](const lab::ImprovingTrial& t) {
        return json{{"label", t.label},          {"N", t.N},
                    {"size_f", t.size_f},        {"size_g", t.size_g},
                    {"pairing", t.pairing},      {"density_f", t.density_f},
                    {"density_g", t.density_g},  {"log_factor", t.log_factor},
                    {"ratio_t0", t.ratio_t0},    {"ratio_t1", t.ratio_t1},
                    {"ratio_t2", t.ratio_t2},    {"q_suggested", t.q_suggested}};
    };
    o.results = {{"strategy", cfg.strategy},
                 {"trials", res.trials},
                 {"degenerate", res.degenerate},
                 {"worst_t1", trial(res.worst_t1)},
                 {"worst_t2", trial(res.worst_t2)}};
    o.metrics = {{"worst_ratio_t1", res.worst_t1.ratio_t1}, {"worst_ratio_t2", res.worst_t2.ratio_t2}};
    return o;
}

Outcome run_sparse(const Config& cfg) {
    const std::uint64_t N_max = std::uint64_t{1} << cfg.nmax;
    const auto h = acquire_tables(cfg, N_max);
    const auto pairs = lab::corpus(cfg.pairs, cfg.seed);
    Outcome o;
    double worst = 0.0, min_density = 1.0;
    std::size_t invalid = 0;
    o.plot.columns = {"pair", "pairing", "form_t2", "domination_t2"};
    json arr = json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto b = lab::build_sparse(pairs[k].F, pairs[k].G, N_max, *h.tables);
        const auto v = lab::verify_sparse(b.family);
        invalid += !v.valid;
        min_density = std::min(min_density, v.density);
        worst = std::max(worst, b.domination_t2);
        o.plot.rows.push_back({double(k), b.pairing, b.form_t2, b.domination_t2});
        arr.push_back({{"label", pairs[k].label},
                       {"items", b.family.items.size()},
                       {"valid", v.valid},
                       {"density", v.density},
                       {"pairing", b.pairing},
                       {"form_t2", b.form_t2},
                       {"domination_t2", b.domination_t2}});
    }
    o.results = {{"pairs", pairs.size()},
                 {"invalid", invalid},
                 {"min_density", min_density},
                 {"worst_domination_t2", worst},
                 {"rows", arr}};
    o.metrics = {{"worst_domination_t2", worst}, {"min_density", min_density}};
    o.title = "sparse domination";
    return o;
}

Outcome run_weaktype(const Config& cfg) {
    const std::uint64_t N_max = std::uint64_t{1} << cfg.nmax;
    const auto h = acquire_tables(cfg, N_max);
    Outcome o;
    json arr = json::array();
    o.plot.columns = {"lambda"};
    std::vector<lab::WeakTypeReport> reps;
    for (const auto& [name, F] : lab::weak_type_corpus(cfg.seed)) {
        reps.push_back(lab::weak_type_scan(F, N_max, cfg.t, *h.tables));
        const auto& r = reps.back();
        o.plot.columns.push_back(name);
        arr.push_back({{"set", name}, {"size", r.size_f}, {"sup_log", r.sup_log}, {"sup_relative", r.sup_relative}});
        o.metrics["sup_log_" + name] = r.sup_log;
    }
    if (!reps.empty())
        for (std::size_t i = 0; i < reps[0].levels.size(); ++i) {
            std::vector<double> row{reps[0].levels[i].lambda};
            for (const auto& r : reps) row.push_back(double(r.levels[i].count) / double(r.size_f));
            o.plot.rows.push_back(row);
        }
    o.results = {{"N_max", N_max}, {"t", cfg.t}, {"rows", arr}};
    o.title = "level sets of the maximal function";
    return o;
}

Outcome run_orlicz(const Config& cfg) {
    const std::uint64_t N_max = std::uint64_t{1} << cfg.nmax;
    const auto h = acquire_tables(cfg, N_max);
    Outcome o;
    json arr = json::array();
    for (const auto& [name, F] : lab::weak_type_corpus(cfg.seed)) {
        const auto f = operators::LatticeFunction::indicator(F);
        const double ref = double(F.size()) * lab::orlicz_phi(double(F.size()), cfg.t);
        const auto r = lab::weak_orlicz_check(f, cfg.t, N_max, *h.tables);
        arr.push_back({{"set", name},
                       {"size", F.size()},
                       {"orlicz", r.orlicz},
                       {"orlicz_over_reference", r.orlicz / ref},
                       {"sup_weak", r.sup_weak},
                       {"ratio", r.ratio},
                       {"layering_ok", r.layering_ok}});
        o.metrics["ratio_" + name] = r.ratio;
    }
    o.results = {{"N_max", N_max}, {"t", cfg.t}, {"rows", arr}};
    return o;
}

Outcome run_kernel(const Config& cfg) {
    Outcome o;
    if (cfg.low_check) {
        const std::uint64_t N = cfg.N();
        multiplier::CutoffParams p = cfg.params();
        p.enforce_q_bound = false;
        const multiplier::MultiplierModel lo(multiplier::ModelKind::Lo, N, p);
        const auto k = operators::low_kernel_range(-64, 64, cfg.Q, N);
        o.plot.columns = {"L", "max_error"};
        json arr = json::array();
        const std::size_t L0 = fft::next_pow2(8 * (1 + N));
        for (int d = 0; d < 4; ++d) {
            const std::size_t L = L0 << d;
            const auto y = operators::apply_multiplier(operators::LatticeFunction::delta(0), lo, L);
            double err = 0.0;
            for (std::int64_t x = -64; x <= 64; ++x) err = std::max(err, std::abs(y.at(x) - k[std::size_t(x + 64)]));
            arr.push_back({{"L", L}, {"max_error", err}});
            o.plot.rows.push_back({double(L), err});
            o.metrics["low_error_L" + std::to_string(L)] = err;
        }
        o.results["low_check"] = arr;
        o.title = "low kernel vs periodised Lo";
    }
    if (cfg.s_sweep || !cfg.low_check) {
        const bool exact = ntheory::primes_below(cfg.Q).size() <= ntheory::kDefaultSmoothCapBits;
        o.plot = {};
        o.plot.columns = exact ? std::vector<std::string>{"x", "S", "S_oracle"} : std::vector<std::string>{"x", "S"};
        double sup = 0.0;
        std::size_t checked = 0;
        for (std::int64_t x = -cfg.xmax; x <= cfg.xmax; ++x) {
            const double s = operators::s_function(x, cfg.Q);
            sup = std::max(sup, std::abs(s));
            if (exact) {
                if (x != 0 && !operators::s_function_agrees(x, cfg.Q))
                    throw NumericalConsistencyError("S closed form disagrees with the literal sum at x = " +
                                                    std::to_string(x));
                checked += x != 0;
                o.plot.rows.push_back({double(x), s, operators::s_function_oracle(x, cfg.Q)});
            } else {
                o.plot.rows.push_back({double(x), s});
            }
        }
        o.results["s_sweep"] = {{"Q", cfg.Q},
                                {"xmax", cfg.xmax},
                                {"sup_abs", sup},
                                {"bound_3logQ", 3.0 * std::log(double(cfg.Q))},
                                {"exact_checks", checked}};
        o.metrics["s_sup"] = sup;
        o.title = "S(x)";
    }
    return o;
}

Outcome run_report(const Config& cfg) {
    std::ifstream f(cfg.in);
    if (!f) throw IoError("cannot read " + cfg.in);
    std::stringstream ss;
    ss << f.rdbuf();
    Outcome o;
    o.plot = table_from_report(ss.str());
    const auto j = json::parse(ss.str(), nullptr, false);
    o.results = {{"source", cfg.in},
                 {"source_command", j.is_object() ? j.value("command", std::string()) : std::string()},
                 {"rows", o.plot.rows.size()}};
    o.title = o.results["source_command"].get<std::string>();
    return o;
}

json table_json(const Table& t) { return {{"columns", t.columns}, {"rows", t.rows}}; }

// Returns true when the baseline matches (or is absent / frozen).
bool handle_baseline(const Config& cfg, const Outcome& o, json& verdict) {
    if (cfg.baseline.empty()) {
        verdict = {{"status", "none"}};
        return true;
    }
    if (cfg.freeze) {
        std::ofstream f(cfg.baseline);
        if (!f) throw IoError("cannot write " + cfg.baseline);
        f << json{{"v", 1}, {"command", cfg.command}, {"metrics", o.metrics}}.dump(2) << '\n';
        verdict = {{"status", "frozen"}, {"path", cfg.baseline}};
        return true;
    }
    std::ifstream f(cfg.baseline);
    if (!f) {
        verdict = {{"status", "absent"}, {"path", cfg.baseline}};
        return true;
    }
    json base;
    try {
        f >> base;
    } catch (const json::exception& e) {
        throw IoError("baseline JSON: " + std::string(e.what()));
    }
    bool ok = true;
    json diffs = json::array();
    const json metrics = base.value("metrics", json::object());
    for (const auto& [name, v] : metrics.items()) {
        const double b = v.get<double>();
        const bool present = o.metrics.contains(name);
        const double a = present ? o.metrics[name].get<double>() : std::nan("");
        const bool match = present && std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
        ok = ok && match;
        diffs.push_back({{"metric", name}, {"baseline", b}, {"current", present ? json(a) : json()}, {"ok", match}});
    }
    verdict = {{"status", "compared"}, {"path", cfg.baseline}, {"ok", ok}, {"metrics", diffs}};
    return ok;
}

void add_common(CLI::App* s, Config& cfg) {
    s->add_option("--limit", cfg.limit, "sieve limit");
    s->add_option("--n", cfg.n, "log2 N");
    s->add_option("--Q", cfg.Q, "smoothness parameter Q");
    s->add_option("--mode", cfg.mode, "grh or uncond");
    s->add_option("--c", cfg.c, "constant c in exp(c sqrt(n)/4)");
    s->add_option("--epsilon", cfg.epsilon, "epsilon in the GRH curve");
    s->add_option("--alpha-cut", cfg.alpha_cut, "level cutoff exponent");
    s->add_option("--t", cfg.t, "logarithmic power t");
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--threads", cfg.threads, "OpenMP threads (0 keeps the default)");
    s->add_option("--cache", cfg.cache, "sieve cache file");
    s->add_option("--out", cfg.out, "report JSON path (default stdout)");
    s->add_option("--csv", cfg.csv, "plot data CSV path");
    s->add_option("--svg", cfg.svg, "SVG line chart path");
    s->add_option("--baseline", cfg.baseline, "baseline JSON path");
    s->add_flag("--freeze-baseline", cfg.freeze, "write the baseline instead of comparing");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Prime-average circle-method lab", "pcl"};
    app.require_subcommand(1);

    auto* tables = app.add_subcommand("tables", "build or load the sieve cache");
    auto* scan = app.add_subcommand("scan", "multiplier error scans (err, major, hi)");
    scan->add_option("--kind", cfg.kind, "err | major | hi");
    scan->add_option("--samples", cfg.samples, "samples per major arc");
    scan->add_option("--qs", cfg.qs, "Q values for the hi scan");
    scan->add_flag("--scaled", cfg.scaled, "use the scaled GRH preset for the level cutoff");
    scan->add_flag("--no-q-bound", cfg.no_q_bound, "do not require Q <= N-tilde");
    auto* improve = app.add_subcommand("improve", "improving-inequality trials");
    improve->add_flag("--sharpness", cfg.sharpness, "primes against a point, N = 2^nmin .. 2^nmax");
    improve->add_flag("--search", cfg.search, "run a set search");
    improve->add_option("--nmin", cfg.nmin, "smallest log2 N");
    improve->add_option("--nmax", cfg.nmax, "largest log2 N");
    improve->add_option("--strategy", cfg.strategy, "set search strategy");
    improve->add_option("--trials", cfg.trials, "set search trials");
    auto* sparse = app.add_subcommand("sparse", "build and verify sparse families on a corpus");
    sparse->add_option("--pairs", cfg.pairs, "corpus size");
    sparse->add_option("--nmax", cfg.nmax, "log2 of the largest scale")->default_val(20);
    auto* weak = app.add_subcommand("weaktype", "restricted weak-type scan");
    weak->add_option("--nmax", cfg.nmax, "log2 of the largest scale")->default_val(20);
    auto* orlicz = app.add_subcommand("orlicz", "Orlicz norms and weak-type ratios");
    orlicz->add_option("--nmax", cfg.nmax, "log2 of the largest scale")->default_val(20);
    auto* kernel = app.add_subcommand("kernel", "S-function sweep and low-kernel check");
    kernel->add_flag("--s-sweep", cfg.s_sweep, "tabulate S(x) for |x| <= xmax");
    kernel->add_flag("--low-check", cfg.low_check, "compare low_kernel with the periodised Lo operator");
    kernel->add_option("--xmax", cfg.xmax, "sweep range");
    auto* report = app.add_subcommand("report", "turn a report into plot data");
    report->add_option("--in", cfg.in, "report JSON")->required();
    for (auto* s : {tables, scan, improve, sparse, weak, orlicz, kernel, report}) add_common(s, cfg);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kValidation;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    const auto start = std::chrono::steady_clock::now();
    try {
        validate(cfg);
        if (cfg.threads > 0) set_threads(cfg.threads);
        Outcome o;
        if (cfg.command == "tables") o = run_tables(cfg);
        else if (cfg.command == "scan") o = run_scan(cfg);
        else if (cfg.command == "improve") o = run_improve(cfg);
        else if (cfg.command == "sparse") o = run_sparse(cfg);
        else if (cfg.command == "weaktype") o = run_weaktype(cfg);
        else if (cfg.command == "orlicz") o = run_orlicz(cfg);
        else if (cfg.command == "kernel") o = run_kernel(cfg);
        else o = run_report(cfg);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        json verdict;
        const bool ok = handle_baseline(cfg, o, verdict);
        if (!o.plot.columns.empty()) o.results["plot"] = table_json(o.plot);
        json rep = {{"v", 1},
                    {"command", cfg.command},
                    {"config", cfg.echo()},
                    {"timings", {{"seconds", seconds}}},
                    {"results", o.results},
                    {"metrics", o.metrics},
                    {"baseline", verdict}};
        if (!cfg.csv.empty() || !cfg.svg.empty()) {
            emit_plot_data(o.plot, cfg.csv, cfg.svg, o.title);
            if (!o.sidecar.columns.empty() && !cfg.csv.empty()) {
                const fs::path p(cfg.csv);
                emit_plot_data(o.sidecar, (p.parent_path() / (p.stem().string() + ".curves.csv")).string(), "", "");
            }
        }
        if (cfg.out.empty()) {
            out << rep.dump(2) << '\n';
        } else {
            std::ofstream f(cfg.out);
            if (!f) throw IoError("cannot write " + cfg.out);
            f << rep.dump(2) << '\n';
        }
        if (!ok) {
            err << "baseline regression against " << cfg.baseline << '\n';
            return kRegression;
        }
        return kOk;
    } catch (const NumericalConsistencyError& e) {
        err << "numerical consistency error: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace pcl::cli
