#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggmkf/calibration.hpp"
#include "ggmkf/csv.hpp"
#include "ggmkf/errors.hpp"
#include "ggmkf/filter.hpp"
#include "ggmkf/parallel.hpp"
#include "ggmkf/recycling.hpp"
#include "ggmkf/rng.hpp"
#include "ggmkf/simgen.hpp"

namespace {

using namespace ggmkf;

constexpr int kExitCsv = 2;
constexpr int kExitDimensions = 3;
constexpr int kExitCalibration = 4;

// Shortest round-trip decimal form, so output files are byte-stable.
std::string fmt(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

const std::map<std::string, Rule> kRuleNames{{"and", Rule::AND}, {"or", Rule::OR}};
const std::map<std::string, SStrategy> kStrategyNames{{"equi", SStrategy::equi},
                                                      {"sdp", SStrategy::sdp}};
const std::map<std::string, ZKind> kZNames{{"entry", ZKind::entry_lambda},
                                           {"coef", ZKind::coef_magnitude}};
const std::map<std::string, Combiner> kCombinerNames{{"diff", Combiner::difference},
                                                     {"max", Combiner::signed_max}};
const std::map<std::string, GraphKind> kGraphNames{{"band", GraphKind::band},
                                                   {"block", GraphKind::block},
                                                   {"er", GraphKind::erdos_renyi},
                                                   {"cluster", GraphKind::cluster}};

std::string rule_name(Rule r) { return r == Rule::AND ? "and" : "or"; }
std::string strategy_name(SStrategy s) { return s == SStrategy::equi ? "equi" : "sdp"; }

struct FilterFlags {
    double q = 0.2;
    int delta = 1;
    double a = 1.0;
    double c_a = 1.93;
    Rule rule = Rule::AND;
    SStrategy strategy = SStrategy::equi;
    ZKind z_kind = ZKind::entry_lambda;
    Combiner combiner = Combiner::difference;
    double alpha = 1.0;
    double quantile = 0.5;
    std::string grid = "reduced";

    StatRecipe recipe() const {
        StatRecipe r{z_kind, combiner, alpha,
                     z_kind == ZKind::coef_magnitude ? std::optional<double>(quantile)
                                                     : std::nullopt};
        r.validate();
        return r;
    }
    FilterConfig config() const { return FilterConfig{q, delta, a, c_a, rule}; }
    HyperGrid hyper_grid() const {
        return grid == "full" ? HyperGrid::full() : HyperGrid::reduced();
    }
};

void add_filter_flags(CLI::App* cmd, FilterFlags& f) {
    cmd->add_option("--q", f.q, "nominal FDR level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--delta", f.delta, "1 = FDR, 0 = modified FDR")->check(CLI::Range(0, 1));
    cmd->add_option("--a", f.a, "numerator offset a");
    cmd->add_option("--ca", f.c_a, "calibrated bound c_a for a");
    cmd->add_option("--rule", f.rule, "edge rule")
        ->transform(CLI::CheckedTransformer(kRuleNames, CLI::ignore_case));
    cmd->add_option("--strategy", f.strategy, "s-vector strategy")
        ->transform(CLI::CheckedTransformer(kStrategyNames, CLI::ignore_case));
    cmd->add_option("--z", f.z_kind, "variable importance: entry or coef")
        ->transform(CLI::CheckedTransformer(kZNames, CLI::ignore_case));
    cmd->add_option("--combiner", f.combiner, "statistic combiner: diff or max")
        ->transform(CLI::CheckedTransformer(kCombinerNames, CLI::ignore_case));
    cmd->add_option("--alpha", f.alpha, "elastic-net mixing weight");
    cmd->add_option("--quantile", f.quantile, "lambda quantile for coef importances");
    cmd->add_option("--grid", f.grid, "hyperparameter grid for recycling")
        ->check(CLI::IsMember({"reduced", "full"}));
}

// Flat `key = value` config mirroring the subcommand's flags. Applied after
// parsing, and only to options absent from the command line, so explicit
// flags always win.
void apply_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt == cmd->get_config_ptr())
            throw CLI::ConfigError("unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

void require_given(const CLI::Option* opt, const std::string& cmd) {
    if (opt->count() == 0)
        throw CLI::RequiredError(cmd + " " + opt->get_name());
}

void write_edges(const std::string& path, const GraphEstimate& est) {
    std::ofstream out(path);
    out << "i,j\n";
    for (const auto& [i, j] : est.edges) out << i + 1 << "," << j + 1 << "\n";
}

int run_estimate(const std::string& input, const std::string& output, const FilterFlags& flags,
                 const std::string& mode, int splits, std::uint64_t seed, bool seed_given) {
    if (mode != "fixed" && !seed_given) {
        std::cerr << "estimate: --seed is required for mode " << mode << "\n";
        return 1;
    }
    CsvMatrix csv;
    try {
        csv = read_matrix_csv_file(input);
    } catch (const CsvParseError& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return kExitCsv;
    } catch (const std::exception& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return kExitCsv;
    }

    GraphEstimate est;
    HyperCombo selected;
    bool have_selection = false;
    try {
        if (mode == "fixed") {
            est = ggm_knockoff_filter(csv.values, flags.config(), flags.recipe(), flags.strategy,
                                      seed);
        } else if (mode == "recycle") {
            est = recycled_filter(csv.values, flags.q, flags.delta, flags.hyper_grid(), seed,
                                  &selected);
            have_selection = true;
        } else {
            est = aggregate_splits(csv.values, flags.q, flags.delta, flags.hyper_grid(), splits,
                                   seed);
        }
    } catch (const InsufficientSamplesError& e) {
        std::cerr << "estimate: " << e.what() << " (rows " << csv.values.rows() << ", columns "
                  << csv.values.cols() << ")\n";
        return kExitDimensions;
    }

    write_edges(output, est);
    std::ofstream manifest(output + ".manifest");
    manifest << "command = estimate\n"
             << "input = " << input << "\n"
             << "q = " << fmt(flags.q) << "\n"
             << "delta = " << flags.delta << "\n"
             << "mode = " << mode << "\n"
             << "seed = " << seed << "\n"
             << "edges = " << est.edge_count() << "\n";
    if (mode == "fixed") {
        manifest << "rule = " << rule_name(flags.rule) << "\n"
                 << "strategy = " << strategy_name(flags.strategy) << "\n"
                 << "recipe = " << flags.recipe().name() << "\n"
                 << "a = " << fmt(flags.a) << "\n"
                 << "c_a = " << fmt(flags.c_a) << "\n";
    } else if (have_selection) {
        manifest << "selected_rule = " << rule_name(selected.rule) << "\n"
                 << "selected_strategy = " << strategy_name(selected.strategy) << "\n"
                 << "selected_recipe = " << selected.recipe.name() << "\n"
                 << "selected_a = " << fmt(selected.a) << "\n"
                 << "selected_c_a = " << fmt(selected.c_a) << "\n";
    } else {
        manifest << "splits = " << splits << "\n";
    }
    return 0;
}

struct SimRow {
    std::string kind;
    int p;
    int n;
    double b;
    double q;
    std::string method;
    std::uint64_t seed;
    double fdp;
    double tpp;
    long runtime_ms;
};

int run_simulate(GraphKind kind, int p, const std::vector<double>& bs,
                 const std::vector<int>& ns, const std::vector<double>& qs,
                 const std::vector<std::string>& methods, int reps, std::uint64_t seed,
                 const FilterFlags& flags, int splits, const std::string& out_path,
                 const std::string& agg_path) {
    std::string kind_name;
    for (const auto& [name, k] : kGraphNames)
        if (k == kind) kind_name = name;

    struct Setting {
        int n;
        double b;
        double q;
    };
    std::vector<Setting> settings;
    for (double b : bs)
        for (int n : ns)
            for (double q : qs) settings.push_back({n, b, q});

    for (const Setting& s : settings) {
        for (const std::string& m : methods) {
            const bool needs_4p = m == "recycle" || m == "split" || m == "aggregate";
            if ((needs_4p && s.n < 4 * p) || s.n < 2 * p) {
                std::cerr << "simulate: n = " << s.n << " is infeasible for method " << m
                          << " at p = " << p << "\n";
                return kExitDimensions;
            }
        }
    }

    std::vector<SimRow> rows(settings.size() * reps * methods.size());
    for (std::size_t si = 0; si < settings.size(); ++si) {
        const Setting& s = settings[si];
        auto [omega, truth] = generate_precision(
            {kind, p, s.b, derive_seed(seed, 1000 + si)});
        parallel_for(reps, [&](int rep) {
            Rng data_rng(derive_seed(seed, si, static_cast<std::uint64_t>(rep)));
            const Eigen::MatrixXd data = sample_gaussian(omega, s.n, data_rng);
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                const std::string& m = methods[mi];
                const std::uint64_t run_seed =
                    derive_seed(derive_seed(seed, 7 + mi), si, static_cast<std::uint64_t>(rep));
                const auto t0 = std::chrono::steady_clock::now();
                GraphEstimate est;
                if (m == "fixed") {
                    FilterConfig cfg = flags.config();
                    cfg.q = s.q;
                    est = ggm_knockoff_filter(data, cfg, flags.recipe(), flags.strategy, run_seed);
                } else if (m == "recycle") {
                    est = recycled_filter(data, s.q, flags.delta, flags.hyper_grid(), run_seed);
                } else if (m == "split") {
                    est = split_filter_plain(data, s.q, flags.delta, flags.hyper_grid(), run_seed);
                } else if (m == "aggregate") {
                    est = aggregate_splits(data, s.q, flags.delta, flags.hyper_grid(), splits,
                                           run_seed);
                } else if (m == "bh") {
                    est = baseline_bh_by(data, s.q, PvalMethod::BH);
                } else if (m == "by") {
                    est = baseline_bh_by(data, s.q, PvalMethod::BY);
                } else {
                    throw InvalidSpecError("unknown method: " + m);
                }
                const auto t1 = std::chrono::steady_clock::now();
                const auto [fdp, tpp] = fdp_tpp(est, truth);
                rows[(si * reps + rep) * methods.size() + mi] =
                    {kind_name, p,        s.n, s.b, s.q,
                     m,         run_seed, fdp, tpp,
                     std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()};
            }
        });
    }

    std::ofstream out(out_path);
    out << "kind,p,n,b,q,method,seed,fdp,tpp,runtime_ms\n";
    for (const SimRow& r : rows)
        out << r.kind << "," << r.p << "," << r.n << "," << fmt(r.b) << "," << fmt(r.q) << ","
            << r.method << "," << r.seed << "," << fmt(r.fdp) << "," << fmt(r.tpp) << ","
            << r.runtime_ms << "\n";

    std::ofstream agg(agg_path);
    agg << "kind,p,n,b,q,method,reps,fdr,power,fdp_sd,tpp_sd\n";
    for (std::size_t si = 0; si < settings.size(); ++si) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            double fsum = 0, tsum = 0, fsq = 0, tsq = 0;
            for (int rep = 0; rep < reps; ++rep) {
                const SimRow& r = rows[(si * reps + rep) * methods.size() + mi];
                fsum += r.fdp;
                tsum += r.tpp;
                fsq += r.fdp * r.fdp;
                tsq += r.tpp * r.tpp;
            }
            const double fmean = fsum / reps, tmean = tsum / reps;
            const double fvar = reps > 1 ? (fsq - reps * fmean * fmean) / (reps - 1) : 0.0;
            const double tvar = reps > 1 ? (tsq - reps * tmean * tmean) / (reps - 1) : 0.0;
            const Setting& s = settings[si];
            agg << kind_name << "," << p << "," << s.n << "," << fmt(s.b) << "," << fmt(s.q)
                << "," << methods[mi] << "," << reps << "," << fmt(fmean) << "," << fmt(tmean)
                << "," << fmt(std::sqrt(std::max(fvar, 0.0))) << ","
                << fmt(std::sqrt(std::max(tvar, 0.0))) << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian graphical model edge selection with FDR control"};
    app.require_subcommand(1);

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate a graph from a CSV sample matrix");
    std::string input, output = "edges.csv", mode = "fixed";
    int splits = 11;
    std::uint64_t seed = 0;
    int threads = 0;
    FilterFlags est_flags;
    auto* est_input = est->add_option("--input", input, "input CSV (rows = samples)");
    est->add_option("--output", output, "edge list CSV to write");
    est->add_option("--mode", mode, "fixed, recycle, or aggregate")
        ->check(CLI::IsMember({"fixed", "recycle", "aggregate"}));
    est->add_option("--splits", splits, "number of splits for aggregate mode");
    auto* est_seed = est->add_option("--seed", seed, "rng seed");
    est->add_option("--threads", threads, "worker threads (0 = auto)");
    add_filter_flags(est, est_flags);
    std::string est_config;
    est->add_option("--config", est_config, "flat key = value config file");

    // simulate
    auto* sim = app.add_subcommand("simulate", "seeded simulation sweep with known truth");
    GraphKind kind = GraphKind::band;
    int p = 50, reps = 100;
    std::vector<int> ns;
    std::vector<double> qs{0.2}, bs{-0.6};
    std::vector<std::string> methods{"fixed"};
    std::string sim_out = "results.csv", sim_agg = "aggregate.csv";
    std::uint64_t sim_seed = 0;
    int sim_threads = 0, sim_splits = 11;
    FilterFlags sim_flags;
    sim->add_option("--kind", kind, "graph family")
        ->transform(CLI::CheckedTransformer(kGraphNames, CLI::ignore_case));
    sim->add_option("--p", p, "dimension");
    auto* sim_ns = sim->add_option("--n", ns, "sample sizes to sweep")->delimiter(',');
    sim->add_option("--qs", qs, "FDR levels to sweep")->delimiter(',');
    sim->add_option("--b", bs, "edge parameters to sweep")->delimiter(',');
    sim->add_option("--methods", methods,
                    "fixed, recycle, split, aggregate, bh, by")
        ->delimiter(',');
    sim->add_option("--reps", reps, "replications per setting");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--out", sim_out, "per-replication results CSV");
    sim->add_option("--aggregate-out", sim_agg, "per-setting aggregate CSV");
    sim->add_option("--splits", sim_splits, "splits for the aggregate method");
    sim->add_option("--threads", sim_threads, "worker threads (0 = auto)");
    add_filter_flags(sim, sim_flags);
    std::string sim_config;
    sim->add_option("--config", sim_config, "flat key = value config file");

    // calibrate-ca
    auto* cal = app.add_subcommand("calibrate-ca", "compute the c_a bound");
    double cal_a = 1.0;
    int cal_k0 = 10;
    auto* cal_a_opt = cal->add_option("--a", cal_a, "numerator offset a");
    cal->add_option("--k0", cal_k0, "enumerated path depth");
    std::string cal_config;
    cal->add_option("--config", cal_config, "flat key = value config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed()) {
            if (!est_config.empty()) apply_config(est, est_config);
            require_given(est_input, "estimate");
        } else if (sim->parsed()) {
            if (!sim_config.empty()) apply_config(sim, sim_config);
            require_given(sim_ns, "simulate");
            require_given(sim_seed_opt, "simulate");
        } else if (cal->parsed()) {
            if (!cal_config.empty()) apply_config(cal, cal_config);
            require_given(cal_a_opt, "calibrate-ca");
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }

    try {
        if (est->parsed()) {
            if (threads > 0) set_default_threads(threads);
            return run_estimate(input, output, est_flags, mode, splits, seed,
                                est_seed->count() > 0);
        }
        if (sim->parsed()) {
            if (sim_threads > 0) set_default_threads(sim_threads);
            return run_simulate(kind, p, bs, ns, qs, methods, reps, sim_seed, sim_flags,
                                sim_splits, sim_out, sim_agg);
        }
        if (cal->parsed()) {
            try {
                const CaBound bound = compute_ca(cal_a, cal_k0);
                std::cout << fmt(bound.a) << "," << bound.k0 << "," << fmt(bound.value) << "\n";
                return 0;
            } catch (const InvalidSpecError& e) {
                std::cerr << "calibrate-ca: " << e.what() << "\n";
                return kExitCalibration;
            }
        }
    } catch (const InsufficientSamplesError& e) {
        std::cerr << e.what() << "\n";
        return kExitDimensions;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
