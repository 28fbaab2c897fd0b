// pbinfer: prediction-based inference for partially labeled data.
//
// Subcommands:
//   analyze   fit PB estimators to a CSV of (outcome, prediction, covariates)
//   diagnose  efficiency diagnostics: residual correlation and aVar deltas
//   simulate  deterministic Monte Carlo study over a scenario grid

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pbinfer/inference.hpp"
#include "pbinfer/table_io.hpp"

using namespace pbinfer;
using nlohmann::json;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTooFewLabeled = 4;
constexpr int kExitFailureBudget = 5;

int env_threads() {
    int t = 1;
#ifdef _OPENMP
    t = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("PBINFER_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) t = v;
    }
    return t;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return cfg;
}

// Flat key-value config; CLI flags win on conflict.
struct ConfigView {
    json cfg;

    std::optional<std::string> str(const std::string& key) const {
        auto it = cfg.find(key);
        if (it == cfg.end()) return std::nullopt;
        if (it->is_string()) return it->get<std::string>();
        if (it->is_array()) {
            std::string joined;
            for (const auto& v : *it) {
                if (!joined.empty()) joined += ',';
                joined += v.get<std::string>();
            }
            return joined;
        }
        throw ConfigError("config key '" + key + "' must be a string");
    }
    std::optional<double> num(const std::string& key) const {
        auto it = cfg.find(key);
        if (it == cfg.end()) return std::nullopt;
        if (!it->is_number()) throw ConfigError("config key '" + key + "' must be a number");
        return it->get<double>();
    }
};

struct AnalyzeArgs {
    std::string config_path, input, outcome, prediction, covariates, family_s = "linear";
    std::string methods_s, out, format = "json";
    double level = 0.95, ridge = 0.0;
};

void add_analyze_flags(CLI::App* cmd, AnalyzeArgs& a) {
    cmd->add_option("--config", a.config_path, "flat key-value JSON config; flags win on conflict");
    cmd->add_option("--input", a.input, "input CSV with a header row");
    cmd->add_option("--outcome", a.outcome, "outcome column (empty cells mark unlabeled rows)");
    cmd->add_option("--prediction", a.prediction, "prediction column");
    cmd->add_option("--covariates", a.covariates, "comma-separated covariate columns");
    cmd->add_option("--family", a.family_s, "mean | linear | logistic");
    cmd->add_option("--methods", a.methods_s, "comma-separated estimators");
    cmd->add_option("--level", a.level, "confidence level");
    cmd->add_option("--ridge", a.ridge, "extra ridge for covariance inversions");
    cmd->add_option("--out", a.out, "output path (stdout when omitted)");
    cmd->add_option("--format", a.format, "json | csv");
}

void merge_analyze_config(const CLI::App* cmd, AnalyzeArgs& a) {
    if (a.config_path.empty()) return;
    ConfigView cv{load_config(a.config_path)};
    auto use = [&](const char* flag, const char* key, auto& slot, auto get) {
        if (cmd->count(flag) == 0) {
            auto v = get(cv, key);
            if (v) slot = *v;
        }
    };
    auto s = [](const ConfigView& c, const char* k) { return c.str(k); };
    auto d = [](const ConfigView& c, const char* k) { return c.num(k); };
    use("--input", "input", a.input, s);
    use("--outcome", "outcome", a.outcome, s);
    use("--prediction", "prediction", a.prediction, s);
    use("--covariates", "covariates", a.covariates, s);
    use("--family", "family", a.family_s, s);
    use("--methods", "methods", a.methods_s, s);
    use("--out", "out", a.out, s);
    use("--format", "format", a.format, s);
    use("--level", "level", a.level, d);
    use("--ridge", "ridge", a.ridge, d);
}

struct LoadedData {
    Dataset ds;
    EstimatingFunction ef;
    std::vector<std::string> coef_names;
};

LoadedData load_analyze_dataset(const AnalyzeArgs& a) {
    if (a.input.empty()) throw ConfigError("--input is required");
    if (a.outcome.empty()) throw ConfigError("--outcome is required");
    if (a.prediction.empty()) throw ConfigError("--prediction is required");
    Family family = family_from_name(a.family_s);
    std::vector<std::string> cov_cols = split_list(a.covariates);
    if (family == Family::mean && !cov_cols.empty())
        throw ConfigError("mean family takes no covariates");
    if (family != Family::mean && cov_cols.empty())
        throw ConfigError("linear/logistic families need --covariates");

    CsvTable t = read_csv_file(a.input);
    auto col_index = [&](const std::string& name) {
        for (std::size_t j = 0; j < t.header.size(); ++j)
            if (t.header[j] == name) return j;
        throw CsvError("line 1: column '" + name + "' not found in header");
    };
    std::vector<std::string> all_names = {a.outcome, a.prediction};
    all_names.insert(all_names.end(), cov_cols.begin(), cov_cols.end());
    std::set<std::string> distinct(all_names.begin(), all_names.end());
    if (distinct.size() != all_names.size())
        throw ConfigError("outcome/prediction/covariate columns must be distinct");

    std::size_t oc = col_index(a.outcome), pc = col_index(a.prediction);
    std::vector<std::size_t> cc;
    for (const std::string& name : cov_cols) cc.push_back(col_index(name));

    const std::size_t n = t.rows.size();
    if (n == 0) throw CsvError("line 2: no data rows");
    Mat x(n, 1 + cc.size());
    Vec yhat(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = t.rows[i];
        std::size_t line = t.line_no[i];
        x(i, 0) = 1.0;
        for (std::size_t j = 0; j < cc.size(); ++j)
            x(i, 1 + j) = parse_csv_number(row[cc[j]], line, cov_cols[j]);
        yhat[i] = parse_csv_number(row[pc], line, a.prediction);
        const std::string& ycell = row[oc];
        if (ycell.empty()) {
            y[i] = std::numeric_limits<double>::quiet_NaN();
        } else {
            y[i] = parse_csv_number(ycell, line, a.outcome);
            if (family == Family::logistic && y[i] != 0.0 && y[i] != 1.0)
                throw CsvError("line " + std::to_string(line) + ": logistic outcome must be 0 or 1");
        }
    }

    LoadedData out{make_dataset(std::move(x), std::move(yhat), std::move(y), family),
                   make_ef(family, 1 + cc.size()),
                   {}};
    if (family == Family::mean) {
        out.coef_names = {"mean"};
    } else {
        out.coef_names = {"(intercept)"};
        out.coef_names.insert(out.coef_names.end(), cov_cols.begin(), cov_cols.end());
    }
    return out;
}

std::vector<Method> parse_methods(const std::string& methods_s, Family family) {
    std::vector<Method> methods;
    if (methods_s.empty()) {
        if (family == Family::linear) return default_methods(family);
        methods = {Method::lab, Method::naive, Method::ppi, Method::ppi_a,
                   Method::cc,  Method::ppipp, Method::pspa};
        return methods;
    }
    for (const std::string& name : split_list(methods_s)) {
        Method m = method_from_name(name);
        if (!method_supported(m, family))
            throw ConfigError(std::string(method_name(m)) + " is not defined for the " +
                              family_name(family) + " family");
        methods.push_back(m);
    }
    if (methods.empty()) throw ConfigError("--methods must name at least one estimator");
    return methods;
}

PBFit fit_named(const Dataset& ds, const EstimatingFunction& ef, Method m, const FitOptions& opts) {
    try {
        return fit_methods(ds, ef, {m}, opts).front();
    } catch (const InsufficientUnlabeled&) {
        throw;
    } catch (const FamilyUnsupported&) {
        throw;
    } catch (const Error& e) {
        throw DidNotConverge(std::string("method ") + method_name(m) + ": " + e.what());
    }
}

int cmd_analyze(const AnalyzeArgs& a) {
    LoadedData data = load_analyze_dataset(a);
    std::vector<Method> methods = parse_methods(a.methods_s, data.ef.family);
    FitOptions opts;
    opts.ci_level = a.level;
    opts.ridge = a.ridge;

    PBFit lab = fit_named(data.ds, data.ef, Method::lab, opts);
    const double n = static_cast<double>(data.ds.n);
    const double z = normal_quantile(0.5 * (1.0 + a.level));

    AnalyzeReport rep;
    rep.family = data.ef.family;
    rep.level = a.level;
    rep.n = data.ds.n;
    rep.n_lab = data.ds.n_lab();
    rep.coef_names = data.coef_names;
    for (Method m : methods) {
        PBFit fit = m == Method::lab ? lab : fit_named(data.ds, data.ef, m, opts);
        rep.methods.push_back(method_name(m));
        Mat cov_rounded = fit.cov;
        for (double& v : cov_rounded.a) v = round10(v);
        for (std::size_t j = 0; j < fit.theta.size(); ++j) {
            AnalyzeRow row;
            row.method = method_name(m);
            row.coef = data.coef_names[j];
            row.estimate = fit.theta[j];
            // se is derived from the serialized covariance so the emitted
            // numbers stay mutually consistent after rounding.
            row.se = std::sqrt(std::max(0.0, cov_rounded(j, j)) / n);
            row.ci_lower = fit.theta[j] - z * row.se;
            row.ci_upper = fit.theta[j] + z * row.se;
            row.re_vs_lab = fit.cov(j, j) > 0.0 ? lab.cov(j, j) / fit.cov(j, j) : 1.0;
            rep.rows.push_back(row);
        }
        rep.cov.emplace(method_name(m), std::move(cov_rounded));
    }

    std::string text = a.format == "csv" ? analyze_report_csv(rep) : analyze_report_json(rep);
    if (a.out.empty())
        std::cout << text;
    else
        write_text_file(a.out, text);
    return 0;
}

int cmd_diagnose(const AnalyzeArgs& a) {
    LoadedData data = load_analyze_dataset(a);
    if (data.ef.family == Family::logistic)
        throw ConfigError("diagnose requires the mean or linear family");
    CoreFits core;
    MomentSet moments;
    try {
        core = solve_core(data.ds, data.ef, false);
        moments = estimate_moments(data.ds, data.ef, core, a.ridge);
    } catch (const Error& e) {
        throw DidNotConverge(std::string("core fits: ") + e.what());
    }
    HomoskedasticSummary hs = homoskedastic_summary(data.ds, data.ef, core);
    AvarReport ppia = avar_report(Method::ppi_a, moments);
    AvarReport cc = avar_report(Method::cc, moments);

    DiagnoseReport rep;
    rep.family = data.ef.family;
    rep.n = data.ds.n;
    rep.n_lab = data.ds.n_lab();
    rep.sigma_y = hs.sigma_y;
    rep.sigma_yhat = hs.sigma_yhat;
    rep.rho = hs.rho;
    rep.threshold = hs.threshold;
    rep.coef_names = data.coef_names;
    bool any_ppia_inefficient = false;
    for (std::size_t j = 0; j < data.coef_names.size(); ++j) {
        rep.delta_ppia_diag.push_back(ppia.delta_vs_lab(j, j));
        rep.delta_cc_diag.push_back(cc.delta_vs_lab(j, j));
        rep.ppia_efficient.push_back(ppia.efficient_vs_lab[j]);
        rep.cc_efficient.push_back(cc.efficient_vs_lab[j]);
        if (!ppia.efficient_vs_lab[j]) any_ppia_inefficient = true;
    }
    rep.recommended = any_ppia_inefficient ? "cc" : "ppi_a";

    std::string text = a.format == "csv" ? diagnose_report_csv(rep) : diagnose_report_json(rep);
    if (a.out.empty())
        std::cout << text;
    else
        write_text_file(a.out, text);
    return 0;
}

struct SimulateArgs {
    std::string config_path, out, json_out;
    std::string families_s = "linear,logistic";
    std::string errors_s = "random,nonrandom,covdep";
    std::string qualities_s = "high,low";
    std::string n_lab_s = "300";
    std::string methods_s;
    std::uint64_t seed = 1;
    std::size_t n = 2000, replicates = 500;
    bool full_scale = false;
};

int cmd_simulate(const CLI::App* cmd, SimulateArgs& a) {
    if (!a.config_path.empty()) {
        ConfigView cv{load_config(a.config_path)};
        auto use_s = [&](const char* flag, const char* key, std::string& slot) {
            if (cmd->count(flag) == 0) {
                auto v = cv.str(key);
                if (v) slot = *v;
            }
        };
        use_s("--families", "families", a.families_s);
        use_s("--error-types", "error_types", a.errors_s);
        use_s("--qualities", "qualities", a.qualities_s);
        use_s("--n-lab", "n_lab", a.n_lab_s);
        use_s("--methods", "methods", a.methods_s);
        use_s("--out", "out", a.out);
        use_s("--json-out", "json_out", a.json_out);
        if (cmd->count("--n") == 0) {
            auto v = cv.num("n");
            if (v) a.n = static_cast<std::size_t>(*v);
        }
        if (cmd->count("--replicates") == 0) {
            auto v = cv.num("replicates");
            if (v) a.replicates = static_cast<std::size_t>(*v);
        }
        if (cmd->count("--seed") == 0) {
            auto v = cv.num("seed");
            if (v) a.seed = static_cast<std::uint64_t>(*v);
        }
    }
    if (a.full_scale) {
        a.n = 10000;
        a.n_lab_s = "300,600,1000,2000";
        a.replicates = 2000;
    }
    if (a.out.empty()) throw ConfigError("--out is required");

    std::vector<Family> families;
    for (const std::string& f : split_list(a.families_s)) families.push_back(family_from_name(f));
    std::vector<ErrorType> errors;
    for (const std::string& e : split_list(a.errors_s)) errors.push_back(error_type_from_name(e));
    std::vector<Quality> qualities;
    for (const std::string& q : split_list(a.qualities_s)) qualities.push_back(quality_from_name(q));
    std::vector<std::size_t> n_labs;
    for (const std::string& s : split_list(a.n_lab_s)) {
        try {
            n_labs.push_back(std::stoull(s));
        } catch (const std::exception&) {
            throw ConfigError("simulate: bad n_lab value '" + s + "'");
        }
    }
    if (families.empty() || errors.empty() || qualities.empty() || n_labs.empty())
        throw ConfigError("simulate: empty scenario grid");

    int threads = env_threads();
    std::vector<SimReport> reports;
    for (Family fam : families) {
        std::vector<Method> methods =
            a.methods_s.empty() ? default_methods(fam) : parse_methods(a.methods_s, fam);
        for (ErrorType et : errors)
            for (Quality q : qualities)
                for (std::size_t n_lab : n_labs) {
                    SimScenario sc;
                    sc.family = fam;
                    sc.error_type = et;
                    sc.quality = q;
                    sc.n = a.n;
                    sc.n_lab = n_lab;
                    sc.replicates = a.replicates;
                    sc.seed = a.seed;
                    SimReport rep = run_scenario(sc, methods, threads);
                    double cov_lo = 1.0, cov_hi = 0.0, re_lo = 1e300, re_hi = -1e300;
                    for (const SimCell& c : rep.cells) {
                        cov_lo = std::min(cov_lo, c.coverage);
                        cov_hi = std::max(cov_hi, c.coverage);
                        re_lo = std::min(re_lo, c.re);
                        re_hi = std::max(re_hi, c.re);
                    }
                    std::cout << scenario_id(sc) << " n=" << sc.n << " n_lab=" << sc.n_lab
                              << " replicates=" << sc.replicates << ": coverage [" << fmt_g10(cov_lo)
                              << ", " << fmt_g10(cov_hi) << "], RE [" << fmt_g10(re_lo) << ", "
                              << fmt_g10(re_hi) << "], failures " << rep.n_failures << "\n";
                    reports.push_back(std::move(rep));
                }
    }

    bool json_main = a.out.size() >= 5 && a.out.substr(a.out.size() - 5) == ".json";
    write_text_file(a.out, json_main ? sim_report_json(reports) : sim_report_csv(reports));
    if (!a.json_out.empty()) write_text_file(a.json_out, sim_report_json(reports));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prediction-based inference toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "fit PB estimators to a CSV dataset");
    add_analyze_flags(analyze, analyze_args);

    AnalyzeArgs diagnose_args;
    CLI::App* diagnose = app.add_subcommand("diagnose", "efficiency diagnostics for a CSV dataset");
    add_analyze_flags(diagnose, diagnose_args);

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "run the Monte Carlo study grid");
    simulate->add_option("--config", sim_args.config_path, "flat key-value JSON config");
    simulate->add_option("--out", sim_args.out, "report path (.json for JSON, else CSV)");
    simulate->add_option("--json-out", sim_args.json_out, "also write the JSON mirror here");
    simulate->add_option("--families", sim_args.families_s, "linear,logistic");
    simulate->add_option("--error-types", sim_args.errors_s, "random,nonrandom,covdep");
    simulate->add_option("--qualities", sim_args.qualities_s, "high,low");
    simulate->add_option("--n", sim_args.n, "rows per replicate");
    simulate->add_option("--n-lab", sim_args.n_lab_s, "comma-separated labeled counts");
    simulate->add_option("--replicates", sim_args.replicates, "Monte Carlo replicates");
    simulate->add_option("--seed", sim_args.seed, "base seed");
    simulate->add_option("--methods", sim_args.methods_s, "comma-separated estimators");
    simulate->add_flag("--full-scale", sim_args.full_scale,
                       "n=10000, n_lab=300,600,1000,2000, 2000 replicates");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    omp_set_num_threads(env_threads());
#endif

    try {
        if (analyze->parsed()) {
            merge_analyze_config(analyze, analyze_args);
            return cmd_analyze(analyze_args);
        }
        if (diagnose->parsed()) {
            merge_analyze_config(diagnose, diagnose_args);
            return cmd_diagnose(diagnose_args);
        }
        if (simulate->parsed()) return cmd_simulate(simulate, sim_args);
    } catch (const InsufficientLabeled& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTooFewLabeled;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const FailureBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailureBudget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
