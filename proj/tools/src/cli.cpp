#include "cli.hpp"

#include "report.hpp"

#include "acar/climate.hpp"
#include "acar/comparison.hpp"
#include "acar/data.hpp"
#include "acar/fit.hpp"
#include "acar/montecarlo.hpp"
#include "acar/parallel.hpp"
#include "acar/portmanteau.hpp"
#include "acar/search.hpp"
#include "acar/simulate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace acar::cli {

namespace {

// Flags shared by every subcommand. Values given on the command line win over
// the --config file, which wins over the defaults.
struct Common {
    std::uint64_t seed = 1;
    std::string config;
    std::string out;
    std::string format = "json";
    int threads = 0;
    Json file;  // parsed --config
};

struct FitFlags {
    int starts = 20;
    double epsilon = kDefaultEpsilon;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double relative_tolerance = 1e-9;
    std::vector<double> eta0;
};

struct DataFlags {
    std::string series;
    std::string covariates;
    std::vector<std::string> columns;
    std::optional<int> lag;
    int k = 0;
};

class Binder {
public:
    explicit Binder(CLI::App* app) : app_(app) {}

    template <typename T>
    CLI::Option* option(const std::string& flags, T& target, const std::string& help, const std::string& key = "") {
        CLI::Option* opt = app_->add_option(flags, target, help);
        if (!key.empty()) {
            merges_.push_back([opt, key, &target](const Json& cfg) {
                if (opt->count() == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
            });
        }
        return opt;
    }

    void apply(const Json& cfg) const {
        for (const auto& m : merges_) m(cfg);
    }

private:
    CLI::App* app_;
    std::vector<std::function<void(const Json&)>> merges_;
};

void add_common(Binder& b, CLI::App* app, Common& c) {
    b.option("--seed", c.seed, "Master random seed", "seed");
    app->add_option("--config", c.config, "JSON file whose keys mirror the fit and Monte Carlo settings");
    app->add_option("--out", c.out, "Write the report here instead of standard output");
    app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    b.option("--threads", c.threads, "Worker threads (default: ACAR_THREADS or all cores)", "threads");
}

void add_fit_flags(Binder& b, FitFlags& f) {
    b.option("--starts", f.starts, "Random starting points", "n_starts");
    b.option("--epsilon", f.epsilon, "Parameter box margin", "epsilon");
    b.option("--max-iterations", f.max_iterations, "Optimizer iterations per start", "max_iterations");
    b.option("--gtol", f.gradient_tolerance, "Projected-gradient tolerance", "gradient_tolerance");
    b.option("--rtol", f.relative_tolerance, "Relative objective-change tolerance", "relative_tolerance");
    b.option("--eta0", f.eta0, "Initial latent value (one value, or K values)", "eta0")->delimiter(',');
}

void add_data_flags(Binder& b, DataFlags& d, const std::string& suffix = "") {
    b.option("--series" + suffix, d.series, "Series CSV (year,level or year,proportion)")->required();
    b.option("--covariates" + suffix, d.covariates, "Covariate CSV (year plus named columns)");
    b.option("--k", d.k, "Number of non-zero levels (default: largest level present)", "k");
}

FitConfig make_fit_config(const FitFlags& f, const Common& c, Index K) {
    FitConfig config;
    config.n_starts = f.starts;
    config.epsilon = f.epsilon;
    config.max_iterations = f.max_iterations;
    config.gradient_tolerance = f.gradient_tolerance;
    config.relative_tolerance = f.relative_tolerance;
    config.seed = c.seed;
    config.threads = worker_count(c.threads);
    if (f.eta0.size() == 1) {
        config.eta0 = Vector::Constant(K, f.eta0.front());
    } else if (!f.eta0.empty()) {
        if (static_cast<Index>(f.eta0.size()) != K) throw InputError("--eta0 needs 1 or K values");
        config.eta0 = Eigen::Map<const Vector>(f.eta0.data(), K);
    }
    config.validate();
    return config;
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    try {
        Json j = Json::parse(in);
        if (!j.is_object()) throw InputError("config '" + path + "' must hold a JSON object");
        return j;
    } catch (const Json::exception& e) {
        throw InputError("config '" + path + "': " + e.what());
    }
}

ParameterVector parse_theta(const std::string& spec, Index K, Index P) {
    if (spec.rfind("table1:", 0) == 0) {
        int which = 0;
        try {
            which = std::stoi(spec.substr(7));
        } catch (const std::exception&) {
            throw InputError("bad parameter set '" + spec + "'");
        }
        return table1_theta(which);
    }
    std::vector<double> values;
    std::stringstream in(spec);
    std::string cell;
    while (std::getline(in, cell, ',')) values.push_back(parse_number(cell));
    if (static_cast<Index>(values.size()) != 3 * K + P) {
        throw InputError("--theta needs 3K+P = " + std::to_string(3 * K + P) + " values, got " +
                         std::to_string(values.size()));
    }
    return ParameterVector(K, P, Eigen::Map<const Vector>(values.data(), 3 * K + P));
}

AlignedData load_model_data(const DataFlags& d) {
    const YearlySeries response = load_ordinal_series(d.series, d.k);
    AlignedData data;
    if (d.covariates.empty()) {
        if (!d.columns.empty()) throw InputError("--columns needs --covariates");
        data.years = response.years;
        data.series = response.series;
        data.covariates = CovariateMatrix::empty(response.series.size());
        return data;
    }
    const CovariateTable table = load_covariate_table(d.covariates);
    if (d.lag) {
        data = align_response(response, table, *d.lag);
    } else {
        data.years = response.years;
        data.series = response.series;
        data.covariates = table.rows_for(response.years);
    }
    if (!d.columns.empty()) data.covariates = data.covariates.select(d.columns);
    return data;
}

class Output {
public:
    Output(const Common& c, std::ostream& fallback) {
        if (!c.out.empty()) {
            file_.open(c.out);
            if (!file_) throw InputError("cannot write '" + c.out + "'");
        }
        stream_ = c.out.empty() ? &fallback : &file_;
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void emit(const Common& c, std::ostream& out, const Json& j, const std::function<void(std::ostream&)>& text) {
    Output o(c, out);
    if (c.format == "json") {
        *o << j.dump(2) << "\n";
    } else {
        text(*o);
    }
}

void print_notes(const AlignedData& data, std::ostream& err) {
    for (const auto& n : data.notes) err << "note: " << n << "\n";
}

Index parameter_index(const FitResult& fit, const std::string& name) {
    for (std::size_t i = 0; i < fit.parameter_names.size(); ++i) {
        if (fit.parameter_names[i] == name || fit.parameter_names[i] == "gamma_" + name) return static_cast<Index>(i);
    }
    throw InputError("no parameter named '" + name + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adjacent-category autoregression for ordinal time series"};
    app.require_subcommand(1);
    std::function<int()> action;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate an ACAR path with Gaussian covariates");
    Binder sim_b(sim);
    Common sim_c;
    sim_c.format = "text";  // the series CSV
    int sim_k = 3, sim_p = 5;
    Index sim_n = 500, sim_burn = 200;
    std::string sim_theta = "table1:1", sim_cov_out;
    add_common(sim_b, sim, sim_c);
    sim_b.option("--k", sim_k, "Number of non-zero levels", "k");
    sim_b.option("--p", sim_p, "Number of covariates", "p");
    sim_b.option("--n", sim_n, "Sample size", "n");
    sim_b.option("--burn-in", sim_burn, "Discarded initial steps", "burn_in");
    sim_b.option("--theta", sim_theta, "table1:N or 3K+P comma-separated values", "theta");
    sim->add_option("--covariates-out", sim_cov_out, "Also write the covariate CSV here");
    sim->callback([&] {
        action = [&] {
            sim_c.file = load_config(sim_c.config);
            sim_b.apply(sim_c.file);
            SimConfig config;
            config.theta = parse_theta(sim_theta, sim_k, sim_p);
            config.n = sim_n;
            config.seed = sim_c.seed;
            config.burn_in = sim_burn;
            const SimulatedSample sample = simulate(config);
            const std::vector<int> years = default_years(config.n);
            if (!sim_cov_out.empty()) {
                std::ofstream cov(sim_cov_out);
                if (!cov) throw InputError("cannot write '" + sim_cov_out + "'");
                write_covariate_table(cov, CovariateTable{years, sample.covariates});
            }
            Json j;
            j["seed"] = sim_c.seed;
            j["theta"] = to_json(config.theta.flat());
            j["parameter_names"] = config.theta.names();
            j["burn_in"] = config.burn_in;
            j["years"] = years;
            j["levels"] = sample.series.levels();
            j["covariate_names"] = sample.covariates.names();
            j["covariates"] = to_json(sample.covariates.values());
            emit(sim_c, out, j, [&](std::ostream& o) { write_ordinal_series(o, years, sample.series); });
            return kExitOk;
        };
    });

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Conditional maximum-likelihood fit");
    Binder fit_b(fit_cmd);
    Common fit_c;
    FitFlags fit_f;
    DataFlags fit_d;
    add_common(fit_b, fit_cmd, fit_c);
    add_fit_flags(fit_b, fit_f);
    add_data_flags(fit_b, fit_d);
    fit_b.option("--columns", fit_d.columns, "Covariate columns to use (default: all)")->delimiter(',');
    fit_cmd->add_option("--lag", fit_d.lag, "Align covariates with this lag in years");
    fit_cmd->callback([&] {
        action = [&] {
            fit_c.file = load_config(fit_c.config);
            fit_b.apply(fit_c.file);
            const AlignedData data = load_model_data(fit_d);
            print_notes(data, err);
            const FitResult f = fit(data.series, data.covariates, make_fit_config(fit_f, fit_c, data.series.K()));
            emit(fit_c, out, to_json(f), [&](std::ostream& o) { write_text(o, f); });
            return f.converged ? kExitOk : kExitNumerical;
        };
    });

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Fit, then run the Portmanteau test (and optional threshold)");
    Binder diag_b(diag);
    Common diag_c;
    FitFlags diag_f;
    DataFlags diag_d;
    int diag_q = 1;
    std::vector<std::string> diag_threshold;
    double diag_scale = 0.1;
    bool diag_truncate = false;
    add_common(diag_b, diag, diag_c);
    add_fit_flags(diag_b, diag_f);
    add_data_flags(diag_b, diag_d);
    diag_b.option("--columns", diag_d.columns, "Covariate columns to use (default: all)")->delimiter(',');
    diag->add_option("--lag", diag_d.lag, "Align covariates with this lag in years");
    diag_b.option("--q", diag_q, "Number of residual autocorrelation lags", "q");
    diag->add_option("--threshold", diag_threshold, "LINEAR,QUADRATIC covariate pair for a vertex threshold")
        ->delimiter(',')
        ->expected(2);
    diag_b.option("--scale", diag_scale, "Scale the threshold covariate was multiplied by", "temperature_scale");
    diag->add_flag("--truncate", diag_truncate, "Clip the threshold interval at zero");
    diag->callback([&] {
        action = [&] {
            diag_c.file = load_config(diag_c.config);
            diag_b.apply(diag_c.file);
            const AlignedData data = load_model_data(diag_d);
            print_notes(data, err);
            const FitResult f = fit(data.series, data.covariates, make_fit_config(diag_f, diag_c, data.series.K()));
            const PortmanteauResult p = portmanteau_test(f, diag_q);
            Json j;
            j["fit"] = to_json(f);
            j["portmanteau"] = to_json(p);
            std::optional<ThresholdResult> threshold;
            if (!diag_threshold.empty()) {
                threshold = quadratic_threshold(f, parameter_index(f, diag_threshold[0]),
                                                parameter_index(f, diag_threshold[1]), diag_truncate);
                j["threshold"] = to_json(*threshold);
                j["threshold_scale"] = diag_scale;
                j["threshold_unscaled"] = to_json(threshold->unscaled(diag_scale));
            }
            emit(diag_c, out, j, [&](std::ostream& o) {
                write_text(o, f);
                write_text(o, p);
                if (threshold) write_text(o, *threshold, diag_scale);
            });
            return f.converged ? kExitOk : kExitNumerical;
        };
    });

    // compare
    auto* cmp = app.add_subcommand("compare", "Fit two series and test equality of their parameters");
    Binder cmp_b(cmp);
    Common cmp_c;
    FitFlags cmp_f;
    DataFlags cmp_d1, cmp_d2;
    std::vector<std::string> cmp_columns;
    std::optional<int> cmp_lag;
    std::string cmp_mode = "assumed-zero", cmp_sign = "published";
    add_common(cmp_b, cmp, cmp_c);
    add_fit_flags(cmp_b, cmp_f);
    cmp_b.option("--series1", cmp_d1.series, "Series CSV of the first site")->required();
    cmp_b.option("--covariates1", cmp_d1.covariates, "Covariate CSV of the first site");
    cmp_b.option("--series2", cmp_d2.series, "Series CSV of the second site")->required();
    cmp_b.option("--covariates2", cmp_d2.covariates, "Covariate CSV of the second site");
    cmp_b.option("--k", cmp_d1.k, "Number of non-zero levels (default: largest level present)", "k");
    cmp_b.option("--columns", cmp_columns, "Covariate columns to use (default: all)")->delimiter(',');
    cmp->add_option("--lag", cmp_lag, "Align covariates with this lag in years");
    cmp_b.option("--s-mode", cmp_mode, "Cross-score covariance: assumed-zero or empirical", "S_mode");
    cmp_b.option("--sign", cmp_sign, "Cross-term sign: published or difference", "cross_term_sign");
    cmp->callback([&] {
        action = [&] {
            cmp_c.file = load_config(cmp_c.config);
            cmp_b.apply(cmp_c.file);
            const auto mode = parse_cross_covariance_mode(cmp_mode);
            const auto sign = parse_cross_term_sign(cmp_sign);
            cmp_d2.k = cmp_d1.k;
            cmp_d1.columns = cmp_d2.columns = cmp_columns;
            cmp_d1.lag = cmp_d2.lag = cmp_lag;
            const AlignedData a = load_model_data(cmp_d1);
            const AlignedData b = load_model_data(cmp_d2);
            print_notes(a, err);
            print_notes(b, err);
            if (a.series.K() != b.series.K()) throw InputError("the two series have different K; pass --k");
            if (mode == CrossCovarianceMode::empirical && a.years != b.years) {
                throw InputError("empirical cross-covariance needs both series on the same years");
            }
            const FitConfig config = make_fit_config(cmp_f, cmp_c, a.series.K());
            const FitResult f1 = fit(a.series, a.covariates, config);
            const FitResult f2 = fit(b.series, b.covariates, config);
            const ComparisonResult r = compare_models(f1, f2, mode, sign);
            Json j;
            j["fit1"] = to_json(f1);
            j["fit2"] = to_json(f2);
            j["comparison"] = to_json(r);
            emit(cmp_c, out, j, [&](std::ostream& o) {
                write_text(o, f1);
                write_text(o, f2);
                write_text(o, r, f1.parameter_names);
            });
            return f1.converged && f2.converged ? kExitOk : kExitNumerical;
        };
    });

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo studies: recovery, scenario, size");
    Binder mc_b(mc);
    Common mc_c;
    FitFlags mc_f;
    std::string mc_design = "recovery", mc_theta = "table1:1", mc_mode, mc_sign = "published";
    std::vector<Index> mc_n{500};
    int mc_b_reps = 100, mc_scenario = 1, mc_q = 3, mc_k = 3, mc_p = 5;
    double mc_alpha = 0.05;
    Index mc_burn = 200;
    add_common(mc_b, mc, mc_c);
    add_fit_flags(mc_b, mc_f);
    mc_b.option("--design", mc_design, "recovery, scenario or size", "design")
        ->check(CLI::IsMember({"recovery", "scenario", "size"}));
    mc_b.option("--theta", mc_theta, "table1:N or 3K+P comma-separated values", "theta");
    mc_b.option("--k", mc_k, "Number of non-zero levels for an explicit --theta", "k");
    mc_b.option("--p", mc_p, "Number of covariates for an explicit --theta", "p");
    mc_b.option("--n", mc_n, "Sample size(s)", "sample_sizes")->delimiter(',');
    mc_b.option("--b", mc_b_reps, "Replications", "replications");
    mc_b.option("--burn-in", mc_burn, "Discarded initial steps", "burn_in");
    mc_b.option("--scenario", mc_scenario, "Comparison scenario 1-4", "scenario");
    mc_b.option("--q", mc_q, "Portmanteau lags (size study)", "q");
    mc_b.option("--alpha", mc_alpha, "Test level", "alpha");
    mc_b.option("--s-mode", mc_mode, "Override the scenario's cross-covariance mode", "S_mode");
    mc_b.option("--sign", mc_sign, "Cross-term sign: published or difference", "cross_term_sign");
    mc->callback([&] {
        action = [&] {
            mc_c.file = load_config(mc_c.config);
            mc_b.apply(mc_c.file);
            const ParameterVector theta = parse_theta(mc_theta, mc_k, mc_p);
            FitConfig config = make_fit_config(mc_f, mc_c, theta.K());
            config.threads = 1;
            Json j;
            j["design"] = mc_design;
            j["seed"] = mc_c.seed;
            if (mc_design == "recovery") {
                MCDesign d;
                d.theta0 = theta;
                d.sample_sizes = mc_n;
                d.replications = mc_b_reps;
                d.seed = mc_c.seed;
                d.fit_config = config;
                d.burn_in = mc_burn;
                d.threads = mc_c.threads;
                const auto summaries = run_recovery_study(d);
                Json list = Json::array();
                for (const auto& s : summaries) list.push_back(to_json(s));
                j["summaries"] = std::move(list);
                emit(mc_c, out, j, [&](std::ostream& o) {
                    for (const auto& s : summaries) write_text(o, s);
                });
            } else if (mc_design == "scenario") {
                if (mc_n.size() != 1) throw InputError("scenario study takes a single --n");
                ScenarioDesign d;
                d.scenario = mc_scenario;
                d.n = mc_n.front();
                d.replications = mc_b_reps;
                d.seed = mc_c.seed;
                d.fit_config = config;
                d.alpha = mc_alpha;
                d.burn_in = mc_burn;
                if (!mc_mode.empty()) d.S_mode = parse_cross_covariance_mode(mc_mode);
                d.sign = parse_cross_term_sign(mc_sign);
                d.threads = mc_c.threads;
                const ScenarioSummary s = run_scenario_study(d);
                j["summary"] = to_json(s);
                emit(mc_c, out, j, [&](std::ostream& o) { write_text(o, s); });
            } else {
                if (mc_n.size() != 1) throw InputError("size study takes a single --n");
                SizeDesign d;
                d.theta0 = theta;
                d.n = mc_n.front();
                d.q = mc_q;
                d.replications = mc_b_reps;
                d.seed = mc_c.seed;
                d.fit_config = config;
                d.alpha = mc_alpha;
                d.burn_in = mc_burn;
                d.threads = mc_c.threads;
                const SizeSummary s = run_portmanteau_size_study(d);
                j["summary"] = to_json(s);
                emit(mc_c, out, j, [&](std::ostream& o) { write_text(o, s); });
            }
            return kExitOk;
        };
    });

    // build-covariates
    auto* bc = app.add_subcommand("build-covariates", "Seasonal climate covariates from daily records");
    Binder bc_b(bc);
    Common bc_c;
    std::string bc_daily;
    double bc_scale = 0.1, bc_coverage = 0.8;
    bool bc_no_squares = false;
    add_common(bc_b, bc, bc_c);
    bc_b.option("--daily", bc_daily, "Daily climate CSV (date,tmax,tmin,prcp,snow)")->required();
    bc_b.option("--scale", bc_scale, "Multiplier applied to temperature columns", "temperature_scale");
    bc_b.option("--coverage", bc_coverage, "Share of days required per season and year", "min_coverage");
    bc->add_flag("--no-squares", bc_no_squares, "Omit the squared temperature columns");
    bc->callback([&] {
        action = [&] {
            bc_c.file = load_config(bc_c.config);
            bc_b.apply(bc_c.file);
            SeasonalConfig config;
            config.temperature_scale = bc_scale;
            config.min_coverage = bc_coverage;
            config.squares = !bc_no_squares;
            const SeasonalCovariateTable t = build_seasonal_covariates(read_daily_climate(bc_daily), config);
            emit(bc_c, out, to_json(t), [&](std::ostream& o) { write_covariate_table(o, t.table); });
            for (const auto& d : t.dropped) err << "dropped " << d.year << ": " << d.reason << "\n";
            return kExitOk;
        };
    });

    // search
    auto* srch = app.add_subcommand("search", "Fit candidate covariate sets and select a model");
    Binder srch_b(srch);
    Common srch_c;
    FitFlags srch_f;
    DataFlags srch_d;
    std::vector<std::string> srch_terms;
    int srch_max = 8, srch_q = 1;
    double srch_alpha = 0.05;
    add_common(srch_b, srch, srch_c);
    add_fit_flags(srch_b, srch_f);
    add_data_flags(srch_b, srch_d);
    srch->add_option("--lag", srch_d.lag, "Align covariates with this lag in years");
    srch_b.option("--terms", srch_terms, "Linear terms to combine (default: every non-square column)", "terms")
        ->delimiter(',');
    srch_b.option("--max-covariates", srch_max, "Largest number of covariate columns per candidate", "max_covariates");
    srch_b.option("--q", srch_q, "Portmanteau lags", "q");
    srch_b.option("--alpha", srch_alpha, "Portmanteau level", "alpha");
    srch->callback([&] {
        action = [&] {
            srch_c.file = load_config(srch_c.config);
            srch_b.apply(srch_c.file);
            if (srch_d.covariates.empty()) throw InputError("search needs --covariates");
            const AlignedData data = load_model_data(srch_d);
            print_notes(data, err);
            std::vector<std::string> terms = srch_terms;
            if (terms.empty()) {
                for (const auto& name : data.covariates.names()) {
                    if (name.size() < 3 || name.compare(name.size() - 3, 3, "_sq") != 0) terms.push_back(name);
                }
            }
            SearchConfig config;
            config.fit = make_fit_config(srch_f, srch_c, data.series.K());
            config.q = srch_q;
            config.alpha = srch_alpha;
            config.threads = srch_c.threads;
            const auto candidates = enumerate_candidate_sets(terms, data.covariates.names(), srch_max);
            const ModelSearchReport report = search_models(data.series, data.covariates, candidates, config);
            emit(srch_c, out, to_json(report), [&](std::ostream& o) { write_text(o, report); });
            return kExitOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        return action();
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace acar::cli
