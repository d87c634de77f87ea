#include "acar/montecarlo.hpp"

#include "acar/parallel.hpp"
#include "acar/portmanteau.hpp"
#include "acar/random.hpp"

#include <cmath>

namespace acar {

namespace {

constexpr double kWaldZ = 1.959963984540054;

std::uint64_t replication_seed(std::uint64_t master, Index n, int replication) {
    return derive_seed(derive_seed(master, Stream::replication, static_cast<std::uint64_t>(n)), Stream::replication,
                       static_cast<std::uint64_t>(replication));
}

FitConfig replication_fit_config(FitConfig config, std::uint64_t seed) {
    config.seed = seed;
    config.threads = 1;
    return config;
}

void check_replications(int replications) {
    if (replications < 1) throw InputError("number of replications must be at least 1");
}

}  // namespace

void MCDesign::validate() const {
    check_replications(replications);
    if (sample_sizes.empty()) throw InputError("at least one sample size is required");
    const Validity v = validate_parameters(theta0, fit_config.epsilon);
    if (!v) throw InputError("theta0: " + v.message);
    for (Index n : sample_sizes) {
        if (n < theta0.size() + 2) {
            throw InputError("sample size " + std::to_string(n) + " is below 3K+P+2 = " +
                             std::to_string(theta0.size() + 2));
        }
    }
    fit_config.validate();
}

ReplicationRecord run_replication(const MCDesign& design, Index n, int replication) {
    const std::uint64_t seed = replication_seed(design.seed, n, replication);
    SimConfig sim;
    sim.theta = design.theta0;
    sim.n = n;
    sim.seed = seed;
    sim.burn_in = design.burn_in;
    ReplicationRecord record;
    record.replication = replication;
    try {
        const SimulatedSample sample = simulate(sim);
        const FitResult f = fit(sample.series, sample.covariates, replication_fit_config(design.fit_config, seed));
        record.theta_hat = f.theta_hat.flat();
        record.std_errors = f.std_errors;
        record.at_bound = f.any_at_bound();
        record.ok = f.converged && f.inference_available;
        record.status = f.inference_available ? f.status : f.inference_error;
    } catch (const std::exception& err) {
        record.ok = false;
        record.status = err.what();
    }
    return record;
}

MCSummary summarize_recovery(const ParameterVector& theta0, Index n, std::span<const ReplicationRecord> records) {
    const Index d = theta0.size();
    MCSummary out;
    out.n = n;
    out.parameter_names = theta0.names();
    out.theta0 = theta0.flat();
    out.cmle = Vector::Zero(d);
    out.tse = Vector::Zero(d);
    out.mae = Vector::Zero(d);
    out.mse = Vector::Zero(d);
    out.coverage = Vector::Zero(d);
    out.replications = static_cast<int>(records.size());
    for (const auto& r : records) {
        if (!r.ok) {
            ++out.failures;
            continue;
        }
        if (r.at_bound) {
            ++out.at_bound;
            continue;
        }
        ++out.used;
        const Vector err = r.theta_hat - out.theta0;
        out.cmle += r.theta_hat;
        out.tse += r.std_errors;
        out.mae += err.cwiseAbs();
        out.mse += err.cwiseAbs2();
        for (Index i = 0; i < d; ++i) {
            if (std::abs(err[i]) <= kWaldZ * r.std_errors[i]) out.coverage[i] += 1.0;
        }
    }
    if (out.used > 0) {
        const double inv = 1.0 / out.used;
        out.cmle *= inv;
        out.tse *= inv;
        out.mae *= inv;
        out.mse *= inv;
        out.coverage *= inv;
    } else {
        const double nan = std::nan("");
        out.cmle.setConstant(nan);
        out.tse.setConstant(nan);
        out.mae.setConstant(nan);
        out.mse.setConstant(nan);
        out.coverage.setConstant(nan);
    }
    return out;
}

std::vector<MCSummary> run_recovery_study(const MCDesign& design) {
    design.validate();
    std::vector<MCSummary> out;
    for (Index n : design.sample_sizes) {
        std::vector<ReplicationRecord> records(static_cast<std::size_t>(design.replications));
        parallel_for(design.replications, worker_count(design.threads), [&](std::int64_t b) {
            records[static_cast<std::size_t>(b)] = run_replication(design, n, static_cast<int>(b));
        });
        out.push_back(summarize_recovery(design.theta0, n, records));
    }
    return out;
}

CrossCovarianceMode ScenarioDesign::effective_mode() const {
    if (S_mode) return *S_mode;
    return scenario <= 2 ? CrossCovarianceMode::assumed_zero : CrossCovarianceMode::empirical;
}

ScenarioSummary run_scenario_study(const ScenarioDesign& design) {
    check_replications(design.replications);
    design.fit_config.validate();
    const Scenario scenario = comparison_scenario(design.scenario);
    ScenarioSummary out;
    out.scenario = scenario.id;
    out.coupling = scenario.coupling;
    out.S_mode = design.effective_mode();
    out.sign = design.sign;
    out.n = design.n;
    out.alpha = design.alpha;
    out.replications = design.replications;

    struct Outcome {
        bool ok = false;
        bool at_bound = false;
        double statistic = 0.0;
        bool reject = false;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(design.replications));
    parallel_for(design.replications, worker_count(design.threads), [&](std::int64_t b) {
        const std::uint64_t seed = replication_seed(design.seed, design.n, static_cast<int>(b));
        SimConfig site1, site2;
        site1.theta = table1_theta(scenario.theta_site1);
        site2.theta = table1_theta(scenario.theta_site2);
        site1.n = site2.n = design.n;
        site1.seed = site2.seed = seed;
        site1.burn_in = site2.burn_in = design.burn_in;
        Outcome& o = outcomes[static_cast<std::size_t>(b)];
        try {
            const PairedSites sites = simulate_paired_sites(site1, site2, scenario.coupling);
            const FitConfig config = replication_fit_config(design.fit_config, seed);
            const FitResult f1 = fit(sites.series1, sites.covariates1, config);
            const FitResult f2 = fit(sites.series2, sites.covariates2, config);
            if (f1.any_at_bound() || f2.any_at_bound()) {
                o.at_bound = true;
                return;
            }
            if (!f1.converged || !f2.converged || !f1.inference_available || !f2.inference_available) return;
            const ComparisonResult c = compare_models(f1, f2, out.S_mode, design.sign);
            if (!c.global_available) return;
            o.ok = true;
            o.statistic = c.global_statistic;
            o.reject = c.reject(design.alpha);
        } catch (const std::exception&) {
            o.ok = false;
        }
    });

    double total = 0.0;
    for (const auto& o : outcomes) {
        if (o.at_bound) {
            ++out.at_bound;
        } else if (!o.ok) {
            ++out.failures;
        } else {
            ++out.used;
            out.rejections += o.reject ? 1 : 0;
            total += o.statistic;
            out.statistics.push_back(o.statistic);
        }
    }
    if (out.used > 0) {
        out.rejection_rate = static_cast<double>(out.rejections) / out.used;
        out.acceptance_rate = 1.0 - out.rejection_rate;
        out.mean_statistic = total / out.used;
    }
    return out;
}

SizeSummary run_portmanteau_size_study(const SizeDesign& design) {
    check_replications(design.replications);
    design.fit_config.validate();
    const Validity v = validate_parameters(design.theta0, design.fit_config.epsilon);
    if (!v) throw InputError("theta0: " + v.message);
    SizeSummary out;
    out.n = design.n;
    out.q = design.q;
    out.df = static_cast<int>(design.theta0.K()) * design.q;
    out.alpha = design.alpha;
    out.replications = design.replications;

    struct Outcome {
        bool ok = false;
        bool at_bound = false;
        double statistic = 0.0;
        bool reject = false;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(design.replications));
    parallel_for(design.replications, worker_count(design.threads), [&](std::int64_t b) {
        const std::uint64_t seed = replication_seed(design.seed, design.n, static_cast<int>(b));
        SimConfig sim;
        sim.theta = design.theta0;
        sim.n = design.n;
        sim.seed = seed;
        sim.burn_in = design.burn_in;
        Outcome& o = outcomes[static_cast<std::size_t>(b)];
        try {
            const SimulatedSample sample = simulate(sim);
            const FitResult f = fit(sample.series, sample.covariates, replication_fit_config(design.fit_config, seed));
            if (f.any_at_bound()) {
                o.at_bound = true;
                return;
            }
            if (!f.converged || !f.inference_available) return;
            const PortmanteauResult p = portmanteau_test(f, design.q);
            o.ok = true;
            o.statistic = p.statistic;
            o.reject = p.reject(design.alpha);
        } catch (const std::exception&) {
            o.ok = false;
        }
    });

    double total = 0.0;
    for (const auto& o : outcomes) {
        if (o.at_bound) {
            ++out.at_bound;
        } else if (!o.ok) {
            ++out.failures;
        } else {
            ++out.used;
            out.rejections += o.reject ? 1 : 0;
            total += o.statistic;
            out.statistics.push_back(o.statistic);
        }
    }
    if (out.used > 0) {
        out.rejection_rate = static_cast<double>(out.rejections) / out.used;
        out.mean_statistic = total / out.used;
    }
    return out;
}

}  // namespace acar
