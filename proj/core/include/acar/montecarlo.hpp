#pragma once

// Replicated simulation studies: parameter recovery, comparison-test
// rejection rates under the four coupling scenarios, and Portmanteau size.
// Every replication draws its seeds from (master seed, replication index), so
// results do not depend on the number of worker threads.

#include "acar/comparison.hpp"
#include "acar/fit.hpp"
#include "acar/simulate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace acar {

struct MCDesign {
    ParameterVector theta0;
    std::vector<Index> sample_sizes{500};
    int replications = 100;
    std::uint64_t seed = 1;
    FitConfig fit_config;
    Index burn_in = 200;
    int threads = 0;  ///< 0: ACAR_THREADS or hardware concurrency

    void validate() const;
};

/// One replication of a recovery study.
struct ReplicationRecord {
    int replication = 0;
    bool ok = false;  ///< converged with a usable covariance
    bool at_bound = false;
    std::string status;
    Vector theta_hat;
    Vector std_errors;
};

struct MCSummary {
    Index n = 0;
    std::vector<std::string> parameter_names;
    Vector theta0;
    Vector cmle;      ///< mean estimate
    Vector tse;       ///< mean sandwich standard error
    Vector mae;       ///< mean |theta_hat - theta0|
    Vector mse;       ///< mean (theta_hat - theta0)^2
    Vector coverage;  ///< share of 95% Wald intervals covering theta0
    int replications = 0;
    int used = 0;
    int failures = 0;
    int at_bound = 0;
};

/// Aggregates usable, interior replications; the rest are counted and skipped.
MCSummary summarize_recovery(const ParameterVector& theta0, Index n, std::span<const ReplicationRecord> records);

/// Simulate, fit and record one replication at sample size n.
ReplicationRecord run_replication(const MCDesign& design, Index n, int replication);

std::vector<MCSummary> run_recovery_study(const MCDesign& design);

struct ScenarioDesign {
    int scenario = 1;
    Index n = 500;
    int replications = 200;
    std::uint64_t seed = 1;
    FitConfig fit_config;
    double alpha = 0.05;
    Index burn_in = 200;
    std::optional<CrossCovarianceMode> S_mode;  ///< default: assumed-zero for 1-2, empirical for 3-4
    CrossTermSign sign = CrossTermSign::published;
    int threads = 0;

    [[nodiscard]] CrossCovarianceMode effective_mode() const;
};

struct ScenarioSummary {
    int scenario = 1;
    Coupling coupling = Coupling::independent;
    CrossCovarianceMode S_mode = CrossCovarianceMode::assumed_zero;
    CrossTermSign sign = CrossTermSign::published;
    Index n = 0;
    double alpha = 0.05;
    int replications = 0;
    int used = 0;
    int failures = 0;
    int at_bound = 0;
    int rejections = 0;
    double rejection_rate = 0.0;
    double acceptance_rate = 0.0;
    double mean_statistic = 0.0;
    std::vector<double> statistics;  ///< global statistic per used replication, in replication order
};

ScenarioSummary run_scenario_study(const ScenarioDesign& design);

struct SizeDesign {
    ParameterVector theta0;
    Index n = 500;
    int q = 3;
    int replications = 200;
    std::uint64_t seed = 1;
    FitConfig fit_config;
    double alpha = 0.05;
    Index burn_in = 200;
    int threads = 0;
};

struct SizeSummary {
    Index n = 0;
    int q = 0;
    int df = 0;
    double alpha = 0.05;
    int replications = 0;
    int used = 0;
    int failures = 0;
    int at_bound = 0;
    int rejections = 0;
    double rejection_rate = 0.0;
    double mean_statistic = 0.0;
    std::vector<double> statistics;
};

/// Portmanteau rejection rate when the fitted model is the data-generating one.
SizeSummary run_portmanteau_size_study(const SizeDesign& design);

}  // namespace acar
