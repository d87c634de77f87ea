#pragma once

#include "acar/model.hpp"
#include "acar/random.hpp"
#include "acar/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acar {

/// How the uniform innovations of two sites are tied together.
enum class Coupling { independent, common, antithetic };

std::string to_string(Coupling coupling);
Coupling parse_coupling(const std::string& name);

struct SimConfig {
    ParameterVector theta;
    Index n = 500;
    std::uint64_t seed = 1;
    Index burn_in = 200;
    Vector eta0;  ///< empty means the default initial value

    [[nodiscard]] Index P() const noexcept { return theta.P(); }
    [[nodiscard]] Vector initial_eta() const { return eta0.size() ? eta0 : default_eta0(theta.K()); }
};

/// I.i.d. standard normal design of shape n x P.
CovariateMatrix simulate_covariates(Index n, Index P, Rng& rng);

/// Level whose cumulative-probability cell contains u.
int draw_level(const Vector& probabilities, double u);

/**
 * Runs the data-generating recursion over the whole innovation sequence
 * (no burn-in handling). Row t-1 of the covariates drives eta_t; the first
 * level is drawn from the initial latent value.
 */
OrdinalSeries simulate_levels(const ParameterVector& theta, const CovariateMatrix& covariates,
                              std::span<const double> uniforms, const Vector& eta0);

/**
 * One path of length config.n. Burn-in covariates and uniforms come from the
 * config's seed; the recorded uniforms come from `uniforms` when given,
 * otherwise from the seed's uniform stream.
 */
OrdinalSeries simulate_path(const SimConfig& config, const CovariateMatrix& covariates,
                            std::optional<std::span<const double>> uniforms = std::nullopt);

struct SimulatedSample {
    OrdinalSeries series;
    CovariateMatrix covariates;
};

/// Covariates from the seed's covariate stream, then simulate_path.
SimulatedSample simulate(const SimConfig& config);

struct PairedSites {
    OrdinalSeries series1, series2;
    CovariateMatrix covariates1, covariates2;  ///< recorded part only
    std::vector<double> uniforms1, uniforms2;  ///< burn-in followed by recorded part
};

/**
 * Two sites with independent covariates and coupled uniforms.
 * Covariates (burn-in included) are drawn per site from separate streams.
 */
PairedSites simulate_paired_sites(const SimConfig& site1, const SimConfig& site2, Coupling coupling);

/// Same, with caller-supplied covariates of burn_in + n rows per site.
PairedSites simulate_paired_sites(const SimConfig& site1, const SimConfig& site2, Coupling coupling,
                                  const CovariateMatrix& full_covariates1, const CovariateMatrix& full_covariates2);

struct Scenario {
    int id = 1;
    Coupling coupling = Coupling::independent;
    int theta_site1 = 1;  ///< parameter set index for site 1
    int theta_site2 = 1;
};

/// The four comparison-test scenarios (1..4).
Scenario comparison_scenario(int id);

}  // namespace acar
