#pragma once

#include "acar/lbfgsb.hpp"
#include "acar/model.hpp"
#include "acar/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acar {

inline constexpr double kConditionLimit = 1e12;

struct FitConfig {
    int n_starts = 20;
    double epsilon = kDefaultEpsilon;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;   ///< projected-gradient sup-norm
    double relative_tolerance = 1e-9;   ///< relative objective change
    std::uint64_t seed = 1;
    Vector eta0;                        ///< empty: 0.5 for every category
    double start_radius = 2.0;          ///< omega, gamma, alpha starts in [-r, r]
    double start_beta_radius = 0.9;     ///< beta starts in [-r, r]
    int threads = 1;                    ///< workers across starts
    bool polish = true;                 ///< rerun the winner with only the gradient criterion

    void validate() const;
    [[nodiscard]] Vector initial_eta(Index K) const { return eta0.size() ? eta0 : default_eta0(K); }
};

/// Estimate plus everything the diagnostics need downstream.
struct FitResult {
    ParameterVector theta_hat;
    std::vector<std::string> parameter_names;
    std::vector<std::string> covariate_names;
    Index n_obs = 0;  ///< number of conditional likelihood terms (series length - 1)
    double negloglik = 0.0;
    double aic = 0.0;

    bool inference_available = false;
    std::string inference_error;
    double j_condition = 0.0;
    Matrix J_hat, L_hat;
    Matrix covariance;  ///< J^-1 L J^-1 / n_obs
    Vector std_errors;
    Vector t_stats;

    ResidualMatrix residuals;
    Matrix eta_grad;  ///< (n_obs*K) x d latent gradients over the conditioning window
    Matrix scores;    ///< n_obs x d

    bool converged = false;
    std::vector<bool> at_bound;  ///< per beta_j
    std::string status;
    int best_start = -1;
    int iterations = 0;
    int evaluations = 0;
    double projected_gradient = 0.0;
    std::vector<double> start_objectives;
    std::vector<std::string> warnings;

    double epsilon = kDefaultEpsilon;
    Vector eta0;

    [[nodiscard]] Index K() const noexcept { return theta_hat.K(); }
    [[nodiscard]] Index P() const noexcept { return theta_hat.P(); }
    [[nodiscard]] Index dimension() const noexcept { return theta_hat.size(); }
    [[nodiscard]] bool any_at_bound() const;
};

/// Multi-start box-constrained conditional maximum likelihood.
FitResult fit(const OrdinalSeries& series, const CovariateMatrix& covariates, const FitConfig& config = {});

/// Same optimiser and selection rule, from caller-supplied starting points.
FitResult fit_from_starts(const OrdinalSeries& series, const CovariateMatrix& covariates, const FitConfig& config,
                          std::span<const ParameterVector> starts);

/// The deterministic random starting points used by fit().
std::vector<ParameterVector> random_starts(Index K, Index P, const FitConfig& config);

/// FitResult at a fixed theta (no optimisation): residuals, scores, J, L, sandwich.
FitResult evaluate_fit(const ParameterVector& theta, const OrdinalSeries& series, const CovariateMatrix& covariates,
                       const FitConfig& config = {});

struct SandwichResult {
    Matrix J;
    Matrix L;
    Matrix covariance;  ///< J^-1 L J^-1 / n
    double condition = 0.0;
};

/**
 * J = mean h_t, L = mean s_t s_t^T at theta, covariance = J^-1 L J^-T / n.
 * With `subset`, everything is restricted to those flattened coordinates.
 * Throws NumericalError carrying the condition number when J is singular.
 */
SandwichResult sandwich_covariance(const ParameterVector& theta, const OrdinalSeries& series,
                                   const CovariateMatrix& covariates, const Vector& eta0,
                                   std::span<const Index> subset = {});

/// Sandwich from already averaged J and L.
SandwichResult sandwich_from_moments(const Matrix& J, const Matrix& L, Index n);

/// Condition number of a symmetric matrix (infinite when not positive definite).
double symmetric_condition(const Matrix& A);

double aic(double negloglik, Index n_parameters);
double aic(const FitResult& fit);

struct ThresholdResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    /// Same interval expressed in unscaled covariate units.
    [[nodiscard]] ThresholdResult unscaled(double covariate_scale) const;
};

/**
 * Vertex -b_lin / (2 b_quad) of a quadratic covariate effect with a
 * delta-method 95% interval. With truncate_at_zero the lower limit is
 * clipped at 0 (temperature ranges cannot be negative).
 */
ThresholdResult quadratic_threshold(double linear, double quadratic, const Eigen::Matrix2d& covariance,
                                    bool truncate_at_zero = false);
ThresholdResult quadratic_threshold(const FitResult& fit, Index linear_index, Index quadratic_index,
                                    bool truncate_at_zero = false);

}  // namespace acar
