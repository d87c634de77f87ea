#pragma once

// Adjacent-category autoregression: latent recursion, probability transform,
// conditional likelihood and its analytic derivatives.
//
// Time convention: rows 0..n-1 of a LatentPath line up with the observations.
// Row 0 holds the initial latent value and is paired with the first
// observation, which only seeds the lagged response. Per-time quantities
// (scores, Hessian terms, residuals) cover t = 1..n-1 and are stored at row t-1.

#include "acar/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace acar {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr double kDefaultEta0 = 0.5;

struct Validity {
    bool valid = true;
    Index index = -1;      ///< first violated flattened coordinate, -1 when valid
    double bound = 0.0;    ///< the bound that coordinate broke
    std::string message;

    explicit operator bool() const noexcept { return valid; }
};

/// Checks theta against the box: |beta_j| <= 1 - epsilon, every other |theta_i| <= 1/epsilon.
Validity validate_parameters(const ParameterVector& theta, double epsilon = kDefaultEpsilon);

/// Lower/upper corners of the parameter box for (K, P).
std::pair<Vector, Vector> parameter_box(Index K, Index P, double epsilon = kDefaultEpsilon);

Vector default_eta0(Index K);

struct LatentPath {
    Matrix eta;   ///< n x K
    Matrix grad;  ///< (n*K) x (3K+P); row t*K + k is the gradient of eta_{k,t}
    Vector eta0;

    [[nodiscard]] bool has_gradients() const noexcept { return grad.size() > 0; }
    [[nodiscard]] auto gradient(Index t, Index k) const { return grad.row(t * eta.cols() + k); }
};

/// Runs the latent recursion. Throws NumericalError naming (t, j) on overflow.
LatentPath compute_latent_path(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0);

/// Fills path.grad from the derivative recursions, starting from a zero gradient at t = 0.
void latent_gradients(const ParameterVector& theta, const OrdinalSeries& series,
                      const CovariateMatrix& covariates, LatentPath& path);

/// (pi_0, ..., pi_K) from adjacent-category logits, via log-sum-exp over cumulative sums.
Vector adjacent_to_probs(std::span<const double> eta);
Vector adjacent_to_probs(const Vector& eta);

/// Conditional survivor probabilities P(Y >= k), k = 1..K.
Vector survivor_probs(const Vector& eta);

/// Negative conditional log-likelihood summed over t = 1..n-1.
double negative_log_likelihood(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0);

/**
 * Objective and gradient in one pass without materialising the latent
 * gradient path. This is what the optimizer calls.
 */
double negative_log_likelihood(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0,
                               Vector& gradient);

struct ResidualMatrix {
    Matrix e;   ///< (n-1) x K, e_{k,t} = 1{Y_t >= k} - P(Y_t >= k | past)
    Matrix xi;  ///< ((n-1)*K) x (3K+P); row (t-1)*K + k is the gradient of e_{k,t}

    [[nodiscard]] Index length() const noexcept { return e.rows(); }
    [[nodiscard]] auto jacobian(Index row, Index k) const { return xi.row(row * e.cols() + k); }
};

ResidualMatrix residual_path(const ParameterVector& theta, const OrdinalSeries& series,
                             const CovariateMatrix& covariates, const LatentPath& path);

/// Per-time scores of the negative log-likelihood, (n-1) x (3K+P).
Matrix score_path(const ParameterVector& theta, const OrdinalSeries& series,
                  const CovariateMatrix& covariates, const LatentPath& path);

/// Score from already computed residuals: s_t = -sum_k e_{k,t} grad eta_{k,t}.
Matrix scores_from_residuals(const ResidualMatrix& residuals, const LatentPath& path);

/// Per-time information-style Hessian terms h_t, symmetrised.
std::vector<Matrix> hessian_path(const ParameterVector& theta, const OrdinalSeries& series,
                                 const CovariateMatrix& covariates, const LatentPath& path);

/// The three parameter sets used in the simulation study (which = 1, 2, 3; K = 3, P = 5).
ParameterVector table1_theta(int which);

void check_aligned(const ParameterVector& theta, const OrdinalSeries& series,
                   const CovariateMatrix& covariates);

}  // namespace acar
