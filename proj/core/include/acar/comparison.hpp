#pragma once

// Tests whether two fitted ACAR models share the same parameter.

#include "acar/fit.hpp"
#include "acar/types.hpp"

#include <string>

namespace acar {

/// How the cross-covariance S of the two score sequences is obtained.
enum class CrossCovarianceMode { assumed_zero, empirical };

std::string to_string(CrossCovarianceMode mode);
CrossCovarianceMode parse_cross_covariance_mode(const std::string& name);

/**
 * Sign attached to the two cross terms of V. `published` adds them, as in the
 * original formulation of the test. `difference` subtracts them, which is the
 * asymptotic covariance of sqrt(n) (theta1_hat - theta2_hat) when the score
 * sequences are correlated. The two agree when S = 0.
 */
enum class CrossTermSign { published, difference };

std::string to_string(CrossTermSign sign);
CrossTermSign parse_cross_term_sign(const std::string& name);

/// S = n^-1 sum_t s2_t s1_t^T, or exactly zero in assumed_zero mode.
Matrix cross_score_covariance(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode);

/**
 * V = J1^-1 L1 J1^-T + J2^-1 L2 J2^-T +/- (J2^-1 S J1^-T + J1^-1 S^T J2^-T), symmetrised.
 * With unequal lengths (assumed_zero only) the second sandwich is rescaled by
 * n1/n2 so that V/n1 is the covariance of the difference.
 */
Matrix comparison_covariance(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode,
                             CrossTermSign sign = CrossTermSign::published);

struct ComparisonResult {
    Index n = 0;
    Vector difference;  ///< theta1_hat - theta2_hat
    Vector per_param_z;
    Vector per_param_p;  ///< two-sided
    bool global_available = false;
    std::string global_error;
    double global_statistic = 0.0;
    int global_df = 0;
    double global_p = 1.0;
    double v_condition = 0.0;
    Matrix V_hat;
    CrossCovarianceMode S_mode = CrossCovarianceMode::assumed_zero;
    CrossTermSign sign = CrossTermSign::published;

    /// Global test rejection at level alpha; false when the global test is unavailable.
    [[nodiscard]] bool reject(double alpha) const;
};

ComparisonResult compare_models(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode,
                                CrossTermSign sign = CrossTermSign::published);

}  // namespace acar
