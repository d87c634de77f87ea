#pragma once

// Covariate-set search: fit every candidate, keep the fits whose
// Portmanteau test does not reject and whose feedback coefficients are
// interior, then rank by the number of significant covariates and AIC.

#include "acar/fit.hpp"
#include "acar/types.hpp"

#include <string>
#include <vector>

namespace acar {

struct CandidateSet {
    std::vector<std::string> columns;

    [[nodiscard]] std::string label() const;  ///< columns joined by '+', or "none"
};

/**
 * Every set in which each term is absent, linear, or (when `<term>_sq` is in
 * `available`) linear plus square, with at most max_covariates columns.
 * Ordered by column count, then lexicographically by term position.
 */
std::vector<CandidateSet> enumerate_candidate_sets(const std::vector<std::string>& terms,
                                                   const std::vector<std::string>& available, int max_covariates);

struct SearchConfig {
    FitConfig fit;
    int q = 1;
    double alpha = 0.05;
    double z_critical = 1.959963984540054;  ///< |t| above this counts as significant
    int threads = 0;
};

struct CandidateOutcome {
    int index = 0;
    CandidateSet set;
    bool fitted = false;
    std::string error;
    FitResult fit;
    double portmanteau_statistic = 0.0;
    double portmanteau_p = 0.0;
    bool passed_portmanteau = false;
    bool at_bound = false;
    bool eligible = false;
    std::string excluded_reason;  ///< "at-bound", "portmanteau", "not converged", "no covariance", or the error
    int significant = 0;
    int rank = 0;  ///< 1-based among eligible candidates, 0 otherwise
};

struct ModelSearchReport {
    std::vector<CandidateOutcome> candidates;  ///< in candidate order
    int selected = -1;                         ///< candidate index, -1 when nothing is eligible
    double alpha = 0.05;
    int q = 1;
};

/// Quadratic columns must come with their linear column; checked up front.
ModelSearchReport search_models(const OrdinalSeries& series, const CovariateMatrix& table,
                                const std::vector<CandidateSet>& candidates, const SearchConfig& config = {});

}  // namespace acar
