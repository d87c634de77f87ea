#pragma once

// Goodness-of-fit test on the first q autocorrelations of the survivor
// residuals, scaled by an estimate W of their asymptotic covariance that
// accounts for the estimation of theta.
//
// Layout: every Kq-vector is category-major, entry k*q + (h-1) belongs to
// category k+1 and lag h.

#include "acar/fit.hpp"
#include "acar/types.hpp"

namespace acar {

/// rho_h = n^-1 sum_{t > h} e_t (Hadamard) e_{t-h}, stacked category-major. n = e.rows().
Vector residual_autocorrelations(const Matrix& e, int q);
Vector residual_autocorrelations(const ResidualMatrix& residuals, int q);

struct WComponents {
    Matrix C;  ///< Kq x d, row (k,h) = mean e_{k,t-h} xi_t(k,.)
    Matrix D;  ///< Kq x Kq, mean m_t m_t^T with m_t(k,h) = e_{k,t} e_{k,t-h}
    Matrix G;  ///< Kq x d, mean m_t (sum_l e_{l,t} grad eta_{l,t})^T J^-T
    Matrix W;  ///< D + C J^-1 L J^-T C^T + G C^T + C G^T, symmetrised
};

/**
 * W from the raw per-time pieces. `scores` are the per-time scores of the
 * negative log-likelihood, so sum_l e_l grad eta_l = -scores.row(t).
 * Throws NumericalError when J is too ill-conditioned to solve against.
 */
WComponents estimate_W(const ResidualMatrix& residuals, const Matrix& scores, const Matrix& J, const Matrix& L,
                       int q);
Matrix estimate_W(const FitResult& fit, int q);

struct PortmanteauResult {
    int q = 0;
    Index n = 0;
    Vector rho;
    Matrix W_hat;
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    double w_condition = 0.0;

    [[nodiscard]] bool reject(double alpha) const;
};

/// n rho^T W^-1 rho against chi-square(Kq), using a solve guarded at kConditionLimit.
PortmanteauResult portmanteau_statistic(const Vector& rho, const Matrix& W, Index n, int q);
PortmanteauResult portmanteau_test(const FitResult& fit, int q);

}  // namespace acar
