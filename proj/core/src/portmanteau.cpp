#include "acar/portmanteau.hpp"

#include "acar/distributions.hpp"

#include <algorithm>
#include <sstream>

namespace acar {

namespace {

void check_lags(Index n, int q) {
    if (q < 1) throw InputError("number of lags q must be at least 1");
    if (q >= n) throw InputError("number of lags q must be below the residual length " + std::to_string(n));
}

// m_t(k, h) = e_{k,t} e_{k,t-h}, zero when t < h.
Vector lag_products(const Matrix& e, Index t, int q) {
    const Index K = e.cols();
    Vector m = Vector::Zero(K * q);
    for (Index k = 0; k < K; ++k) {
        for (int h = 1; h <= q && h <= t; ++h) m[k * q + h - 1] = e(t, k) * e(t - h, k);
    }
    return m;
}

}  // namespace

Vector residual_autocorrelations(const Matrix& e, int q) {
    const Index n = e.rows();
    check_lags(n, q);
    Vector rho = Vector::Zero(e.cols() * q);
    for (Index t = 1; t < n; ++t) rho += lag_products(e, t, q);
    return rho / static_cast<double>(n);
}

Vector residual_autocorrelations(const ResidualMatrix& residuals, int q) {
    return residual_autocorrelations(residuals.e, q);
}

WComponents estimate_W(const ResidualMatrix& residuals, const Matrix& scores, const Matrix& J, const Matrix& L,
                       int q) {
    const Matrix& e = residuals.e;
    const Index n = e.rows();
    const Index K = e.cols();
    const Index d = J.rows();
    check_lags(n, q);
    if (scores.rows() != n || scores.cols() != d || residuals.xi.rows() != n * K || residuals.xi.cols() != d ||
        J.cols() != d || L.rows() != d || L.cols() != d) {
        throw InputError("residuals, scores, J and L have inconsistent shapes");
    }

    const Index m = K * q;
    WComponents out;
    out.C = Matrix::Zero(m, d);
    out.D = Matrix::Zero(m, m);
    Matrix cross = Matrix::Zero(m, d);  // mean m_t (sum_l e_l grad eta_l)^T
    for (Index t = 0; t < n; ++t) {
        const Vector mt = lag_products(e, t, q);
        out.D.noalias() += mt * mt.transpose();
        cross.noalias() -= mt * scores.row(t);
        for (Index k = 0; k < K; ++k) {
            for (int h = 1; h <= q && h <= t; ++h) {
                out.C.row(k * q + h - 1) += e(t - h, k) * residuals.jacobian(t, k);
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.C *= inv_n;
    out.D *= inv_n;
    cross *= inv_n;

    const double condition = symmetric_condition(J);
    if (!(condition <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "information matrix J is numerically singular (condition number " << condition << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::LDLT<Matrix> solver(J);
    out.G = solver.solve(cross.transpose()).transpose();      // cross J^-T (J symmetric)
    const Matrix JinvCt = solver.solve(out.C.transpose());     // J^-1 C^T
    const Matrix middle = JinvCt.transpose() * L * JinvCt;     // C J^-1 L J^-T C^T
    const Matrix GC = out.G * out.C.transpose();
    Matrix W = out.D + middle + GC + GC.transpose();
    out.W = 0.5 * (W + W.transpose());
    return out;
}

Matrix estimate_W(const FitResult& fit, int q) {
    if (fit.J_hat.size() == 0) throw NumericalError("fit carries no information matrix");
    return estimate_W(fit.residuals, fit.scores, fit.J_hat, fit.L_hat, q).W;
}

bool PortmanteauResult::reject(double alpha) const {
    return statistic > chi_square_critical(alpha, static_cast<double>(df));
}

PortmanteauResult portmanteau_statistic(const Vector& rho, const Matrix& W, Index n, int q) {
    if (W.rows() != rho.size() || W.cols() != rho.size()) throw InputError("W does not match rho");
    if (q < 1 || rho.size() % q != 0) throw InputError("rho length is not a multiple of q");
    PortmanteauResult out;
    out.q = q;
    out.n = n;
    out.rho = rho;
    out.W_hat = W;
    out.df = static_cast<int>(rho.size());
    out.w_condition = symmetric_condition(W);
    if (rho.isZero(0.0)) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    if (!(out.w_condition <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "portmanteau covariance W is numerically singular (condition number " << out.w_condition << ")";
        throw NumericalError(msg.str());
    }
    const Vector x = W.ldlt().solve(rho);
    out.statistic = std::max(0.0, static_cast<double>(n) * rho.dot(x));
    out.p_value = chi_square_upper_tail(out.statistic, static_cast<double>(out.df));
    return out;
}

PortmanteauResult portmanteau_test(const FitResult& fit, int q) {
    const Vector rho = residual_autocorrelations(fit.residuals, q);
    return portmanteau_statistic(rho, estimate_W(fit, q), fit.residuals.length(), q);
}

}  // namespace acar
