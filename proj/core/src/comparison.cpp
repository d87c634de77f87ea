#include "acar/comparison.hpp"

#include "acar/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace acar {

namespace {

void check_compatible(const FitResult& fit1, const FitResult& fit2) {
    if (fit1.K() != fit2.K() || fit1.P() != fit2.P()) {
        throw InputError("models have different parameterisations (K or P differ)");
    }
    for (const FitResult* f : {&fit1, &fit2}) {
        if (!f->inference_available) throw NumericalError("a fit has no sandwich covariance: " + f->inference_error);
    }
}

Eigen::LDLT<Matrix> guarded_solver(const Matrix& J) {
    const double condition = symmetric_condition(J);
    if (!(condition <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "information matrix J is numerically singular (condition number " << condition << ")";
        throw NumericalError(msg.str());
    }
    return Eigen::LDLT<Matrix>(J);
}

}  // namespace

std::string to_string(CrossCovarianceMode mode) {
    return mode == CrossCovarianceMode::assumed_zero ? "assumed-zero" : "empirical";
}

CrossCovarianceMode parse_cross_covariance_mode(const std::string& name) {
    if (name == "assumed-zero" || name == "zero") return CrossCovarianceMode::assumed_zero;
    if (name == "empirical") return CrossCovarianceMode::empirical;
    throw InputError("unknown cross-covariance mode '" + name + "' (expected assumed-zero or empirical)");
}

std::string to_string(CrossTermSign sign) { return sign == CrossTermSign::published ? "published" : "difference"; }

CrossTermSign parse_cross_term_sign(const std::string& name) {
    if (name == "published") return CrossTermSign::published;
    if (name == "difference") return CrossTermSign::difference;
    throw InputError("unknown cross-term sign '" + name + "' (expected published or difference)");
}

Matrix cross_score_covariance(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode) {
    const Index d = fit1.dimension();
    if (fit2.dimension() != d) throw InputError("models have different parameter dimensions");
    if (mode == CrossCovarianceMode::assumed_zero) return Matrix::Zero(d, d);
    if (fit1.scores.rows() != fit2.scores.rows()) {
        throw InputError("empirical cross-covariance needs equal-length, time-aligned series");
    }
    return fit2.scores.transpose() * fit1.scores / static_cast<double>(fit1.scores.rows());
}

Matrix comparison_covariance(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode,
                             CrossTermSign sign) {
    check_compatible(fit1, fit2);
    const auto n1 = static_cast<double>(fit1.n_obs);
    // fit.covariance is J^-1 L J^-T / n, so this is also correct for unequal lengths.
    Matrix V = n1 * (fit1.covariance + fit2.covariance);
    if (mode == CrossCovarianceMode::empirical) {
        const Matrix S = cross_score_covariance(fit1, fit2, mode);
        const auto solver1 = guarded_solver(fit1.J_hat);
        const auto solver2 = guarded_solver(fit2.J_hat);
        const Matrix A = solver1.solve(solver2.solve(S).transpose()).transpose();  // J2^-1 S J1^-T
        const double s = sign == CrossTermSign::published ? 1.0 : -1.0;
        V += s * (A + A.transpose());
    }
    return 0.5 * (V + V.transpose());
}

bool ComparisonResult::reject(double alpha) const {
    return global_available && global_statistic > chi_square_critical(alpha, static_cast<double>(global_df));
}

ComparisonResult compare_models(const FitResult& fit1, const FitResult& fit2, CrossCovarianceMode mode,
                                CrossTermSign sign) {
    ComparisonResult out;
    out.S_mode = mode;
    out.sign = sign;
    out.n = fit1.n_obs;
    out.V_hat = comparison_covariance(fit1, fit2, mode, sign);
    out.difference = fit1.theta_hat.flat() - fit2.theta_hat.flat();
    const Index d = out.difference.size();
    const auto n = static_cast<double>(out.n);

    out.per_param_z = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    out.per_param_p = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    for (Index p = 0; p < d; ++p) {
        const double v = out.V_hat(p, p);
        if (v > 0.0) {
            out.per_param_z[p] = out.difference[p] * std::sqrt(n / v);
            out.per_param_p[p] = normal_two_sided(out.per_param_z[p]);
        }
    }

    out.global_df = static_cast<int>(d);
    out.v_condition = symmetric_condition(out.V_hat);
    if (out.difference.isZero(0.0)) {
        out.global_available = true;
        out.global_statistic = 0.0;
        out.global_p = 1.0;
    } else if (out.v_condition <= kConditionLimit) {
        out.global_available = true;
        out.global_statistic = std::max(0.0, n * out.difference.dot(out.V_hat.ldlt().solve(out.difference)));
        out.global_p = chi_square_upper_tail(out.global_statistic, static_cast<double>(d));
    } else {
        std::ostringstream msg;
        msg << "comparison covariance V is numerically singular (condition number " << out.v_condition << ")";
        out.global_error = msg.str();
    }
    return out;
}

}  // namespace acar
