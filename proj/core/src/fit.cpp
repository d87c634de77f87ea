#include "acar/fit.hpp"

#include "acar/parallel.hpp"
#include "acar/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace acar {

namespace {

constexpr double kBoundSlack = 1e-9;

void collect_warnings(const OrdinalSeries& series, const CovariateMatrix& covariates, FitResult& out) {
    const Index K = series.K();
    const Index d = 3 * K + covariates.cols();
    if (series.size() < d + 2) {
        out.warnings.push_back("series length " + std::to_string(series.size()) + " is below 3K+P+2 = " +
                               std::to_string(d + 2));
    }
    if (series.distinct_levels() < 2) out.warnings.push_back("constant series: fewer than 2 distinct levels");
    std::vector<bool> seen(static_cast<std::size_t>(K + 1), false);
    for (int y : series.levels()) seen[static_cast<std::size_t>(y)] = true;
    for (int j = 0; j <= K; ++j) {
        if (!seen[static_cast<std::size_t>(j)]) {
            out.warnings.push_back("level " + std::to_string(j) + " is never observed");
        }
    }
}

// Fills everything in `out` that depends only on theta_hat.
void complete_fit(const OrdinalSeries& series, const CovariateMatrix& covariates, const FitConfig& config,
                  FitResult& out) {
    const ParameterVector& theta = out.theta_hat;
    const Index K = theta.K();
    const Index d = theta.size();
    out.covariate_names = covariates.names();
    out.parameter_names = theta.names(covariates.names());
    out.epsilon = config.epsilon;
    out.eta0 = config.initial_eta(K);
    out.n_obs = series.size() - 1;

    LatentPath path = compute_latent_path(theta, series, covariates, out.eta0);
    latent_gradients(theta, series, covariates, path);
    out.residuals = residual_path(theta, series, covariates, path);
    out.scores = scores_from_residuals(out.residuals, path);
    out.eta_grad = path.grad.bottomRows(out.n_obs * K);
    out.negloglik = negative_log_likelihood(theta, series, covariates, out.eta0);
    out.aic = aic(out.negloglik, d);

    out.at_bound.assign(static_cast<std::size_t>(K), false);
    for (Index j = 0; j < K; ++j) {
        out.at_bound[static_cast<std::size_t>(j)] = std::abs(theta.beta(j)) >= 1.0 - config.epsilon - kBoundSlack;
    }

    const auto hessians = hessian_path(theta, series, covariates, path);
    Matrix J = Matrix::Zero(d, d);
    for (const auto& h : hessians) J += h;
    J /= static_cast<double>(out.n_obs);
    Matrix L = out.scores.transpose() * out.scores / static_cast<double>(out.n_obs);
    out.J_hat = 0.5 * (J + J.transpose());
    out.L_hat = 0.5 * (L + L.transpose());

    try {
        SandwichResult s = sandwich_from_moments(out.J_hat, out.L_hat, out.n_obs);
        out.j_condition = s.condition;
        out.covariance = std::move(s.covariance);
        out.std_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        out.t_stats = theta.flat().cwiseQuotient(out.std_errors);
        out.inference_available = true;
    } catch (const NumericalError& err) {
        out.j_condition = symmetric_condition(out.J_hat);
        out.inference_available = false;
        out.inference_error = err.what();
        out.covariance = Matrix();
        out.std_errors = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
        out.t_stats = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    }
    if (out.any_at_bound()) out.warnings.push_back("a feedback coefficient sits on the parameter bound");
}

}  // namespace

void FitConfig::validate() const {
    if (n_starts < 1) throw InputError("n_starts must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 0.5)");
    if (max_iterations < 1) throw InputError("max_iterations must be positive");
    if (!(gradient_tolerance >= 0.0) || !(relative_tolerance >= 0.0)) throw InputError("tolerances must be >= 0");
    if (!(start_beta_radius >= 0.0 && start_beta_radius < 1.0 - epsilon)) {
        throw InputError("start_beta_radius must lie inside the feedback bound");
    }
}

bool FitResult::any_at_bound() const {
    return std::any_of(at_bound.begin(), at_bound.end(), [](bool b) { return b; });
}

std::vector<ParameterVector> random_starts(Index K, Index P, const FitConfig& config) {
    Rng rng(config.seed, Stream::starts);
    std::vector<ParameterVector> starts;
    starts.reserve(static_cast<std::size_t>(config.n_starts));
    for (int s = 0; s < config.n_starts; ++s) {
        ParameterVector theta(K, P);
        for (Index i = 0; i < 2 * K + P; ++i) theta.flat()[i] = rng.uniform(-config.start_radius, config.start_radius);
        for (Index j = 0; j < K; ++j) {
            theta.flat()[theta.beta_index(j)] = rng.uniform(-config.start_beta_radius, config.start_beta_radius);
        }
        starts.push_back(std::move(theta));
    }
    return starts;
}

FitResult fit(const OrdinalSeries& series, const CovariateMatrix& covariates, const FitConfig& config) {
    config.validate();
    const auto starts = random_starts(series.K(), covariates.cols(), config);
    return fit_from_starts(series, covariates, config, starts);
}

FitResult fit_from_starts(const OrdinalSeries& series, const CovariateMatrix& covariates, const FitConfig& config,
                          std::span<const ParameterVector> starts) {
    config.validate();
    if (starts.empty()) throw InputError("at least one starting point is required");
    const Index K = series.K();
    const Index P = covariates.cols();
    ParameterVector probe(K, P);
    check_aligned(probe, series, covariates);

    const Vector eta0 = config.initial_eta(K);
    const auto [lower, upper] = parameter_box(K, P, config.epsilon);

    LbfgsbOptions options;
    options.max_iterations = config.max_iterations;
    options.pg_tolerance = config.gradient_tolerance;
    options.rel_tolerance = config.relative_tolerance;

    std::vector<LbfgsbResult> runs(starts.size());
    parallel_for(static_cast<std::int64_t>(starts.size()), worker_count(config.threads), [&](std::int64_t s) {
        const ObjectiveFunction objective = [&](const Vector& x, Vector& grad) {
            return negative_log_likelihood(ParameterVector(K, P, x), series, covariates, eta0, grad);
        };
        runs[static_cast<std::size_t>(s)] =
            minimize_box(objective, starts[static_cast<std::size_t>(s)].flat(), lower, upper, options);
    });

    // Lowest objective wins; ties go to the lowest start index. Converged runs first.
    int best = -1;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
        for (std::size_t s = 0; s < runs.size(); ++s) {
            const auto& r = runs[s];
            if (!std::isfinite(r.f) || (pass == 0 && !r.converged)) continue;
            if (best < 0 || r.f < runs[static_cast<std::size_t>(best)].f) best = static_cast<int>(s);
        }
    }

    FitResult out;
    for (const auto& r : runs) out.start_objectives.push_back(r.f);
    collect_warnings(series, covariates, out);
    if (best < 0) {
        out.theta_hat = starts.front();
        out.converged = false;
        out.status = "all starts failed: objective not finite";
        out.parameter_names = out.theta_hat.names(covariates.names());
        out.covariate_names = covariates.names();
        out.negloglik = std::numeric_limits<double>::infinity();
        out.aic = std::numeric_limits<double>::infinity();
        out.n_obs = series.size() - 1;
        out.epsilon = config.epsilon;
        out.eta0 = eta0;
        out.inference_error = out.status;
        return out;
    }
    auto& chosen = runs[static_cast<std::size_t>(best)];
    if (config.polish && chosen.converged && chosen.projected_gradient > config.gradient_tolerance) {
        // The relative-change stop can fire well before the gradient is small; finish the winner on the gradient.
        LbfgsbOptions tight = options;
        tight.rel_tolerance = 0.0;
        const ObjectiveFunction objective = [&](const Vector& x, Vector& grad) {
            return negative_log_likelihood(ParameterVector(K, P, x), series, covariates, eta0, grad);
        };
        const auto polished = minimize_box(objective, chosen.x, lower, upper, tight);
        if (std::isfinite(polished.f) && polished.f <= chosen.f) {
            chosen.x = polished.x;
            chosen.f = polished.f;
            chosen.projected_gradient = polished.projected_gradient;
            chosen.iterations += polished.iterations;
            chosen.evaluations += polished.evaluations;
        }
    }
    out.theta_hat = ParameterVector(K, P, chosen.x);
    out.converged = chosen.converged;
    out.status = chosen.converged ? chosen.status : "no start converged; best run: " + chosen.status;
    out.best_start = best;
    out.iterations = chosen.iterations;
    out.evaluations = chosen.evaluations;
    out.projected_gradient = chosen.projected_gradient;
    complete_fit(series, covariates, config, out);
    return out;
}

FitResult evaluate_fit(const ParameterVector& theta, const OrdinalSeries& series, const CovariateMatrix& covariates,
                       const FitConfig& config) {
    check_aligned(theta, series, covariates);
    FitResult out;
    out.theta_hat = theta;
    out.converged = true;
    out.status = "evaluated at a fixed parameter";
    collect_warnings(series, covariates, out);
    const auto [lower, upper] = parameter_box(theta.K(), theta.P(), config.epsilon);
    Vector grad;
    negative_log_likelihood(theta, series, covariates, config.initial_eta(theta.K()), grad);
    out.projected_gradient = projected_gradient_norm(theta.flat(), grad, lower, upper);
    complete_fit(series, covariates, config, out);
    return out;
}

double symmetric_condition(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

SandwichResult sandwich_from_moments(const Matrix& J, const Matrix& L, Index n) {
    if (n < 1) throw InputError("sandwich needs at least one observation");
    SandwichResult out;
    out.J = J;
    out.L = L;
    out.condition = symmetric_condition(J);
    if (!(out.condition <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "information matrix J is numerically singular (condition number " << out.condition << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::LDLT<Matrix> solver(J);
    const Matrix left = solver.solve(L);                      // J^-1 L
    Matrix cov = solver.solve(left.transpose()).transpose();  // J^-1 L J^-1
    cov /= static_cast<double>(n);
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

SandwichResult sandwich_covariance(const ParameterVector& theta, const OrdinalSeries& series,
                                   const CovariateMatrix& covariates, const Vector& eta0,
                                   std::span<const Index> subset) {
    LatentPath path = compute_latent_path(theta, series, covariates, eta0);
    latent_gradients(theta, series, covariates, path);
    const Matrix scores = score_path(theta, series, covariates, path);
    const auto hessians = hessian_path(theta, series, covariates, path);
    const Index n = scores.rows();
    const Index d = theta.size();

    std::vector<Index> idx(subset.begin(), subset.end());
    if (idx.empty()) {
        for (Index i = 0; i < d; ++i) idx.push_back(i);
    }
    for (Index i : idx) {
        if (i < 0 || i >= d) throw InputError("subset index out of range");
    }
    const Index m = static_cast<Index>(idx.size());
    Matrix J = Matrix::Zero(m, m);
    Matrix L = Matrix::Zero(m, m);
    for (Index t = 0; t < n; ++t) {
        const auto& h = hessians[static_cast<std::size_t>(t)];
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) {
                J(a, b) += h(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                L(a, b) += scores(t, idx[static_cast<std::size_t>(a)]) * scores(t, idx[static_cast<std::size_t>(b)]);
            }
        }
    }
    J /= static_cast<double>(n);
    L /= static_cast<double>(n);
    return sandwich_from_moments(J, L, n);
}

double aic(double negloglik, Index n_parameters) {
    return 2.0 * static_cast<double>(n_parameters) + 2.0 * negloglik;
}

double aic(const FitResult& fit) { return aic(fit.negloglik, fit.dimension()); }

ThresholdResult ThresholdResult::unscaled(double covariate_scale) const {
    if (!(covariate_scale > 0.0)) throw InputError("covariate scale must be positive");
    return {estimate / covariate_scale, std_error / covariate_scale, ci_low / covariate_scale,
            ci_high / covariate_scale};
}

ThresholdResult quadratic_threshold(double linear, double quadratic, const Eigen::Matrix2d& covariance,
                                    bool truncate_at_zero) {
    if (!(std::abs(quadratic) > 1e-12)) throw NumericalError("quadratic coefficient is zero: vertex undefined");
    ThresholdResult out;
    out.estimate = -linear / (2.0 * quadratic);
    const Eigen::Vector2d grad(-1.0 / (2.0 * quadratic), linear / (2.0 * quadratic * quadratic));
    const double variance = grad.dot(covariance * grad);
    out.std_error = std::sqrt(std::max(variance, 0.0));
    constexpr double z = 1.959963984540054;
    out.ci_low = out.estimate - z * out.std_error;
    out.ci_high = out.estimate + z * out.std_error;
    if (truncate_at_zero && out.estimate >= 0.0) out.ci_low = std::max(out.ci_low, 0.0);
    return out;
}

ThresholdResult quadratic_threshold(const FitResult& fit, Index linear_index, Index quadratic_index,
                                    bool truncate_at_zero) {
    const Index d = fit.dimension();
    if (linear_index < 0 || linear_index >= d || quadratic_index < 0 || quadratic_index >= d) {
        throw InputError("threshold parameter index out of range");
    }
    if (!fit.inference_available) throw NumericalError("no covariance available: " + fit.inference_error);
    Eigen::Matrix2d cov;
    cov << fit.covariance(linear_index, linear_index), fit.covariance(linear_index, quadratic_index),
        fit.covariance(quadratic_index, linear_index), fit.covariance(quadratic_index, quadratic_index);
    return quadratic_threshold(fit.theta_hat.flat()[linear_index], fit.theta_hat.flat()[quadratic_index], cov,
                               truncate_at_zero);
}

}  // namespace acar
