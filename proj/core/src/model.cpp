#include "acar/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace acar {

namespace {

// Cumulative-sum softmax over levels 0..K. Fills probabilities and survivors
// (survivor[k] = P(Y >= k), survivor[0] = 1) and returns log Z - max shift so
// that log pi_j = S_j - log_norm.
struct LevelProbabilities {
    Vector pi;
    Vector survivor;
    Vector cumsum;  // S_0 = 0, S_j = eta_1 + ... + eta_j
    double log_norm = 0.0;

    explicit LevelProbabilities(Index K) : pi(K + 1), survivor(K + 1), cumsum(K + 1) {}

    template <typename Eta>
    void update(const Eta& eta) {
        const Index K = eta.size();
        cumsum[0] = 0.0;
        double shift = 0.0;
        for (Index j = 0; j < K; ++j) {
            cumsum[j + 1] = cumsum[j] + eta[j];
            shift = std::max(shift, cumsum[j + 1]);
        }
        double z = 0.0;
        for (Index j = 0; j <= K; ++j) {
            pi[j] = std::exp(cumsum[j] - shift);
            z += pi[j];
        }
        pi /= z;
        log_norm = shift + std::log(z);
        survivor[K] = pi[K];
        for (Index j = K - 1; j >= 0; --j) survivor[j] = survivor[j + 1] + pi[j];
        survivor[0] = 1.0;
    }

    [[nodiscard]] double log_prob(int level) const { return cumsum[level] - log_norm; }
};

// Cov(1{Y >= k}, 1{Y >= l}) for k, l = 1..K, stored zero-based.
Matrix indicator_covariance(const Vector& survivor) {
    const Index K = survivor.size() - 1;
    Matrix m(K, K);
    for (Index k = 0; k < K; ++k) {
        for (Index l = 0; l < K; ++l) {
            m(k, l) = survivor[std::max(k, l) + 1] - survivor[k + 1] * survivor[l + 1];
        }
    }
    return m;
}

[[noreturn]] void throw_overflow(Index t, Index j, double value) {
    std::ostringstream msg;
    msg << "latent process overflow at t=" << t << ", j=" << j + 1 << " (value " << value << ")";
    throw NumericalError(msg.str());
}

}  // namespace

void check_aligned(const ParameterVector& theta, const OrdinalSeries& series, const CovariateMatrix& covariates) {
    if (series.K() != theta.K()) {
        throw InputError("series has K=" + std::to_string(series.K()) + " but parameters have K=" +
                         std::to_string(theta.K()));
    }
    if (covariates.cols() != theta.P()) {
        throw InputError("covariates have " + std::to_string(covariates.cols()) + " columns, parameters expect " +
                         std::to_string(theta.P()));
    }
    if (covariates.rows() != series.size()) {
        throw InputError("covariates have " + std::to_string(covariates.rows()) + " rows, series has " +
                         std::to_string(series.size()));
    }
    if (series.size() < 2) throw InputError("series needs at least 2 observations");
}

Validity validate_parameters(const ParameterVector& theta, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 0.5)");
    const auto names = theta.names();
    const Index first_beta = theta.beta_index(0);
    for (Index i = 0; i < theta.size(); ++i) {
        const double v = theta.flat()[i];
        const double bound = i >= first_beta ? 1.0 - epsilon : 1.0 / epsilon;
        if (!std::isfinite(v) || std::abs(v) > bound) {
            std::ostringstream msg;
            msg << names[static_cast<std::size_t>(i)] << " = " << v << " violates |.| <= " << bound;
            if (i >= first_beta) msg << " (stationarity bound)";
            return Validity{false, i, bound, msg.str()};
        }
    }
    return {};
}

std::pair<Vector, Vector> parameter_box(Index K, Index P, double epsilon) {
    Vector upper = Vector::Constant(3 * K + P, 1.0 / epsilon);
    upper.tail(K).setConstant(1.0 - epsilon);
    return {-upper, upper};
}

Vector default_eta0(Index K) { return Vector::Constant(K, kDefaultEta0); }

LatentPath compute_latent_path(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0) {
    check_aligned(theta, series, covariates);
    const Index K = theta.K();
    const Index n = series.size();
    if (eta0.size() != K || !eta0.allFinite()) throw InputError("eta0 must be a finite vector of length K");

    LatentPath path;
    path.eta0 = eta0;
    path.eta.resize(n, K);
    path.eta.row(0) = eta0.transpose();
    const auto& X = covariates.values();
    for (Index t = 1; t < n; ++t) {
        double common = theta.P() > 0 ? X.row(t - 1).dot(theta.gamma()) : 0.0;
        const int prev = series.level(t - 1);
        if (prev > 0) common += theta.alpha(prev - 1);
        for (Index j = 0; j < K; ++j) {
            const double v = theta.omega(j) + common + theta.beta(j) * path.eta(t - 1, j);
            if (!std::isfinite(v)) throw_overflow(t, j, v);
            path.eta(t, j) = v;
        }
    }
    return path;
}

void latent_gradients(const ParameterVector& theta, const OrdinalSeries& series, const CovariateMatrix& covariates,
                      LatentPath& path) {
    const Index K = theta.K();
    const Index P = theta.P();
    const Index n = series.size();
    const Index d = theta.size();
    if (path.eta.rows() != n || path.eta.cols() != K) throw InputError("latent path does not match the series");
    const auto& X = covariates.values();

    path.grad = Matrix::Zero(n * K, d);
    for (Index t = 1; t < n; ++t) {
        const int prev = series.level(t - 1);
        for (Index k = 0; k < K; ++k) {
            auto row = path.grad.row(t * K + k);
            row = theta.beta(k) * path.grad.row((t - 1) * K + k);
            row[theta.omega_index(k)] += 1.0;
            if (P > 0) row.segment(theta.gamma_index(0), P) += X.row(t - 1);
            if (prev > 0) row[theta.alpha_index(prev - 1)] += 1.0;
            row[theta.beta_index(k)] += path.eta(t - 1, k);
        }
    }
}

Vector adjacent_to_probs(std::span<const double> eta) {
    return adjacent_to_probs(Eigen::Map<const Vector>(eta.data(), static_cast<Index>(eta.size())).eval());
}

Vector adjacent_to_probs(const Vector& eta) {
    LevelProbabilities probs(eta.size());
    probs.update(eta);
    return probs.pi;
}

Vector survivor_probs(const Vector& eta) {
    LevelProbabilities probs(eta.size());
    probs.update(eta);
    return probs.survivor.tail(eta.size());
}

double negative_log_likelihood(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0) {
    const LatentPath path = compute_latent_path(theta, series, covariates, eta0);
    LevelProbabilities probs(theta.K());
    double total = 0.0;
    for (Index t = 1; t < series.size(); ++t) {
        probs.update(path.eta.row(t));
        total -= probs.log_prob(series.level(t));
    }
    if (!std::isfinite(total)) throw NumericalError("negative log-likelihood is not finite");
    return total;
}

double negative_log_likelihood(const ParameterVector& theta, const OrdinalSeries& series,
                               const CovariateMatrix& covariates, const Vector& eta0, Vector& gradient) {
    check_aligned(theta, series, covariates);
    const Index K = theta.K();
    const Index P = theta.P();
    const Index n = series.size();
    if (eta0.size() != K) throw InputError("eta0 must have length K");
    const auto& X = covariates.values();

    // Only the structurally non-zero blocks of grad eta_{k,t} are tracked:
    // column k of dg (P x K) and da (K x K) holds d eta_k / d gamma and d alpha.
    const Matrix Xt = X.transpose();
    const Vector gamma = theta.gamma();
    Vector eta = eta0;
    Vector d_omega = Vector::Zero(K);
    Vector d_beta = Vector::Zero(K);
    Matrix dg = Matrix::Zero(P, K);
    Matrix da = Matrix::Zero(K, K);

    gradient = Vector::Zero(theta.size());
    Vector g_gamma = Vector::Zero(P);
    Vector g_alpha = Vector::Zero(K);
    Vector e(K);
    LevelProbabilities probs(K);
    double total = 0.0;

    for (Index t = 1; t < n; ++t) {
        const int prev = series.level(t - 1);
        const double* x = Xt.data() + (t - 1) * P;
        double common = 0.0;
        for (Index p = 0; p < P; ++p) common += x[p] * gamma[p];
        if (prev > 0) common += theta.alpha(prev - 1);
        for (Index k = 0; k < K; ++k) {
            const double b = theta.beta(k);
            d_beta[k] = eta[k] + b * d_beta[k];
            d_omega[k] = 1.0 + b * d_omega[k];
            double* dgk = dg.data() + k * P;
            for (Index p = 0; p < P; ++p) dgk[p] = x[p] + b * dgk[p];
            double* dak = da.data() + k * K;
            for (Index j = 0; j < K; ++j) dak[j] *= b;
            if (prev > 0) dak[prev - 1] += 1.0;
            eta[k] = theta.omega(k) + common + b * eta[k];
            if (!std::isfinite(eta[k])) throw_overflow(t, k, eta[k]);
        }

        probs.update(eta);
        const int y = series.level(t);
        total -= probs.log_prob(y);
        for (Index k = 0; k < K; ++k) e[k] = (y >= k + 1 ? 1.0 : 0.0) - probs.survivor[k + 1];

        for (Index k = 0; k < K; ++k) {
            gradient[theta.omega_index(k)] -= e[k] * d_omega[k];
            gradient[theta.beta_index(k)] -= e[k] * d_beta[k];
            const double* dgk = dg.data() + k * P;
            for (Index p = 0; p < P; ++p) g_gamma[p] -= e[k] * dgk[p];
            const double* dak = da.data() + k * K;
            for (Index j = 0; j < K; ++j) g_alpha[j] -= e[k] * dak[j];
        }
    }
    gradient.segment(theta.gamma_index(0), P) = g_gamma;
    gradient.segment(theta.alpha_index(0), K) = g_alpha;
    if (!std::isfinite(total)) throw NumericalError("negative log-likelihood is not finite");
    return total;
}

ResidualMatrix residual_path(const ParameterVector& theta, const OrdinalSeries& series,
                             const CovariateMatrix& covariates, const LatentPath& path) {
    const LatentPath* source = &path;
    LatentPath with_grad;
    if (!path.has_gradients()) {
        with_grad = path;
        latent_gradients(theta, series, covariates, with_grad);
        source = &with_grad;
    }
    const Index K = theta.K();
    const Index n = series.size();
    ResidualMatrix out;
    out.e.resize(n - 1, K);
    out.xi.resize((n - 1) * K, theta.size());

    LevelProbabilities probs(K);
    for (Index t = 1; t < n; ++t) {
        probs.update(source->eta.row(t));
        const int y = series.level(t);
        for (Index k = 0; k < K; ++k) out.e(t - 1, k) = (y >= k + 1 ? 1.0 : 0.0) - probs.survivor[k + 1];
        const Matrix m = indicator_covariance(probs.survivor);
        const auto grads = source->grad.middleRows(t * K, K);
        out.xi.middleRows((t - 1) * K, K).noalias() = -m * grads;
    }
    return out;
}

Matrix scores_from_residuals(const ResidualMatrix& residuals, const LatentPath& path) {
    const Index K = residuals.e.cols();
    const Index rows = residuals.e.rows();
    if (!path.has_gradients()) throw InputError("scores need latent gradients");
    Matrix scores(rows, path.grad.cols());
    for (Index r = 0; r < rows; ++r) {
        scores.row(r).noalias() = -residuals.e.row(r) * path.grad.middleRows((r + 1) * K, K);
    }
    return scores;
}

Matrix score_path(const ParameterVector& theta, const OrdinalSeries& series, const CovariateMatrix& covariates,
                  const LatentPath& path) {
    if (!path.has_gradients()) {
        LatentPath with_grad = path;
        latent_gradients(theta, series, covariates, with_grad);
        return scores_from_residuals(residual_path(theta, series, covariates, with_grad), with_grad);
    }
    return scores_from_residuals(residual_path(theta, series, covariates, path), path);
}

std::vector<Matrix> hessian_path(const ParameterVector& theta, const OrdinalSeries& series,
                                 const CovariateMatrix& covariates, const LatentPath& path) {
    const LatentPath* source = &path;
    LatentPath with_grad;
    if (!path.has_gradients()) {
        with_grad = path;
        latent_gradients(theta, series, covariates, with_grad);
        source = &with_grad;
    }
    const Index K = theta.K();
    const Index n = series.size();
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n - 1));
    LevelProbabilities probs(K);
    for (Index t = 1; t < n; ++t) {
        probs.update(source->eta.row(t));
        const Matrix m = indicator_covariance(probs.survivor);
        const auto grads = source->grad.middleRows(t * K, K);
        Matrix h = grads.transpose() * m * grads;
        out.push_back(0.5 * (h + h.transpose()));
    }
    return out;
}

ParameterVector table1_theta(int which) {
    Vector flat(14);
    switch (which) {
        case 1:
            flat << 1.2, 0.7, 0.5, -0.8, 1.5, -1.5, 2.0, 2.0, 0.3, -0.3, 0.5, 0.8, -0.2, 0.3;
            break;
        case 2:
            flat << 1.2, 0.7, 0.5, 0.8, -1.5, 1.5, -2.0, -2.0, -0.3, 0.3, -0.5, -0.8, 0.2, -0.3;
            break;
        case 3:
            flat << 1.2, 0.7, 1.5, 0.8, -1.5, -1.5, 2.0, -2.0, 0.3, -0.3, -0.5, -0.8, 0.2, -0.3;
            break;
        default:
            throw InputError("table1 parameter set must be 1, 2 or 3");
    }
    return ParameterVector(3, 5, std::move(flat));
}

}  // namespace acar
