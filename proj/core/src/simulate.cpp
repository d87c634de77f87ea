#include "acar/simulate.hpp"

#include <cmath>

namespace acar {

namespace {

void check_config(const SimConfig& config) {
    if (config.n < 2) throw InputError("simulation needs n >= 2");
    if (config.burn_in < 0) throw InputError("burn-in must be non-negative");
    if (auto v = validate_parameters(config.theta); !v) throw InputError("invalid parameters: " + v.message);
}

std::vector<double> draw_uniforms(Rng& rng, Index count) {
    std::vector<double> u(static_cast<std::size_t>(count));
    for (auto& x : u) x = rng.uniform();
    return u;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

CovariateMatrix tail_rows(const CovariateMatrix& full, Index count) {
    return CovariateMatrix(full.values().bottomRows(count), full.names());
}

}  // namespace

std::string to_string(Coupling coupling) {
    switch (coupling) {
        case Coupling::independent: return "independent";
        case Coupling::common: return "common";
        case Coupling::antithetic: return "antithetic";
    }
    return "independent";
}

Coupling parse_coupling(const std::string& name) {
    if (name == "independent") return Coupling::independent;
    if (name == "common") return Coupling::common;
    if (name == "antithetic") return Coupling::antithetic;
    throw InputError("unknown coupling '" + name + "' (expected independent, common or antithetic)");
}

CovariateMatrix simulate_covariates(Index n, Index P, Rng& rng) {
    if (n < 1) throw InputError("simulate_covariates needs n >= 1");
    if (P < 0) throw InputError("simulate_covariates needs P >= 0");
    // Row-major fill so that the stream order does not depend on storage order.
    Matrix x(n, P);
    for (Index t = 0; t < n; ++t) {
        for (Index p = 0; p < P; ++p) x(t, p) = rng.normal();
    }
    return CovariateMatrix(std::move(x));
}

int draw_level(const Vector& probabilities, double u) {
    double cumulative = 0.0;
    const Index last = probabilities.size() - 1;
    for (Index j = 0; j < last; ++j) {
        cumulative += probabilities[j];
        if (u < cumulative) return static_cast<int>(j);
    }
    return static_cast<int>(last);
}

OrdinalSeries simulate_levels(const ParameterVector& theta, const CovariateMatrix& covariates,
                              std::span<const double> uniforms, const Vector& eta0) {
    const Index n = static_cast<Index>(uniforms.size());
    const Index K = theta.K();
    if (covariates.rows() != n) {
        throw InputError("covariates have " + std::to_string(covariates.rows()) + " rows but " + std::to_string(n) +
                         " uniforms were given");
    }
    if (covariates.cols() != theta.P()) throw InputError("covariate column count does not match P");
    if (eta0.size() != K) throw InputError("eta0 must have length K");
    for (double u : uniforms) {
        if (!(u >= 0.0 && u <= 1.0)) throw InputError("uniform innovations must lie in [0, 1]");
    }

    std::vector<int> levels(static_cast<std::size_t>(n));
    if (n == 0) return OrdinalSeries(std::move(levels), static_cast<int>(K));
    const auto& X = covariates.values();
    Vector eta = eta0;
    levels[0] = draw_level(adjacent_to_probs(eta), uniforms[0]);
    for (Index t = 1; t < n; ++t) {
        double common = theta.P() > 0 ? X.row(t - 1).dot(theta.gamma()) : 0.0;
        const int prev = levels[static_cast<std::size_t>(t - 1)];
        if (prev > 0) common += theta.alpha(prev - 1);
        for (Index j = 0; j < K; ++j) {
            eta[j] = theta.omega(j) + common + theta.beta(j) * eta[j];
            if (!std::isfinite(eta[j])) {
                throw NumericalError("latent process overflow during simulation at t=" + std::to_string(t));
            }
        }
        levels[static_cast<std::size_t>(t)] = draw_level(adjacent_to_probs(eta), uniforms[static_cast<std::size_t>(t)]);
    }
    return OrdinalSeries(std::move(levels), static_cast<int>(K));
}

OrdinalSeries simulate_path(const SimConfig& config, const CovariateMatrix& covariates,
                            std::optional<std::span<const double>> uniforms) {
    check_config(config);
    if (covariates.rows() != config.n) throw InputError("covariates must have n rows");
    if (covariates.cols() != config.P()) throw InputError("covariate column count does not match P");

    std::vector<double> recorded;
    if (uniforms) {
        if (static_cast<Index>(uniforms->size()) != config.n) throw InputError("uniforms must have n entries");
        recorded.assign(uniforms->begin(), uniforms->end());
    } else {
        Rng rng(config.seed, Stream::uniforms);
        recorded = draw_uniforms(rng, config.n);
    }

    Rng burn_cov(config.seed, Stream::burn_in_covariates);
    Rng burn_u(config.seed, Stream::burn_in_uniforms);
    const Matrix burn_x = config.burn_in > 0 ? simulate_covariates(config.burn_in, config.P(), burn_cov).values()
                                             : Matrix(0, config.P());
    std::vector<double> full_u = draw_uniforms(burn_u, config.burn_in);
    full_u.insert(full_u.end(), recorded.begin(), recorded.end());

    const CovariateMatrix full_x(stack(burn_x, covariates.values()), covariates.names());
    const OrdinalSeries full = simulate_levels(config.theta, full_x, full_u, config.initial_eta());
    const auto& lv = full.levels();
    return OrdinalSeries(std::vector<int>(lv.end() - config.n, lv.end()), full.K());
}

SimulatedSample simulate(const SimConfig& config) {
    check_config(config);
    Rng rng(config.seed, Stream::covariates);
    CovariateMatrix x = simulate_covariates(config.n, config.P(), rng);
    OrdinalSeries y = simulate_path(config, x);
    return {std::move(y), std::move(x)};
}

PairedSites simulate_paired_sites(const SimConfig& site1, const SimConfig& site2, Coupling coupling) {
    check_config(site1);
    check_config(site2);
    if (site1.burn_in != site2.burn_in) throw InputError("paired sites need the same burn-in");
    const Index total = site1.n + site1.burn_in;
    Rng cov1(site1.seed, Stream::covariates, 1);
    Rng cov2(site2.seed, Stream::covariates, 2);
    const CovariateMatrix x1 = simulate_covariates(total, site1.P(), cov1);
    const CovariateMatrix x2 = simulate_covariates(total, site2.P(), cov2);
    return simulate_paired_sites(site1, site2, coupling, x1, x2);
}

PairedSites simulate_paired_sites(const SimConfig& site1, const SimConfig& site2, Coupling coupling,
                                  const CovariateMatrix& full_covariates1, const CovariateMatrix& full_covariates2) {
    check_config(site1);
    check_config(site2);
    if (site1.n != site2.n) throw InputError("paired sites need equal n");
    if (site1.burn_in != site2.burn_in) throw InputError("paired sites need the same burn-in");
    const Index total = site1.n + site1.burn_in;
    if (full_covariates1.rows() != total || full_covariates2.rows() != total) {
        throw InputError("paired covariates must have burn_in + n rows");
    }

    PairedSites out;
    Rng u1(site1.seed, Stream::uniforms, 1);
    out.uniforms1 = draw_uniforms(u1, total);
    switch (coupling) {
        case Coupling::independent: {
            Rng u2(site2.seed, Stream::uniforms, 2);
            out.uniforms2 = draw_uniforms(u2, total);
            break;
        }
        case Coupling::common:
            out.uniforms2 = out.uniforms1;
            break;
        case Coupling::antithetic:
            out.uniforms2.resize(out.uniforms1.size());
            for (std::size_t i = 0; i < out.uniforms1.size(); ++i) out.uniforms2[i] = 1.0 - out.uniforms1[i];
            break;
    }

    const OrdinalSeries y1 = simulate_levels(site1.theta, full_covariates1, out.uniforms1, site1.initial_eta());
    const OrdinalSeries y2 = simulate_levels(site2.theta, full_covariates2, out.uniforms2, site2.initial_eta());
    const auto keep = [n = site1.n](const OrdinalSeries& s) {
        return OrdinalSeries(std::vector<int>(s.levels().end() - n, s.levels().end()), s.K());
    };
    out.series1 = keep(y1);
    out.series2 = keep(y2);
    out.covariates1 = tail_rows(full_covariates1, site1.n);
    out.covariates2 = tail_rows(full_covariates2, site2.n);
    return out;
}

Scenario comparison_scenario(int id) {
    switch (id) {
        case 1: return {1, Coupling::independent, 1, 1};
        case 2: return {2, Coupling::independent, 1, 3};
        case 3: return {3, Coupling::antithetic, 1, 1};
        case 4: return {4, Coupling::common, 1, 3};
        default: throw InputError("scenario must be 1, 2, 3 or 4");
    }
}

}  // namespace acar
