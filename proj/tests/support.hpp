#pragma once

// Shared test helpers: hand-rolled random generators for property tests and
// a central finite-difference oracle.

#include "acar/model.hpp"
#include "acar/random.hpp"
#include "acar/simulate.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace acar::test {

/// Random interior parameter with moderate magnitudes.
inline ParameterVector random_theta(Rng& rng, Index K, Index P, double scale = 1.0, double beta_max = 0.8) {
    ParameterVector theta(K, P);
    for (Index i = 0; i < 2 * K + P; ++i) theta.flat()[i] = rng.uniform(-scale, scale);
    for (Index j = 0; j < K; ++j) theta.flat()[theta.beta_index(j)] = rng.uniform(-beta_max, beta_max);
    return theta;
}

inline OrdinalSeries random_series(Rng& rng, Index n, int K) {
    std::vector<int> levels(static_cast<std::size_t>(n));
    for (auto& y : levels) y = static_cast<int>(rng.next() % static_cast<std::uint64_t>(K + 1));
    return OrdinalSeries(std::move(levels), K);
}

inline CovariateMatrix random_covariates(Rng& rng, Index n, Index P) { return simulate_covariates(n, P, rng); }

/// Central differences of a scalar function of a vector.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector up = x, down = x;
        const double step = h * std::max(1.0, std::abs(x[i]));
        up[i] += step;
        down[i] -= step;
        g[i] = (f(up) - f(down)) / (2.0 * step);
    }
    return g;
}

/// max_i |a_i - b_i| / max(1, |b_i|)
inline double max_relative_error(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return worst;
}

/**
 * Independent likelihood oracle: runs the recursion with plain loops and
 * evaluates each conditional distribution by direct enumeration, without
 * the log-sum-exp shift used by the library.
 */
inline double brute_force_nll(const ParameterVector& theta, const OrdinalSeries& y, const CovariateMatrix& x,
                              const std::vector<double>& eta0) {
    const Index K = theta.K();
    const Index P = theta.P();
    std::vector<double> eta = eta0;
    double nll = 0.0;
    for (Index t = 1; t < y.size(); ++t) {
        std::vector<double> next(static_cast<std::size_t>(K));
        for (Index j = 0; j < K; ++j) {
            double v = theta.omega(j) + theta.beta(j) * eta[static_cast<std::size_t>(j)];
            for (Index p = 0; p < P; ++p) v += theta.gamma(p) * x.values()(t - 1, p);
            for (Index l = 0; l < K; ++l) v += theta.alpha(l) * (y.level(t - 1) == l + 1 ? 1.0 : 0.0);
            next[static_cast<std::size_t>(j)] = v;
        }
        eta = next;
        std::vector<double> weight(static_cast<std::size_t>(K + 1));
        double total = 0.0;
        for (Index level = 0; level <= K; ++level) {
            double s = 0.0;
            for (Index j = 0; j < level; ++j) s += eta[static_cast<std::size_t>(j)];
            weight[static_cast<std::size_t>(level)] = std::exp(s);
            total += weight[static_cast<std::size_t>(level)];
        }
        nll -= std::log(weight[static_cast<std::size_t>(y.level(t))] / total);
    }
    return nll;
}

}  // namespace acar::test
