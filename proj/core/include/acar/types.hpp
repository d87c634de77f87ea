#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace acar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Bad user input: malformed files, out-of-range arguments, shape mismatches.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Overflow, singular matrices, failed solves.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Full ACAR parameter, flattened as (omega_1..omega_K, gamma_1..gamma_P,
 * alpha_1..alpha_K, beta_1..beta_K). Category indices are zero-based in the
 * accessors: omega(0) is omega_1.
 */
class ParameterVector {
public:
    ParameterVector() = default;
    ParameterVector(Index K, Index P);
    ParameterVector(Index K, Index P, Vector flat);

    [[nodiscard]] Index K() const noexcept { return K_; }
    [[nodiscard]] Index P() const noexcept { return P_; }
    [[nodiscard]] Index size() const noexcept { return 3 * K_ + P_; }

    [[nodiscard]] Index omega_index(Index j) const noexcept { return j; }
    [[nodiscard]] Index gamma_index(Index p) const noexcept { return K_ + p; }
    [[nodiscard]] Index alpha_index(Index j) const noexcept { return K_ + P_ + j; }
    [[nodiscard]] Index beta_index(Index j) const noexcept { return 2 * K_ + P_ + j; }

    [[nodiscard]] double omega(Index j) const { return flat_[omega_index(j)]; }
    [[nodiscard]] double gamma(Index p) const { return flat_[gamma_index(p)]; }
    [[nodiscard]] double alpha(Index j) const { return flat_[alpha_index(j)]; }
    [[nodiscard]] double beta(Index j) const { return flat_[beta_index(j)]; }

    [[nodiscard]] auto omega() const { return flat_.segment(0, K_); }
    [[nodiscard]] auto gamma() const { return flat_.segment(K_, P_); }
    [[nodiscard]] auto alpha() const { return flat_.segment(K_ + P_, K_); }
    [[nodiscard]] auto beta() const { return flat_.segment(2 * K_ + P_, K_); }
    auto omega() { return flat_.segment(0, K_); }
    auto gamma() { return flat_.segment(K_, P_); }
    auto alpha() { return flat_.segment(K_ + P_, K_); }
    auto beta() { return flat_.segment(2 * K_ + P_, K_); }

    [[nodiscard]] const Vector& flat() const noexcept { return flat_; }
    Vector& flat() noexcept { return flat_; }

    /// Names in flattened order; gamma entries use the covariate names when given.
    [[nodiscard]] std::vector<std::string> names(std::span<const std::string> covariate_names = {}) const;

private:
    Index K_ = 0;
    Index P_ = 0;
    Vector flat_;
};

/// Ordinal path with levels in {0, ..., K}.
class OrdinalSeries {
public:
    OrdinalSeries() = default;
    OrdinalSeries(std::vector<int> levels, int K);

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(levels_.size()); }
    [[nodiscard]] int K() const noexcept { return K_; }
    [[nodiscard]] int level(Index t) const { return levels_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] const std::vector<int>& levels() const noexcept { return levels_; }

    /// Indicator Y_{j,t} for j in 1..K (level 0 is the all-zero vector).
    [[nodiscard]] double indicator(Index t, int j) const { return level(t) == j ? 1.0 : 0.0; }

    /// n x K one-hot matrix without the level-0 column.
    [[nodiscard]] Matrix one_hot() const;
    static OrdinalSeries from_one_hot(const Matrix& one_hot);

    [[nodiscard]] int distinct_levels() const;

private:
    std::vector<int> levels_;
    int K_ = 0;
};

/// n x P design; row t-1 drives the latent process at time t.
class CovariateMatrix {
public:
    CovariateMatrix() = default;
    CovariateMatrix(Matrix values, std::vector<std::string> names = {});

    /// An n x 0 design for models without covariates.
    static CovariateMatrix empty(Index n);

    [[nodiscard]] Index rows() const noexcept { return values_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values_.cols(); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    /// Column subset by name, in the requested order.
    [[nodiscard]] CovariateMatrix select(std::span<const std::string> columns) const;
    [[nodiscard]] Index column_index(const std::string& name) const;

private:
    Matrix values_;
    std::vector<std::string> names_;
};

}  // namespace acar
