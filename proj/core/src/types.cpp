#include "acar/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace acar {

ParameterVector::ParameterVector(Index K, Index P) : ParameterVector(K, P, Vector::Zero(3 * K + P)) {}

ParameterVector::ParameterVector(Index K, Index P, Vector flat) : K_(K), P_(P), flat_(std::move(flat)) {
    if (K < 1 || P < 0) {
        throw InputError("ParameterVector needs K >= 1 and P >= 0");
    }
    if (flat_.size() != 3 * K + P) {
        throw InputError("ParameterVector: expected " + std::to_string(3 * K + P) + " entries, got " +
                         std::to_string(flat_.size()));
    }
}

std::vector<std::string> ParameterVector::names(std::span<const std::string> covariate_names) const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Index j = 0; j < K_; ++j) out.push_back("omega_" + std::to_string(j + 1));
    for (Index p = 0; p < P_; ++p) {
        if (static_cast<Index>(covariate_names.size()) == P_) {
            out.push_back("gamma_" + covariate_names[static_cast<std::size_t>(p)]);
        } else {
            out.push_back("gamma_" + std::to_string(p + 1));
        }
    }
    for (Index j = 0; j < K_; ++j) out.push_back("alpha_" + std::to_string(j + 1));
    for (Index j = 0; j < K_; ++j) out.push_back("beta_" + std::to_string(j + 1));
    return out;
}

OrdinalSeries::OrdinalSeries(std::vector<int> levels, int K) : levels_(std::move(levels)), K_(K) {
    if (K < 1) throw InputError("OrdinalSeries needs K >= 1");
    for (std::size_t t = 0; t < levels_.size(); ++t) {
        if (levels_[t] < 0 || levels_[t] > K) {
            throw InputError("level " + std::to_string(levels_[t]) + " at t=" + std::to_string(t) +
                             " outside {0.." + std::to_string(K) + "}");
        }
    }
}

Matrix OrdinalSeries::one_hot() const {
    Matrix out = Matrix::Zero(size(), K_);
    for (Index t = 0; t < size(); ++t) {
        if (level(t) > 0) out(t, level(t) - 1) = 1.0;
    }
    return out;
}

OrdinalSeries OrdinalSeries::from_one_hot(const Matrix& one_hot) {
    std::vector<int> levels(static_cast<std::size_t>(one_hot.rows()), 0);
    for (Index t = 0; t < one_hot.rows(); ++t) {
        int hits = 0;
        for (Index j = 0; j < one_hot.cols(); ++j) {
            if (one_hot(t, j) == 1.0) {
                levels[static_cast<std::size_t>(t)] = static_cast<int>(j) + 1;
                ++hits;
            } else if (one_hot(t, j) != 0.0) {
                throw InputError("one-hot entries must be 0 or 1");
            }
        }
        if (hits > 1) throw InputError("one-hot row " + std::to_string(t) + " has more than one 1");
    }
    return OrdinalSeries(std::move(levels), static_cast<int>(one_hot.cols()));
}

int OrdinalSeries::distinct_levels() const {
    return static_cast<int>(std::set<int>(levels_.begin(), levels_.end()).size());
}

CovariateMatrix::CovariateMatrix(Matrix values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (!values_.allFinite()) throw InputError("covariate matrix contains non-finite entries");
    if (names_.empty()) {
        for (Index p = 0; p < values_.cols(); ++p) names_.push_back("x" + std::to_string(p + 1));
    }
    if (static_cast<Index>(names_.size()) != values_.cols()) {
        throw InputError("covariate names do not match the column count");
    }
}

CovariateMatrix CovariateMatrix::empty(Index n) { return CovariateMatrix(Matrix(n, 0)); }

Index CovariateMatrix::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InputError("unknown covariate column '" + name + "'");
    return static_cast<Index>(it - names_.begin());
}

CovariateMatrix CovariateMatrix::select(std::span<const std::string> columns) const {
    Matrix out(rows(), static_cast<Index>(columns.size()));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.col(static_cast<Index>(c)) = values_.col(column_index(columns[c]));
        names.push_back(columns[c]);
    }
    return CovariateMatrix(std::move(out), std::move(names));
}

}  // namespace acar
