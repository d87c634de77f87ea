#include "acar/search.hpp"

#include "acar/parallel.hpp"
#include "acar/portmanteau.hpp"

#include <algorithm>
#include <cmath>

namespace acar {

namespace {

constexpr const char* kSquareSuffix = "_sq";

bool is_square(const std::string& name) {
    return name.size() > 3 && name.compare(name.size() - 3, 3, kSquareSuffix) == 0;
}

void check_candidate(const CandidateSet& set, const CovariateMatrix& table) {
    for (const auto& c : set.columns) {
        if (std::find(table.names().begin(), table.names().end(), c) == table.names().end()) {
            throw InputError("candidate column '" + c + "' is not in the table");
        }
        if (is_square(c)) {
            const std::string linear = c.substr(0, c.size() - 3);
            if (std::find(set.columns.begin(), set.columns.end(), linear) == set.columns.end()) {
                throw InputError("candidate " + set.label() + " has '" + c + "' without '" + linear + "'");
            }
        }
    }
}

}  // namespace

std::string CandidateSet::label() const {
    if (columns.empty()) return "none";
    std::string out;
    for (const auto& c : columns) out += (out.empty() ? "" : "+") + c;
    return out;
}

std::vector<CandidateSet> enumerate_candidate_sets(const std::vector<std::string>& terms,
                                                   const std::vector<std::string>& available, int max_covariates) {
    if (max_covariates < 0) throw InputError("max_covariates must be >= 0");
    const auto present = [&](const std::string& c) {
        return std::find(available.begin(), available.end(), c) != available.end();
    };
    std::vector<int> choices;  // 2 or 3 states per term
    for (const auto& t : terms) {
        if (!present(t)) throw InputError("term '" + t + "' is not an available column");
        choices.push_back(present(t + kSquareSuffix) ? 3 : 2);
    }
    std::vector<CandidateSet> out;
    std::vector<int> state(terms.size(), 0);
    for (;;) {
        CandidateSet set;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (state[i] >= 1) set.columns.push_back(terms[i]);
            if (state[i] == 2) set.columns.push_back(terms[i] + kSquareSuffix);
        }
        if (static_cast<int>(set.columns.size()) <= max_covariates) out.push_back(std::move(set));
        std::size_t i = 0;
        while (i < terms.size() && ++state[i] == choices[i]) state[i++] = 0;
        if (i == terms.size()) break;
    }
    std::stable_sort(out.begin(), out.end(), [](const CandidateSet& a, const CandidateSet& b) {
        return a.columns.size() < b.columns.size();
    });
    return out;
}

ModelSearchReport search_models(const OrdinalSeries& series, const CovariateMatrix& table,
                                const std::vector<CandidateSet>& candidates, const SearchConfig& config) {
    if (candidates.empty()) throw InputError("no candidate covariate sets");
    for (const auto& c : candidates) check_candidate(c, table);
    config.fit.validate();

    ModelSearchReport report;
    report.alpha = config.alpha;
    report.q = config.q;
    report.candidates.resize(candidates.size());
    FitConfig fit_config = config.fit;
    fit_config.threads = 1;

    parallel_for(static_cast<std::int64_t>(candidates.size()), worker_count(config.threads), [&](std::int64_t i) {
        CandidateOutcome& o = report.candidates[static_cast<std::size_t>(i)];
        o.index = static_cast<int>(i);
        o.set = candidates[static_cast<std::size_t>(i)];
        try {
            o.fit = fit(series, table.select(o.set.columns), fit_config);
            o.fitted = true;
            o.at_bound = o.fit.any_at_bound();
            if (o.at_bound) {
                o.excluded_reason = "at-bound";
                return;
            }
            if (!o.fit.converged) {
                o.excluded_reason = "not converged";
                return;
            }
            if (!o.fit.inference_available) {
                o.excluded_reason = "no covariance: " + o.fit.inference_error;
                return;
            }
            for (Index p = 0; p < o.fit.P(); ++p) {
                if (std::abs(o.fit.t_stats[o.fit.theta_hat.gamma_index(p)]) > config.z_critical) ++o.significant;
            }
            const PortmanteauResult pt = portmanteau_test(o.fit, config.q);
            o.portmanteau_statistic = pt.statistic;
            o.portmanteau_p = pt.p_value;
            o.passed_portmanteau = !pt.reject(config.alpha);
            if (!o.passed_portmanteau) {
                o.excluded_reason = "portmanteau";
            } else {
                o.eligible = true;
            }
        } catch (const std::exception& err) {
            o.excluded_reason = err.what();
        }
    });

    std::vector<int> order;
    for (const auto& o : report.candidates) {
        if (o.eligible) order.push_back(o.index);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& x = report.candidates[static_cast<std::size_t>(a)];
        const auto& y = report.candidates[static_cast<std::size_t>(b)];
        if (x.significant != y.significant) return x.significant > y.significant;
        if (x.fit.aic != y.fit.aic) return x.fit.aic < y.fit.aic;
        return a < b;
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
        report.candidates[static_cast<std::size_t>(order[r])].rank = static_cast<int>(r + 1);
    }
    if (!order.empty()) report.selected = order.front();
    return report;
}

}  // namespace acar
