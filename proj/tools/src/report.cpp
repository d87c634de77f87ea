#include "report.hpp"

#include "acar/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace acar::cli {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string fixed(double x, int width = 10, int precision = 4) {
    if (!std::isfinite(x)) return std::string(static_cast<std::size_t>(std::max(width - 2, 0)), ' ') + "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%*.*f", width, precision, x);
    return buf;
}

std::string padded(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const FitResult& fit) {
    Json j;
    j["K"] = fit.K();
    j["P"] = fit.P();
    j["n_obs"] = fit.n_obs;
    j["parameter_names"] = fit.parameter_names;
    j["covariate_names"] = fit.covariate_names;
    j["theta"] = to_json(fit.theta_hat.flat());
    j["negloglik"] = number(fit.negloglik);
    j["aic"] = number(fit.aic);
    j["converged"] = fit.converged;
    j["status"] = fit.status;
    j["at_bound"] = fit.at_bound;
    j["best_start"] = fit.best_start;
    j["iterations"] = fit.iterations;
    j["evaluations"] = fit.evaluations;
    j["projected_gradient"] = number(fit.projected_gradient);
    Json starts = Json::array();
    for (double f : fit.start_objectives) starts.push_back(number(f));
    j["start_objectives"] = std::move(starts);
    j["warnings"] = fit.warnings;
    j["epsilon"] = fit.epsilon;
    j["eta0"] = to_json(fit.eta0);
    j["inference_available"] = fit.inference_available;
    j["inference_error"] = fit.inference_error;
    j["j_condition"] = number(fit.j_condition);
    j["covariance"] = to_json(fit.covariance);
    j["std_errors"] = to_json(fit.std_errors);
    j["t_stats"] = to_json(fit.t_stats);
    j["J_hat"] = to_json(fit.J_hat);
    j["L_hat"] = to_json(fit.L_hat);
    j["residuals"] = {{"e", to_json(fit.residuals.e)}, {"xi", to_json(fit.residuals.xi)}};
    return j;
}

Json to_json(const PortmanteauResult& r) {
    Json j;
    j["q"] = r.q;
    j["n"] = r.n;
    j["rho"] = to_json(r.rho);
    j["W_hat"] = to_json(r.W_hat);
    j["statistic"] = number(r.statistic);
    j["df"] = r.df;
    j["p_value"] = number(r.p_value);
    j["w_condition"] = number(r.w_condition);
    return j;
}

Json to_json(const ComparisonResult& r) {
    Json j;
    j["n"] = r.n;
    j["S_mode"] = to_string(r.S_mode);
    j["cross_term_sign"] = to_string(r.sign);
    j["difference"] = to_json(r.difference);
    j["per_param_z"] = to_json(r.per_param_z);
    j["per_param_p"] = to_json(r.per_param_p);
    j["global_available"] = r.global_available;
    j["global_error"] = r.global_error;
    j["global_statistic"] = number(r.global_statistic);
    j["global_df"] = r.global_df;
    j["global_p"] = number(r.global_p);
    j["v_condition"] = number(r.v_condition);
    j["V_hat"] = to_json(r.V_hat);
    return j;
}

Json to_json(const ThresholdResult& r) {
    return Json{{"estimate", number(r.estimate)},
                {"std_error", number(r.std_error)},
                {"ci_low", number(r.ci_low)},
                {"ci_high", number(r.ci_high)}};
}

Json to_json(const MCSummary& s) {
    Json j;
    j["n"] = s.n;
    j["parameter_names"] = s.parameter_names;
    j["theta0"] = to_json(s.theta0);
    j["cmle"] = to_json(s.cmle);
    j["tse"] = to_json(s.tse);
    j["mae"] = to_json(s.mae);
    j["mse"] = to_json(s.mse);
    j["coverage"] = to_json(s.coverage);
    j["replications"] = s.replications;
    j["used"] = s.used;
    j["failures"] = s.failures;
    j["at_bound"] = s.at_bound;
    return j;
}

Json to_json(const ScenarioSummary& s) {
    Json j;
    j["scenario"] = s.scenario;
    j["coupling"] = to_string(s.coupling);
    j["S_mode"] = to_string(s.S_mode);
    j["cross_term_sign"] = to_string(s.sign);
    j["n"] = s.n;
    j["alpha"] = s.alpha;
    j["replications"] = s.replications;
    j["used"] = s.used;
    j["failures"] = s.failures;
    j["at_bound"] = s.at_bound;
    j["rejections"] = s.rejections;
    j["rejection_rate"] = s.rejection_rate;
    j["acceptance_rate"] = s.acceptance_rate;
    j["mean_statistic"] = number(s.mean_statistic);
    j["statistics"] = s.statistics;
    return j;
}

Json to_json(const SizeSummary& s) {
    Json j;
    j["n"] = s.n;
    j["q"] = s.q;
    j["df"] = s.df;
    j["alpha"] = s.alpha;
    j["replications"] = s.replications;
    j["used"] = s.used;
    j["failures"] = s.failures;
    j["at_bound"] = s.at_bound;
    j["rejections"] = s.rejections;
    j["rejection_rate"] = s.rejection_rate;
    j["mean_statistic"] = number(s.mean_statistic);
    j["statistics"] = s.statistics;
    return j;
}

Json to_json(const ModelSearchReport& report) {
    Json j;
    j["q"] = report.q;
    j["alpha"] = report.alpha;
    j["selected"] = report.selected;
    Json candidates = Json::array();
    for (const auto& c : report.candidates) {
        Json e;
        e["index"] = c.index;
        e["columns"] = c.set.columns;
        e["label"] = c.set.label();
        e["fitted"] = c.fitted;
        e["eligible"] = c.eligible;
        e["excluded_reason"] = c.excluded_reason;
        e["rank"] = c.rank;
        e["significant"] = c.significant;
        e["at_bound"] = c.at_bound;
        e["portmanteau_statistic"] = number(c.portmanteau_statistic);
        e["portmanteau_p"] = number(c.portmanteau_p);
        e["passed_portmanteau"] = c.passed_portmanteau;
        if (c.fitted) {
            e["negloglik"] = number(c.fit.negloglik);
            e["aic"] = number(c.fit.aic);
            e["converged"] = c.fit.converged;
            e["parameter_names"] = c.fit.parameter_names;
            e["theta"] = to_json(c.fit.theta_hat.flat());
            e["std_errors"] = to_json(c.fit.std_errors);
            e["t_stats"] = to_json(c.fit.t_stats);
        } else {
            e["negloglik"] = nullptr;
            e["aic"] = nullptr;
            e["converged"] = false;
            e["parameter_names"] = Json::array();
            e["theta"] = Json::array();
            e["std_errors"] = Json::array();
            e["t_stats"] = Json::array();
        }
        candidates.push_back(std::move(e));
    }
    j["candidates"] = std::move(candidates);
    return j;
}

Json to_json(const SeasonalCovariateTable& t) {
    Json j;
    j["temperature_scale"] = t.temperature_scale;
    j["years"] = t.table.years;
    j["columns"] = t.table.values.names();
    j["values"] = to_json(t.table.values.values());
    Json dropped = Json::array();
    for (const auto& d : t.dropped) dropped.push_back({{"year", d.year}, {"reason", d.reason}});
    j["dropped"] = std::move(dropped);
    return j;
}

void write_text(std::ostream& out, const FitResult& fit) {
    out << "ACAR fit: K=" << fit.K() << " P=" << fit.P() << " n_obs=" << fit.n_obs << "\n";
    out << "negloglik " << format_number(fit.negloglik) << "  AIC " << format_number(fit.aic) << "\n";
    out << "converged " << (fit.converged ? "yes" : "no") << " (" << fit.status << ")\n";
    out << padded("parameter", 28) << "  estimate   std.err    t-stat\n";
    for (Index i = 0; i < fit.dimension(); ++i) {
        out << padded(fit.parameter_names[static_cast<std::size_t>(i)], 28) << fixed(fit.theta_hat.flat()[i])
            << fixed(fit.std_errors.size() ? fit.std_errors[i] : NAN)
            << fixed(fit.t_stats.size() ? fit.t_stats[i] : NAN) << "\n";
    }
    if (!fit.inference_available) out << "no standard errors: " << fit.inference_error << "\n";
    for (const auto& w : fit.warnings) out << "warning: " << w << "\n";
}

void write_text(std::ostream& out, const PortmanteauResult& r) {
    out << "Portmanteau test: q=" << r.q << " df=" << r.df << " statistic " << fixed(r.statistic, 0)
        << " p-value " << fixed(r.p_value, 0) << "\n";
}

void write_text(std::ostream& out, const ComparisonResult& r, const std::vector<std::string>& names) {
    out << "Comparison test (S " << to_string(r.S_mode) << ", cross terms " << to_string(r.sign) << ")\n";
    out << padded("parameter", 28) << "difference         z   p-value\n";
    for (Index i = 0; i < r.difference.size(); ++i) {
        out << padded(names[static_cast<std::size_t>(i)], 28) << fixed(r.difference[i]) << fixed(r.per_param_z[i])
            << fixed(r.per_param_p[i]) << "\n";
    }
    if (r.global_available) {
        out << "global: statistic " << fixed(r.global_statistic, 0) << " df " << r.global_df << " p-value "
            << fixed(r.global_p, 0) << "\n";
    } else {
        out << "global test unavailable: " << r.global_error << "\n";
    }
}

void write_text(std::ostream& out, const ThresholdResult& r, double scale) {
    const ThresholdResult u = r.unscaled(scale);
    out << "threshold " << fixed(r.estimate, 0) << " (se " << fixed(r.std_error, 0) << ", 95% CI " << fixed(r.ci_low, 0)
        << " to " << fixed(r.ci_high, 0) << ") model units; " << fixed(u.estimate, 0) << " (CI " << fixed(u.ci_low, 0)
        << " to " << fixed(u.ci_high, 0) << ") at scale " << format_number(scale) << "\n";
}

void write_text(std::ostream& out, const MCSummary& s) {
    out << "n=" << s.n << " replications=" << s.replications << " used=" << s.used << " failures=" << s.failures
        << " at_bound=" << s.at_bound << "\n";
    out << padded("parameter", 12) << "     true      CMLE       TSE       MAE       MSE  coverage\n";
    for (Index i = 0; i < s.theta0.size(); ++i) {
        out << padded(s.parameter_names[static_cast<std::size_t>(i)], 12) << fixed(s.theta0[i]) << fixed(s.cmle[i])
            << fixed(s.tse[i]) << fixed(s.mae[i]) << fixed(s.mse[i]) << fixed(s.coverage[i]) << "\n";
    }
}

void write_text(std::ostream& out, const ScenarioSummary& s) {
    out << "scenario " << s.scenario << " (" << to_string(s.coupling) << ", S " << to_string(s.S_mode) << "): n=" << s.n
        << " used " << s.used << "/" << s.replications << " rejection rate " << fixed(s.rejection_rate, 0)
        << " acceptance rate " << fixed(s.acceptance_rate, 0) << " mean statistic " << fixed(s.mean_statistic, 0)
        << "\n";
}

void write_text(std::ostream& out, const SizeSummary& s) {
    out << "Portmanteau size: n=" << s.n << " q=" << s.q << " df=" << s.df << " used " << s.used << "/"
        << s.replications << " rejection rate " << fixed(s.rejection_rate, 0) << " mean statistic "
        << fixed(s.mean_statistic, 0) << "\n";
}

void write_text(std::ostream& out, const ModelSearchReport& report) {
    out << "model search: " << report.candidates.size() << " candidates, Portmanteau q=" << report.q
        << " alpha=" << format_number(report.alpha) << "\n";
    for (const auto& c : report.candidates) {
        out << (c.index == report.selected ? "* " : "  ") << "[" << c.index << "] " << c.set.label();
        if (c.fitted) out << "  AIC " << fixed(c.fit.aic, 0) << "  significant " << c.significant;
        if (c.eligible) {
            out << "  rank " << c.rank;
        } else {
            out << "  excluded: " << c.excluded_reason;
        }
        out << "\n";
    }
    if (report.selected < 0) out << "no candidate passed the filters\n";
}

}  // namespace acar::cli
