#include "acar/climate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace acar {

namespace {

bool leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return month == 2 && leap(year) ? 29 : days[month - 1];
}

int parse_int(std::string_view s, const std::string& date) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad date '" + date + "'");
    return v;
}

struct SeasonStats {
    bool ok = false;
    double range = 0.0;
    double mean = 0.0;
};

struct YearStats {
    int year = 0;
    std::string problem;  // empty when every statistic is available
    SeasonStats t[2][2];  // [tmax|tmin][spring|summer]
    double log_prcp = 0.0;
    double log_snow = 0.0;
};

constexpr const char* kVariable[2] = {"tmax", "tmin"};
constexpr const char* kSeason[2] = {"spring", "summer"};
constexpr int kFirstMonth[2] = {4, 7};

std::string percent(double share) {
    std::ostringstream s;
    s << std::lround(100.0 * share) << "%";
    return s.str();
}

YearStats year_statistics(int year, const std::vector<const DailyClimateRecord*>& days, double min_coverage) {
    YearStats out;
    out.year = year;
    for (int v = 0; v < 2; ++v) {
        for (int s = 0; s < 2; ++s) {
            int expected = 0;
            for (int m = kFirstMonth[s]; m < kFirstMonth[s] + 3; ++m) expected += days_in_month(year, m);
            std::vector<double> values;
            for (const auto* d : days) {
                if (d->month < kFirstMonth[s] || d->month >= kFirstMonth[s] + 3) continue;
                const auto& field = v == 0 ? d->tmax : d->tmin;
                if (field) values.push_back(*field);
            }
            const double share = static_cast<double>(values.size()) / expected;
            if (share < min_coverage) {
                if (out.problem.empty()) {
                    out.problem = std::string(kVariable[v]) + " " + kSeason[s] + " coverage " + percent(share) +
                                  " below " + percent(min_coverage);
                }
                continue;
            }
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            double sum = 0.0;
            for (double x : values) sum += x;
            out.t[v][s] = {true, *hi - *lo, sum / static_cast<double>(values.size())};
        }
    }
    const int expected = leap(year) ? 366 : 365;
    const auto annual = [&](auto member, const char* name, double& log_total) {
        int count = 0;
        double total = 0.0;
        for (const auto* d : days) {
            if (const auto& field = d->*member) {
                ++count;
                total += *field;
            }
        }
        const double share = static_cast<double>(count) / expected;
        if (share < min_coverage) {
            if (out.problem.empty()) {
                out.problem = std::string(name) + " coverage " + percent(share) + " below " + percent(min_coverage);
            }
            return;
        }
        if (!(total > 0.0)) {
            if (out.problem.empty()) out.problem = std::string("non-positive annual ") + name + " total";
            return;
        }
        log_total = std::log(total);
    };
    annual(&DailyClimateRecord::prcp, "prcp", out.log_prcp);
    annual(&DailyClimateRecord::snow, "snow", out.log_snow);
    return out;
}

std::optional<double> optional_cell(const std::string& cell, const std::string& where) {
    try {
        const double v = parse_number(cell, true);
        if (std::isnan(v)) return std::nullopt;
        return v;
    } catch (const InputError& err) {
        throw InputError(where + ": " + err.what());
    }
}

}  // namespace

std::vector<DailyClimateRecord> parse_daily_climate(const CsvTable& table) {
    const Index date_col = table.column("date");
    const Index cols[4] = {table.column("tmax"), table.column("tmin"), table.column("prcp"), table.column("snow")};
    if (date_col < 0 || std::any_of(std::begin(cols), std::end(cols), [](Index c) { return c < 0; })) {
        throw InputError("daily climate CSV needs columns date,tmax,tmin,prcp,snow");
    }
    std::vector<DailyClimateRecord> out;
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& row : table.rows) {
        const std::string& date = row[static_cast<std::size_t>(date_col)];
        if (date.size() != 10 || date[4] != '-' || date[7] != '-') throw InputError("bad date '" + date + "'");
        DailyClimateRecord r;
        const std::string_view view(date);
        r.year = parse_int(view.substr(0, 4), date);
        r.month = parse_int(view.substr(5, 2), date);
        r.day = parse_int(view.substr(8, 2), date);
        if (r.month < 1 || r.month > 12 || r.day < 1 || r.day > days_in_month(r.year, r.month)) {
            throw InputError("bad date '" + date + "'");
        }
        if (!seen.emplace(r.year, r.month, r.day).second) throw InputError("duplicate date " + date);
        r.tmax = optional_cell(row[static_cast<std::size_t>(cols[0])], date);
        r.tmin = optional_cell(row[static_cast<std::size_t>(cols[1])], date);
        r.prcp = optional_cell(row[static_cast<std::size_t>(cols[2])], date);
        r.snow = optional_cell(row[static_cast<std::size_t>(cols[3])], date);
        if (r.tmax && r.tmin && *r.tmin > *r.tmax) throw InputError(date + ": tmin exceeds tmax");
        out.push_back(r);
    }
    return out;
}

std::vector<DailyClimateRecord> read_daily_climate(const std::string& path) {
    return parse_daily_climate(read_csv_file(path));
}

std::vector<std::string> seasonal_linear_columns() {
    std::vector<std::string> names;
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < 2; ++s) names.push_back(std::string("range_") + kVariable[v] + "_" + kSeason[s]);
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < 2; ++s) names.push_back(std::string("diff_mean_") + kVariable[v] + "_" + kSeason[s]);
    names.insert(names.end(), {"log_prcp", "log_snow", "diff_log_prcp", "diff_log_snow"});
    return names;
}

std::string square_column(const std::string& linear) { return linear + "_sq"; }

SeasonalCovariateTable build_seasonal_covariates(const std::vector<DailyClimateRecord>& daily,
                                                 const SeasonalConfig& config) {
    if (!(config.temperature_scale > 0.0)) throw InputError("temperature scale must be positive");
    if (!(config.min_coverage >= 0.0 && config.min_coverage <= 1.0)) throw InputError("coverage must lie in [0, 1]");
    std::map<int, std::vector<const DailyClimateRecord*>> by_year;
    for (const auto& r : daily) by_year[r.year].push_back(&r);
    if (by_year.size() < 3) throw InputError("at least 3 years of daily data are required");

    std::map<int, YearStats> stats;
    for (const auto& [year, days] : by_year) stats[year] = year_statistics(year, days, config.min_coverage);

    SeasonalCovariateTable out;
    out.temperature_scale = config.temperature_scale;
    auto names = seasonal_linear_columns();
    const std::size_t n_temperature = 8;
    if (config.squares) {
        for (std::size_t i = 0; i < n_temperature; ++i) names.push_back(square_column(names[i]));
    }
    std::vector<std::vector<double>> rows;
    const double c = config.temperature_scale;
    for (const auto& [year, cur] : stats) {
        if (!cur.problem.empty()) {
            out.dropped.push_back({year, cur.problem});
            continue;
        }
        const auto prev_it = stats.find(year - 1);
        if (prev_it == stats.end() || !prev_it->second.problem.empty()) {
            out.dropped.push_back({year, "previous year unavailable for interannual differences"});
            continue;
        }
        const YearStats& prev = prev_it->second;
        std::vector<double> row;
        for (int v = 0; v < 2; ++v)
            for (int s = 0; s < 2; ++s) row.push_back(c * cur.t[v][s].range);
        for (int v = 0; v < 2; ++v)
            for (int s = 0; s < 2; ++s) row.push_back(c * (cur.t[v][s].mean - prev.t[v][s].mean));
        row.insert(row.end(), {cur.log_prcp, cur.log_snow, cur.log_prcp - prev.log_prcp, cur.log_snow - prev.log_snow});
        if (config.squares) {
            for (std::size_t i = 0; i < n_temperature; ++i) row.push_back(row[i] * row[i]);
        }
        out.table.years.push_back(year);
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < names.size(); ++j) m(static_cast<Index>(r), static_cast<Index>(j)) = rows[r][j];
    }
    out.table.values = CovariateMatrix(std::move(m), std::move(names));
    return out;
}

AlignedData align_response(const YearlySeries& response, const CovariateTable& climate, int lag) {
    const auto& years = response.years;
    const Index n = response.series.size();
    if (static_cast<Index>(years.size()) != n) throw InputError("response years and levels differ in length");
    const auto has = [&](int y) { return std::find(climate.years.begin(), climate.years.end(), y) != climate.years.end(); };

    // Longest run [a, b] where every year after the first has its driving climate year.
    Index best_a = 0, best_b = 0, a = 0;
    for (Index i = 1; i < n; ++i) {
        if (!has(years[static_cast<std::size_t>(i)] - lag)) {
            a = i;
            continue;
        }
        if (i - a > best_b - best_a) {
            best_a = a;
            best_b = i;
        }
    }
    if (best_b - best_a < 1) throw InputError("no two consecutive response years have lagged climate data");

    AlignedData out;
    const Index len = best_b - best_a + 1;
    if (len < n) {
        out.notes.push_back("kept response years " + std::to_string(years[static_cast<std::size_t>(best_a)]) + "-" +
                            std::to_string(years[static_cast<std::size_t>(best_b)]) + " of " +
                            std::to_string(years.front()) + "-" + std::to_string(years.back()) +
                            " (lagged climate unavailable elsewhere)");
    }
    std::vector<int> levels;
    Matrix design = Matrix::Zero(len, climate.values.cols());
    for (Index i = 0; i < len; ++i) {
        const int year = years[static_cast<std::size_t>(best_a + i)];
        out.years.push_back(year);
        levels.push_back(response.series.level(best_a + i));
        const int source = year + 1 - lag;
        const auto it = std::find(climate.years.begin(), climate.years.end(), source);
        if (it != climate.years.end()) {
            design.row(i) = climate.values.values().row(it - climate.years.begin());
        } else if (i + 1 < len) {
            throw InputError("internal: missing climate year " + std::to_string(source));
        } else {
            out.notes.push_back("final design row zero-filled (climate year " + std::to_string(source) +
                                " unavailable; the row is not used)");
        }
    }
    out.series = OrdinalSeries(std::move(levels), response.series.K());
    out.covariates = CovariateMatrix(std::move(design), climate.values.names());
    return out;
}

}  // namespace acar
