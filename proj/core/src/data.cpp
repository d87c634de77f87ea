#include "acar/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace acar {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(first, last - first + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

int parse_year(const std::string& cell, const std::string& where) {
    int year = 0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, year);
    if (ec != std::errc() || ptr != end) throw InputError(where + ": year '" + cell + "' is not an integer");
    return year;
}

void check_consecutive(const std::vector<int>& years, const std::string& what) {
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] != years[i - 1] + 1) {
            throw InputError(what + ": years must be consecutive (" + std::to_string(years[i - 1]) + " then " +
                             std::to_string(years[i]) + ")");
        }
    }
}

}  // namespace

Index CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cells = split(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw InputError(source + ": empty CSV");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_csv(in, path);
}

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw NumericalError("cannot format number");
    return {buf, ptr};
}

double parse_number(const std::string& cell, bool allow_missing) {
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        if (allow_missing) return std::numeric_limits<double>::quiet_NaN();
        throw InputError("missing value where a number is required");
    }
    double value = 0.0;
    const char* begin = cell.data();
    if (*begin == '+') ++begin;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw InputError("'" + cell + "' is not a number");
    return value;
}

int defoliation_level(double proportion) {
    if (!(proportion >= 0.0 && proportion <= 1.0)) {
        throw InputError("defoliation proportion " + format_number(proportion) + " is outside [0, 1]");
    }
    if (proportion == 0.0) return 0;
    if (proportion <= 0.35) return 1;
    if (proportion <= 0.70) return 2;
    return 3;
}

OrdinalSeries classify_defoliation(std::span<const double> proportions) {
    std::vector<int> levels;
    levels.reserve(proportions.size());
    for (double p : proportions) levels.push_back(defoliation_level(p));
    return OrdinalSeries(std::move(levels), 3);
}

YearlySeries parse_ordinal_series(const CsvTable& table, int K) {
    const Index year_col = table.column("year");
    const Index level_col = table.column("level");
    const Index prop_col = table.column("proportion");
    if (year_col < 0) throw InputError("series CSV needs a 'year' column");
    if (level_col < 0 && prop_col < 0) throw InputError("series CSV needs a 'level' or 'proportion' column");

    YearlySeries out;
    std::vector<int> levels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "series row " + std::to_string(r + 1);
        out.years.push_back(parse_year(row[static_cast<std::size_t>(year_col)], where));
        if (level_col >= 0) {
            const std::string& cell = row[static_cast<std::size_t>(level_col)];
            int level = -1;
            const auto* end = cell.data() + cell.size();
            const auto [ptr, ec] = std::from_chars(cell.data(), end, level);
            if (ec != std::errc() || ptr != end || level < 0 || (K > 0 && level > K)) {
                throw InputError(where + ": unknown level code '" + cell + "'");
            }
            levels.push_back(level);
        } else {
            levels.push_back(defoliation_level(parse_number(row[static_cast<std::size_t>(prop_col)])));
        }
    }
    if (levels.empty()) throw InputError("series CSV has no rows");
    check_consecutive(out.years, "series");
    if (K <= 0) K = level_col >= 0 ? std::max(1, *std::max_element(levels.begin(), levels.end())) : 3;
    out.series = OrdinalSeries(std::move(levels), K);
    return out;
}

YearlySeries load_ordinal_series(const std::string& path, int K) {
    return parse_ordinal_series(read_csv_file(path), K);
}

void write_ordinal_series(std::ostream& out, const std::vector<int>& years, const OrdinalSeries& series) {
    if (static_cast<Index>(years.size()) != series.size()) throw InputError("years and series differ in length");
    out << "year,level\n";
    for (Index t = 0; t < series.size(); ++t) out << years[static_cast<std::size_t>(t)] << ',' << series.level(t) << '\n';
}

CovariateMatrix CovariateTable::rows_for(std::span<const int> wanted) const {
    Matrix m(static_cast<Index>(wanted.size()), values.cols());
    for (std::size_t i = 0; i < wanted.size(); ++i) {
        const auto it = std::find(years.begin(), years.end(), wanted[i]);
        if (it == years.end()) throw InputError("covariates missing for year " + std::to_string(wanted[i]));
        m.row(static_cast<Index>(i)) = values.values().row(it - years.begin());
    }
    return CovariateMatrix(std::move(m), values.names());
}

CovariateTable parse_covariate_table(const CsvTable& table) {
    const Index year_col = table.column("year");
    if (year_col < 0) throw InputError("covariate CSV needs a 'year' column");
    std::vector<std::string> names;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<Index>(c) == year_col) continue;
        names.push_back(table.header[c]);
        cols.push_back(c);
    }
    CovariateTable out;
    Matrix m(static_cast<Index>(table.rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "covariate row " + std::to_string(r + 1);
        out.years.push_back(parse_year(row[static_cast<std::size_t>(year_col)], where));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            try {
                m(static_cast<Index>(r), static_cast<Index>(j)) = parse_number(row[cols[j]]);
            } catch (const InputError& err) {
                throw InputError(where + ", column '" + names[j] + "': " + err.what());
            }
        }
    }
    out.values = CovariateMatrix(std::move(m), std::move(names));
    return out;
}

CovariateTable load_covariate_table(const std::string& path) { return parse_covariate_table(read_csv_file(path)); }

void write_covariate_table(std::ostream& out, const CovariateTable& table) {
    if (static_cast<Index>(table.years.size()) != table.values.rows()) {
        throw InputError("covariate table years and rows differ");
    }
    out << "year";
    for (const auto& name : table.values.names()) out << ',' << name;
    out << '\n';
    for (Index r = 0; r < table.values.rows(); ++r) {
        out << table.years[static_cast<std::size_t>(r)];
        for (Index c = 0; c < table.values.cols(); ++c) out << ',' << format_number(table.values.values()(r, c));
        out << '\n';
    }
}

std::vector<int> default_years(Index n) {
    std::vector<int> years(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) years[static_cast<std::size_t>(i)] = static_cast<int>(i + 1);
    return years;
}

}  // namespace acar
