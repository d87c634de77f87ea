#pragma once

// CSV ingestion and emission for the ordinal series and covariate tables.
//
//   series CSV:     year,level        (or year,proportion for raw defoliation shares)
//   covariate CSV:  year,<name>,...

#include "acar/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace acar {

/// A parsed CSV: header plus rows of raw cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] Index column(const std::string& name) const;  ///< -1 when absent
};

CsvTable read_csv(std::istream& in, const std::string& source = "input");
CsvTable read_csv_file(const std::string& path);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Strict number parsing; empty cells and "NA" give NaN when allow_missing.
double parse_number(const std::string& cell, bool allow_missing = false);

/// Defoliation proportion to level: 0 -> 0, (0, .35] -> 1, (.35, .70] -> 2, (.70, 1] -> 3.
int defoliation_level(double proportion);
OrdinalSeries classify_defoliation(std::span<const double> proportions);

struct YearlySeries {
    std::vector<int> years;
    OrdinalSeries series;
};

/**
 * Reads `year,level` (levels must be integers in 0..K) or `year,proportion`
 * (classified into K = 3 defoliation levels). K <= 0 takes the largest level
 * present, at least 1. Years must be strictly increasing and consecutive.
 */
YearlySeries load_ordinal_series(const std::string& path, int K = 0);
YearlySeries parse_ordinal_series(const CsvTable& table, int K = 0);

void write_ordinal_series(std::ostream& out, const std::vector<int>& years, const OrdinalSeries& series);

struct CovariateTable {
    std::vector<int> years;
    CovariateMatrix values;

    /// Rows for exactly these years, in order. Throws when a year is absent.
    [[nodiscard]] CovariateMatrix rows_for(std::span<const int> wanted) const;
};

CovariateTable load_covariate_table(const std::string& path);
CovariateTable parse_covariate_table(const CsvTable& table);
void write_covariate_table(std::ostream& out, const CovariateTable& table);

/// Integer sequence 1..n, used as years when a series comes without dates.
std::vector<int> default_years(Index n);

}  // namespace acar
