#pragma once

// Yearly climate covariates from daily station records.
//
// Per climate year y the table holds
//   range_{tmax,tmin}_{spring,summer}      max - min of the daily values in the season
//   diff_mean_{tmax,tmin}_{spring,summer}  seasonal mean in y minus seasonal mean in y-1
//   log_prcp, log_snow                     log of the annual totals
//   diff_log_prcp, diff_log_snow           their differences y minus y-1
//   <temperature column>_sq                squares of the eight temperature columns
// Spring is April-June, summer July-September. Temperature columns are
// multiplied by the configured scale before squaring.

#include "acar/data.hpp"
#include "acar/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace acar {

struct DailyClimateRecord {
    int year = 0;
    int month = 0;
    int day = 0;
    std::optional<double> tmax;
    std::optional<double> tmin;
    std::optional<double> prcp;
    std::optional<double> snow;
};

/// Reads `date,tmax,tmin,prcp,snow` with ISO dates; empty or NA cells are missing.
std::vector<DailyClimateRecord> read_daily_climate(const std::string& path);
std::vector<DailyClimateRecord> parse_daily_climate(const CsvTable& table);

struct SeasonalConfig {
    double temperature_scale = 0.1;
    double min_coverage = 0.8;  ///< share of days with data required per season or year
    bool squares = true;
};

struct DroppedYear {
    int year = 0;
    std::string reason;
};

struct SeasonalCovariateTable {
    CovariateTable table;  ///< one row per retained climate year
    double temperature_scale = 0.1;
    std::vector<DroppedYear> dropped;
};

/// Names of the linear columns, in table order.
std::vector<std::string> seasonal_linear_columns();

/// Column name of the square of `linear` (temperature columns only).
std::string square_column(const std::string& linear);

SeasonalCovariateTable build_seasonal_covariates(const std::vector<DailyClimateRecord>& daily,
                                                 const SeasonalConfig& config = {});

struct AlignedData {
    std::vector<int> years;
    OrdinalSeries series;
    CovariateMatrix covariates;
    std::vector<std::string> notes;
};

/**
 * Pairs a yearly response with climate covariates at the given lag: the latent
 * value of year y is driven by the climate of year y - lag. Because row t-1 of
 * the design drives time t, the design row of response year r holds climate
 * year r + 1 - lag. Response years whose driving climate year is unavailable
 * are removed and the longest run of consecutive remaining years is kept. The
 * final design row is never used by the likelihood; it is zero-filled when its
 * climate year is missing.
 */
AlignedData align_response(const YearlySeries& response, const CovariateTable& climate, int lag);

}  // namespace acar
