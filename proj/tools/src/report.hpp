#pragma once

// JSON and plain-text renderings of library results. Key order is fixed
// (ordered_json) and nothing time-dependent is emitted, so identical inputs
// give byte-identical reports.

#include "acar/climate.hpp"
#include "acar/comparison.hpp"
#include "acar/fit.hpp"
#include "acar/montecarlo.hpp"
#include "acar/portmanteau.hpp"
#include "acar/search.hpp"

#include <json.hpp>

#include <ostream>

namespace acar::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const FitResult& fit);
Json to_json(const PortmanteauResult& result);
Json to_json(const ComparisonResult& result);
Json to_json(const ThresholdResult& result);
Json to_json(const MCSummary& summary);
Json to_json(const ScenarioSummary& summary);
Json to_json(const SizeSummary& summary);
Json to_json(const ModelSearchReport& report);
Json to_json(const SeasonalCovariateTable& table);

void write_text(std::ostream& out, const FitResult& fit);
void write_text(std::ostream& out, const PortmanteauResult& result);
void write_text(std::ostream& out, const ComparisonResult& result, const std::vector<std::string>& names);
void write_text(std::ostream& out, const ThresholdResult& result, double scale);
void write_text(std::ostream& out, const MCSummary& summary);
void write_text(std::ostream& out, const ScenarioSummary& summary);
void write_text(std::ostream& out, const SizeSummary& summary);
void write_text(std::ostream& out, const ModelSearchReport& report);

}  // namespace acar::cli
