#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pubdyn/analysis.hpp"
#include "pubdyn/fitkit.hpp"
#include "pubdyn/metrics.hpp"

namespace pubdyn {

/// Canonical text form: keys sorted, two-space indentation, floats with 17
/// significant digits, integers exact, non-finite floats as null.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json to_json(const SummaryStats& summary);
nlohmann::json to_json(const ingest::IngestReport& report);
/// Seconds-support histograms are left to the CSV series.
nlohmann::json to_json(const DistributionResult& result);
nlohmann::json to_json(const fitkit::FitModel& model);
nlohmann::json to_json(const fitkit::FitResult& fit);
nlohmann::json to_json(const fitkit::AnomalyReport& anomaly);
nlohmann::json to_json(const AnalysisReport& report);

/// support,count,cumulative_fraction
void write_distribution_csv(std::ostream& out, const DistributionResult& result);
/// support,observed,model,residual,relative
void write_residuals_csv(std::ostream& out, const std::vector<fitkit::ResidualPoint>& points);

/// Reads support,count rows; further columns are ignored. A first line that
/// does not start with a digit or sign is taken as a header. Throws SchemaError.
std::vector<fitkit::Sample> read_histogram_csv(std::istream& in);

}  // namespace pubdyn
