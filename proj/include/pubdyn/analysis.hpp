#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pubdyn/corpus.hpp"
#include "pubdyn/fitkit.hpp"
#include "pubdyn/ingest.hpp"
#include "pubdyn/kvconfig.hpp"
#include "pubdyn/metrics.hpp"

namespace pubdyn {

struct AnalyzeOptions {
  bool posts_only = false;
  bool comments_only = false;
  std::optional<fitkit::Interval> exclude_region;  // skips detection re-fits
  std::optional<fitkit::Interval> fit_interval;
  fitkit::DetectOptions detect;
  int threads = 0;
  char delimiter = '\t';
  bool strict_header = false;
  std::optional<ingest::TimeWindow> window;
  std::uint32_t max_depth = 64;
};

/// Keys: posts_only, comments_only, exclude_region (LO:HI), fit_interval
/// (LO:HI), detect_threshold, detect_run_length, detect_window, threads,
/// format (tsv|csv), strict_header, window_start, window_end, max_depth.
/// Values from `kv` override those already in `base`.
AnalyzeOptions analyze_options_from(const KeyValueConfig& kv, AnalyzeOptions base = {});

/// Parses "tsv" or "csv" into a delimiter. Throws ConfigError.
char delimiter_for(std::string_view format);

struct AnalysisReport {
  std::optional<ingest::IngestReport> post_ingest;
  std::optional<ingest::IngestReport> comment_ingest;
  SummaryStats summary;
  std::map<std::string, std::uint64_t> unresolved;  // failure reason -> comments
  std::vector<DistributionResult> distributions;    // kAllMetrics order, computed ones only
  std::optional<DistributionResult> negative_delays;
  std::optional<fitkit::AnomalyAnalysis> anomaly;
  std::optional<std::string> fit_error;
  std::map<std::string, std::optional<double>> conclusions;

  const DistributionResult* find(MetricKind kind) const;
};

/// Metrics computed under the options' posts-only / comments-only switches.
std::vector<MetricKind> selected_metrics(const AnalyzeOptions& options);

/// Summary, distributions, fit, anomaly and conclusions for one corpus.
/// A fit that cannot be performed is recorded in fit_error.
AnalysisReport analyze(const Corpus& corpus, const AnalyzeOptions& options);

/// The descriptive conclusions, recomputed from the report's distributions
/// and anomaly block. Entries whose inputs are missing are nullopt.
std::map<std::string, std::optional<double>> compute_conclusions(const AnalysisReport& report);

struct AnalyzePaths {
  std::optional<std::filesystem::path> posts;
  std::optional<std::filesystem::path> comments;
  std::filesystem::path out_dir;
};

/// Reads the inputs, analyzes them and writes report.json, one
/// <metric_kind>.csv per distribution, residuals.csv and the quarantine
/// sidecars under out_dir. Throws IoError or SchemaError for unreadable
/// input and EmptyCorpusError when nothing was accepted.
AnalysisReport run_analyze(const AnalyzePaths& paths, const AnalyzeOptions& options);

}  // namespace pubdyn
