#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pubdyn/error.hpp"
#include "pubdyn/histogram.hpp"

namespace pubdyn::fitkit {

/// Rational power-law model of accounts per performance value S:
///
///   f(S) = a / (b (S-1)^p + c (S-1)^q + 1)
///
/// with a > 0, b, c >= 0 and p > q > 0.
struct FitModel {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double c = 0.0;
  double q = 0.0;

  friend bool operator==(const FitModel&, const FitModel&) = default;
};

/// Constants fitted to the 2013 posts-per-account distribution.
constexpr FitModel reference_model() { return {295376.0, 1e-4, 2.78, 0.1, 1.545}; }

bool is_valid(const FitModel& model);

/// Throws DomainError for s < 1.
double evaluate_model(const FitModel& model, double s);

/// Closed support interval [lo, hi].
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool contains(std::int64_t s) const { return s >= lo && s <= hi; }
  std::int64_t length() const { return hi >= lo ? hi - lo + 1 : 0; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Jaccard index of two integer intervals.
double jaccard(const Interval& x, const Interval& y);

/// Observed value at one support point. Values are real so that tabulated
/// model curves can be fitted without rounding.
struct Sample {
  std::int64_t support = 0;
  double value = 0.0;
};

std::vector<Sample> to_samples(const SparseHistogram& histogram);

struct FitOptions {
  std::optional<Interval> interval;  // default: whole sample range
  std::optional<Interval> exclude;
  std::optional<FitModel> init;
  int max_iterations = 500;
  double tolerance = 1e-9;  // relative parameter change
};

struct FitDiagnostics {
  double max_relative_error = 0.0;  // max |y - f| / y over the fitted bins
  Interval interval;
  std::optional<Interval> excluded_region;
  std::size_t bins_used = 0;
  int iterations = 0;
  double cost = 0.0;  // sum of squared log residuals
};

struct FitResult {
  FitModel model;
  FitDiagnostics diagnostics;
};

class FitError : public Error {
 public:
  FitError(const std::string& what, std::optional<FitResult> best = std::nullopt)
      : Error(what), best_so_far_(std::move(best)) {}
  const std::optional<FitResult>& best_so_far() const { return best_so_far_; }

 private:
  std::optional<FitResult> best_so_far_;
};

/// Least squares on log values: minimizes sum (ln y - ln f(s))^2 over the
/// samples inside the interval, outside the excluded region, with y > 0.
/// Needs at least six such samples. Throws FitError.
FitResult fit(std::span<const Sample> samples, const FitOptions& options = {});
FitResult fit(const SparseHistogram& histogram, const FitOptions& options = {});

struct DetectOptions {
  double threshold = 0.2;  // smoothed relative residual
  int run_length = 5;      // consecutive supports above threshold
  int window = 5;          // centered moving average width
  std::optional<Interval> scan;  // default: whole sample range
};

/// Contiguous run of supports where the smoothed relative residual
/// (y - f) / f exceeds the threshold. Among several qualifying runs the one
/// with the largest summed excess wins.
std::optional<Interval> detect_anomaly_region(std::span<const Sample> samples,
                                              const FitModel& model,
                                              const DetectOptions& options = {});

struct AnomalyReport {
  std::optional<Interval> region;
  std::vector<std::pair<std::int64_t, double>> residuals;  // support -> observed - model
  double excess_estimate = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// excess = sum over the region of max(y - f, 0); the lower bound subtracts
/// epsilon * f per support (clamped at 0); the upper bound equals the excess.
AnomalyReport estimate_excess(std::span<const Sample> samples, const FitModel& model,
                              std::optional<Interval> region, double epsilon);

struct ResidualPoint {
  std::int64_t support = 0;
  double observed = 0.0;
  double model = 0.0;
  double residual = 0.0;
  double relative = 0.0;
};

/// Dense residual series over [interval.lo, interval.hi]; missing supports
/// count as 0 observed.
std::vector<ResidualPoint> residual_series(std::span<const Sample> samples, const FitModel& model,
                                           const Interval& interval);

struct AnomalyOptions {
  FitOptions fit;
  DetectOptions detect;
  int max_refits = 5;
};

struct AnomalyAnalysis {
  FitResult fit;
  AnomalyReport anomaly;
  int refits = 0;
};

/// Fit, detect, and re-fit with the detected region excluded until the
/// region is stable, then estimate the excess. A caller-supplied exclusion
/// is taken as the region with no detection or re-fitting.
AnomalyAnalysis analyze_anomaly(std::span<const Sample> samples, const AnomalyOptions& options = {});

}  // namespace pubdyn::fitkit
