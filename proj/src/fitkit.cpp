#include "pubdyn/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

namespace pubdyn::fitkit {

bool is_valid(const FitModel& m) {
  return m.a > 0 && m.b >= 0 && m.c >= 0 && m.p > m.q && m.q > 0 && std::isfinite(m.a) &&
         std::isfinite(m.b) && std::isfinite(m.c) && std::isfinite(m.p) && std::isfinite(m.q);
}

double evaluate_model(const FitModel& m, double s) {
  if (!(s >= 1.0)) throw DomainError("model support must be >= 1");
  const double x = s - 1.0;
  if (x == 0.0) return m.a;
  return m.a / (m.b * std::pow(x, m.p) + m.c * std::pow(x, m.q) + 1.0);
}

double jaccard(const Interval& x, const Interval& y) {
  const std::int64_t lo = std::max(x.lo, y.lo);
  const std::int64_t hi = std::min(x.hi, y.hi);
  const std::int64_t inter = hi >= lo ? hi - lo + 1 : 0;
  const std::int64_t uni = x.length() + y.length() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<Sample> to_samples(const SparseHistogram& histogram) {
  std::vector<Sample> out;
  out.reserve(histogram.bins().size());
  for (const auto& [support, count] : histogram.bins()) {
    out.push_back({support, static_cast<double>(count)});
  }
  return out;
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Parameter vector: (ln a, ln b, p, ln c, q).
Vec5 to_theta(const FitModel& m) {
  Vec5 t;
  t << std::log(m.a), std::log(std::max(m.b, 1e-300)), m.p, std::log(std::max(m.c, 1e-300)), m.q;
  return t;
}

FitModel from_theta(const Vec5& t) {
  return {std::exp(t[0]), std::exp(t[1]), t[2], std::exp(t[3]), t[4]};
}

struct Point {
  double x;  // s - 1
  double log_x;
  double log_y;
};

double log_model(const Vec5& t, const Point& pt, double* grad) {
  const double b = std::exp(t[1]);
  const double c = std::exp(t[3]);
  double bx = 0.0;
  double cx = 0.0;
  if (pt.x > 0.0) {
    bx = b * std::exp(t[2] * pt.log_x);
    cx = c * std::exp(t[4] * pt.log_x);
  }
  const double d = bx + cx + 1.0;
  if (grad) {
    grad[0] = 1.0;
    grad[1] = -bx / d;
    grad[2] = -bx * pt.log_x / d;
    grad[3] = -cx / d;
    grad[4] = -cx * pt.log_x / d;
  }
  return t[0] - std::log(d);
}

double cost_of(const Vec5& t, const std::vector<Point>& pts) {
  double cost = 0.0;
  for (const auto& pt : pts) {
    const double r = pt.log_y - log_model(t, pt, nullptr);
    cost += r * r;
  }
  return cost;
}

/// a from the smallest support, p and q near the published exponents, b and c
/// by matching the model at two supports.
FitModel initial_guess(const std::vector<Sample>& used) {
  FitModel m;
  m.p = 2.8;
  m.q = 1.5;
  m.a = used.front().value;
  if (used.front().support > 1) {
    m.a = std::max_element(used.begin(), used.end(), [](auto& x, auto& y) {
            return x.value < y.value;
          })->value;
  }

  std::vector<const Sample*> tail;
  for (const auto& s : used) {
    if (s.support > 1) tail.push_back(&s);
  }
  m.b = 1e-4;
  m.c = 0.1;
  if (tail.size() < 2) return m;
  const Sample& s1 = *tail[tail.size() / 3];
  const Sample& s2 = *tail.back();
  const double x1 = static_cast<double>(s1.support - 1);
  const double x2 = static_cast<double>(s2.support - 1);
  const double d1 = m.a / s1.value - 1.0;
  const double d2 = m.a / s2.value - 1.0;
  // [x1^p x1^q; x2^p x2^q] [b c]^T = [d1 d2]^T
  const double m11 = std::pow(x1, m.p), m12 = std::pow(x1, m.q);
  const double m21 = std::pow(x2, m.p), m22 = std::pow(x2, m.q);
  const double det = m11 * m22 - m12 * m21;
  if (det != 0.0) {
    const double b = (d1 * m22 - m12 * d2) / det;
    const double c = (m11 * d2 - m21 * d1) / det;
    if (b > 0 && c > 0 && std::isfinite(b) && std::isfinite(c)) {
      m.b = b;
      m.c = c;
      return m;
    }
  }
  // One-term fallbacks keep both coefficients positive.
  if (d2 > 0) m.b = 0.5 * d2 / m21;
  if (d1 > 0) m.c = 0.5 * d1 / m12;
  return m;
}

FitModel canonical(FitModel m) {
  if (m.p < m.q) {
    std::swap(m.b, m.c);
    std::swap(m.p, m.q);
  }
  return m;
}

}  // namespace

// Iteration also ends when the last kStallSteps accepted steps together
// lowered the cost by less than this fraction.
constexpr double kCostStall = 1e-8;
constexpr int kStallSteps = 10;

FitResult fit(std::span<const Sample> samples, const FitOptions& options) {
  std::vector<Sample> used;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& s : samples) {
    if (s.support < 1) continue;
    lo = std::min(lo, s.support);
    hi = std::max(hi, s.support);
  }
  const Interval interval = options.interval.value_or(Interval{lo, hi});
  for (const auto& s : samples) {
    if (s.support < 1 || !interval.contains(s.support)) continue;
    if (options.exclude && options.exclude->contains(s.support)) continue;
    if (!(s.value > 0.0)) continue;
    used.push_back(s);
  }
  std::sort(used.begin(), used.end(), [](auto& x, auto& y) { return x.support < y.support; });
  if (used.size() < 6) {
    throw FitError("fit needs at least 6 non-empty bins outside the excluded region, got " +
                   std::to_string(used.size()));
  }

  std::vector<Point> pts;
  pts.reserve(used.size());
  for (const auto& s : used) {
    const double x = static_cast<double>(s.support - 1);
    pts.push_back({x, x > 0 ? std::log(x) : 0.0, std::log(s.value)});
  }

  Vec5 theta = to_theta(options.init.value_or(initial_guess(used)));
  double cost = cost_of(theta, pts);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  std::vector<double> accepted{cost};

  auto make_result = [&](const Vec5& t, double c) {
    FitResult r;
    r.model = canonical(from_theta(t));
    r.diagnostics.interval = interval;
    r.diagnostics.excluded_region = options.exclude;
    r.diagnostics.bins_used = used.size();
    r.diagnostics.iterations = iter;
    r.diagnostics.cost = c;
    double worst = 0.0;
    for (const auto& s : used) {
      const double f = evaluate_model(r.model, static_cast<double>(s.support));
      worst = std::max(worst, std::abs(s.value - f) / s.value);
    }
    r.diagnostics.max_relative_error = worst;
    return r;
  };

  while (iter < options.max_iterations) {
    ++iter;
    Mat5 jtj = Mat5::Zero();
    Vec5 jtr = Vec5::Zero();
    double grad[5];
    for (const auto& pt : pts) {
      const double r = pt.log_y - log_model(theta, pt, grad);
      // d r / d theta = -grad
      Eigen::Map<const Vec5> g(grad);
      jtj.noalias() += g * g.transpose();
      jtr.noalias() -= g * r;
    }

    Mat5 damped = jtj;
    for (int i = 0; i < 5; ++i) damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
    const Vec5 step = damped.ldlt().solve(-jtr);
    if (!step.allFinite()) {
      lambda *= 10.0;
      continue;
    }

    const Vec5 trial = theta + step;
    const double trial_cost = cost_of(trial, pts);
    const bool small = step.norm() <= options.tolerance * (theta.norm() + options.tolerance);
    if (std::isfinite(trial_cost) && trial_cost <= cost) {
      theta = trial;
      cost = trial_cost;
      accepted.push_back(cost);
      const auto n = accepted.size();
      const bool stalled =
          n > kStallSteps && accepted[n - 1 - kStallSteps] - cost <= kCostStall * cost;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (small || stalled) {
        converged = true;
        break;
      }
    } else {
      if (small || lambda > 1e16) {
        converged = true;
        break;
      }
      lambda *= 10.0;
    }
  }

  FitResult result = make_result(theta, cost);
  if (!converged) {
    throw FitError("fit did not converge within " + std::to_string(options.max_iterations) +
                       " iterations",
                   result);
  }
  if (!is_valid(result.model)) {
    throw FitError("fit converged to parameters outside the model domain", result);
  }
  return result;
}

FitResult fit(const SparseHistogram& histogram, const FitOptions& options) {
  const auto samples = to_samples(histogram);
  return fit(std::span<const Sample>(samples), options);
}

namespace {

Interval sample_range(std::span<const Sample> samples) {
  Interval r{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::min()};
  for (const auto& s : samples) {
    if (s.support < 1) continue;
    r.lo = std::min(r.lo, s.support);
    r.hi = std::max(r.hi, s.support);
  }
  return r;
}

std::map<std::int64_t, double> by_support(std::span<const Sample> samples) {
  std::map<std::int64_t, double> m;
  for (const auto& s : samples) m[s.support] += s.value;
  return m;
}

}  // namespace

std::vector<ResidualPoint> residual_series(std::span<const Sample> samples, const FitModel& model,
                                           const Interval& interval) {
  const auto observed = by_support(samples);
  std::vector<ResidualPoint> out;
  for (std::int64_t s = std::max<std::int64_t>(interval.lo, 1); s <= interval.hi; ++s) {
    auto it = observed.find(s);
    ResidualPoint pt;
    pt.support = s;
    pt.observed = it == observed.end() ? 0.0 : it->second;
    pt.model = evaluate_model(model, static_cast<double>(s));
    pt.residual = pt.observed - pt.model;
    pt.relative = pt.residual / pt.model;
    out.push_back(pt);
  }
  return out;
}

std::optional<Interval> detect_anomaly_region(std::span<const Sample> samples,
                                              const FitModel& model,
                                              const DetectOptions& options) {
  const Interval scan = options.scan.value_or(sample_range(samples));
  if (scan.length() <= 0) return std::nullopt;
  const auto series = residual_series(samples, model, scan);
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t half = std::max(options.window, 1) / 2;

  std::vector<double> smooth(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += series[j].relative;
    smooth[i] = sum / static_cast<double>(hi - lo + 1);
  }

  std::optional<Interval> best;
  double best_excess = -std::numeric_limits<double>::infinity();
  std::ptrdiff_t i = 0;
  while (i < n) {
    if (smooth[i] <= options.threshold) {
      ++i;
      continue;
    }
    std::ptrdiff_t j = i;
    double excess = 0.0;
    while (j < n && smooth[j] > options.threshold) excess += series[j++].residual;
    if (j - i >= options.run_length && excess > best_excess) {
      best = Interval{series[i].support, series[j - 1].support};
      best_excess = excess;
    }
    i = j;
  }
  return best;
}

AnomalyReport estimate_excess(std::span<const Sample> samples, const FitModel& model,
                              std::optional<Interval> region, double epsilon) {
  AnomalyReport report;
  report.region = region;
  if (!region || region->length() <= 0) return report;
  double envelope = 0.0;
  for (const auto& pt : residual_series(samples, model, *region)) {
    report.residuals.emplace_back(pt.support, pt.residual);
    report.excess_estimate += std::max(pt.residual, 0.0);
    envelope += epsilon * pt.model;
  }
  report.upper_bound = report.excess_estimate;
  report.lower_bound = std::max(report.excess_estimate - envelope, 0.0);
  return report;
}

AnomalyAnalysis analyze_anomaly(std::span<const Sample> samples, const AnomalyOptions& options) {
  AnomalyAnalysis out;
  DetectOptions detect = options.detect;
  if (!detect.scan) {
    detect.scan = options.fit.interval.value_or(sample_range(samples));
  }

  out.fit = fit(samples, options.fit);
  std::optional<Interval> region = options.fit.exclude;
  if (!region) {
    region = detect_anomaly_region(samples, out.fit.model, detect);
    FitOptions refit = options.fit;
    while (region && out.refits < options.max_refits) {
      refit.exclude = region;
      refit.init = out.fit.model;
      out.fit = fit(samples, refit);
      ++out.refits;
      auto next = detect_anomaly_region(samples, out.fit.model, detect);
      if (next == region) break;
      region = next;
    }
  }
  out.anomaly =
      estimate_excess(samples, out.fit.model, region, out.fit.diagnostics.max_relative_error);
  return out;
}

}  // namespace pubdyn::fitkit
