#include "pubdyn/analysis.hpp"

#include <fstream>
#include <limits>

#include "pubdyn/error.hpp"
#include "pubdyn/report.hpp"

namespace pubdyn {

char delimiter_for(std::string_view format) {
  if (format == "tsv") return '\t';
  if (format == "csv") return ',';
  throw ConfigError("format must be tsv or csv, got '" + std::string(format) + "'");
}

AnalyzeOptions analyze_options_from(const KeyValueConfig& kv, AnalyzeOptions base) {
  kv.require_known({"posts_only", "comments_only", "exclude_region", "fit_interval",
                    "detect_threshold", "detect_run_length", "detect_window", "threads", "format",
                    "strict_header", "window_start", "window_end", "max_depth"});
  AnalyzeOptions o = std::move(base);
  o.posts_only = kv.get_bool("posts_only").value_or(o.posts_only);
  o.comments_only = kv.get_bool("comments_only").value_or(o.comments_only);
  if (auto r = kv.get_range("exclude_region")) o.exclude_region = fitkit::Interval{r->first, r->second};
  if (auto r = kv.get_range("fit_interval")) o.fit_interval = fitkit::Interval{r->first, r->second};
  o.detect.threshold = kv.get_double("detect_threshold").value_or(o.detect.threshold);
  o.detect.run_length = static_cast<int>(kv.get_int("detect_run_length").value_or(o.detect.run_length));
  o.detect.window = static_cast<int>(kv.get_int("detect_window").value_or(o.detect.window));
  o.threads = static_cast<int>(kv.get_int("threads").value_or(o.threads));
  if (auto f = kv.get("format")) o.delimiter = delimiter_for(*f);
  o.strict_header = kv.get_bool("strict_header").value_or(o.strict_header);
  const auto start = kv.get_int("window_start");
  const auto end = kv.get_int("window_end");
  if (start.has_value() != end.has_value()) {
    throw ConfigError("window_start and window_end must be given together");
  }
  if (start) {
    if (*end < *start) throw ConfigError("window_end precedes window_start");
    o.window = ingest::TimeWindow{*start, *end};
  }
  o.max_depth = static_cast<std::uint32_t>(kv.get_uint("max_depth").value_or(o.max_depth));
  return o;
}

const DistributionResult* AnalysisReport::find(MetricKind kind) const {
  for (const auto& d : distributions) {
    if (d.kind == kind) return &d;
  }
  return nullptr;
}

std::vector<MetricKind> selected_metrics(const AnalyzeOptions& options) {
  if (options.posts_only && options.comments_only) {
    throw ConfigError("posts_only and comments_only are mutually exclusive");
  }
  std::vector<MetricKind> kinds;
  for (MetricKind kind : kAllMetrics) {
    const MetricInputs in = metric_inputs(kind);
    if (options.posts_only && in != MetricInputs::posts) continue;
    if (options.comments_only && in != MetricInputs::comments) continue;
    kinds.push_back(kind);
  }
  return kinds;
}

AnalysisReport analyze(const Corpus& corpus, const AnalyzeOptions& options) {
  AnalysisReport report;
  report.summary = compute_summary(corpus);
  for (ResolveFailure f :
       {ResolveFailure::orphan, ResolveFailure::cycle, ResolveFailure::depth_exceeded}) {
    report.unresolved[std::string(to_string(f))] = 0;
  }
  for (const auto& u : corpus.unresolved()) ++report.unresolved[std::string(to_string(u.reason))];

  report.distributions = compute_distributions(corpus, selected_metrics(options), options.threads);
  if (const auto* delays = report.find(MetricKind::first_comment_delay)) {
    report.negative_delays = negative_subset(*delays);
  }

  const auto* per_account = report.find(MetricKind::posts_per_account);
  if (per_account && !per_account->histogram.empty()) {
    fitkit::AnomalyOptions ao;
    ao.fit.interval = options.fit_interval;
    ao.fit.exclude = options.exclude_region;
    ao.detect = options.detect;
    const auto samples = fitkit::to_samples(per_account->histogram);
    try {
      report.anomaly = fitkit::analyze_anomaly(samples, ao);
    } catch (const fitkit::FitError& e) {
      report.fit_error = e.what();
    }
  }
  report.conclusions = compute_conclusions(report);
  return report;
}

namespace {

std::optional<double> as_double(const std::optional<std::int64_t>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

/// Share of the item mass carried by entities with support <= limit.
std::optional<double> mass_share_up_to(const DistributionResult& d, std::optional<std::int64_t> limit) {
  if (!limit) return std::nullopt;
  const SparseHistogram mass = d.histogram.mass_weighted();
  if (mass.total_weight() == 0) return std::nullopt;
  const auto below = mass.restricted(std::numeric_limits<std::int64_t>::min(), *limit);
  return static_cast<double>(below.total_weight()) / static_cast<double>(mass.total_weight());
}

}  // namespace

std::map<std::string, std::optional<double>> compute_conclusions(const AnalysisReport& report) {
  std::map<std::string, std::optional<double>> c;
  auto get = [&](MetricKind k) { return report.find(k); };
  auto median = [&](MetricKind k) -> std::optional<double> {
    const auto* d = get(k);
    return d ? as_double(d->median_by_population) : std::nullopt;
  };
  auto mass_median = [&](MetricKind k) -> std::optional<double> {
    const auto* d = get(k);
    return d ? as_double(d->median_by_mass) : std::nullopt;
  };
  auto share_below_mass_median = [&](MetricKind k) -> std::optional<double> {
    const auto* d = get(k);
    return d ? mass_share_up_to(*d, d->median_by_mass) : std::nullopt;
  };

  // 1: accounts above the smooth model in the anomalous region
  c["anomaly_excess_accounts"] = std::nullopt;
  c["anomaly_excess_lower_bound"] = std::nullopt;
  c["anomaly_excess_upper_bound"] = std::nullopt;
  c["anomaly_region_lo"] = std::nullopt;
  c["anomaly_region_hi"] = std::nullopt;
  if (report.anomaly && report.anomaly->anomaly.region) {
    const auto& a = report.anomaly->anomaly;
    c["anomaly_excess_accounts"] = a.excess_estimate;
    c["anomaly_excess_lower_bound"] = a.lower_bound;
    c["anomaly_excess_upper_bound"] = a.upper_bound;
    c["anomaly_region_lo"] = static_cast<double>(a.region->lo);
    c["anomaly_region_hi"] = static_cast<double>(a.region->hi);
  }
  // 2
  c["post_mass_median_performance"] = mass_median(MetricKind::posts_per_account);
  c["share_posts_below_mass_median"] = share_below_mass_median(MetricKind::posts_per_account);
  // 3
  c["median_post_interval_seconds"] = median(MetricKind::post_interevent);
  // 4
  c["comment_mass_median_performance"] = mass_median(MetricKind::comments_per_account);
  c["share_comments_below_mass_median"] = share_below_mass_median(MetricKind::comments_per_account);
  // 5, 6
  c["median_comments_per_commented_post"] = median(MetricKind::comments_per_commented_post);
  c["comment_mass_median_comments_per_post"] = mass_median(MetricKind::comments_per_commented_post);
  // 7
  c["share_commented_posts_without_self_comment"] = std::nullopt;
  if (const auto* d = get(MetricKind::self_comments_per_commented_post);
      d && d->histogram.total_weight() > 0) {
    c["share_commented_posts_without_self_comment"] =
        static_cast<double>(d->zero_count) / static_cast<double>(d->histogram.total_weight());
  }
  // 8, 9
  c["median_comments_received_per_post_author"] = median(MetricKind::comments_received_per_post_author);
  c["comment_mass_median_comments_received_per_author"] =
      mass_median(MetricKind::comments_received_per_post_author);
  // 10, 11
  c["median_commentators_per_commented_post"] = median(MetricKind::commentators_per_commented_post);
  c["commentator_mass_median_commentators_per_author"] =
      mass_median(MetricKind::commentators_per_post_author);
  // 12, 13
  c["median_commented_posts_per_commentator"] = median(MetricKind::commented_posts_per_commentator);
  c["median_post_authors_per_commentator"] = median(MetricKind::post_authors_per_commentator);
  // 14
  c["median_first_comment_delay_seconds"] = median(MetricKind::first_comment_delay);
  c["mode_first_comment_delay_seconds"] = std::nullopt;
  c["max_first_comment_delay_seconds"] = std::nullopt;
  if (const auto* d = get(MetricKind::first_comment_delay)) {
    c["mode_first_comment_delay_seconds"] = as_double(mode(d->histogram));
    c["max_first_comment_delay_seconds"] = as_double(d->max_support);
  }
  // 15
  c["negative_delay_count"] = std::nullopt;
  c["median_negative_delay_seconds"] = std::nullopt;
  if (const auto* d = get(MetricKind::first_comment_delay)) {
    c["negative_delay_count"] = static_cast<double>(d->negative_count);
    if (report.negative_delays) {
      c["median_negative_delay_seconds"] = as_double(report.negative_delays->median_by_population);
    }
  }
  // 16
  c["median_comment_interval_seconds"] = median(MetricKind::comment_interevent);
  c["mode_nonzero_comment_interval_seconds"] = std::nullopt;
  if (const auto* d = get(MetricKind::comment_interevent)) {
    c["mode_nonzero_comment_interval_seconds"] =
        as_double(mode(d->histogram.restricted(1, std::numeric_limits<std::int64_t>::max())));
  }
  return c;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

}  // namespace

AnalysisReport run_analyze(const AnalyzePaths& paths, const AnalyzeOptions& options) {
  selected_metrics(options);  // rejects contradictory switches early
  const bool want_posts = !options.comments_only;
  const bool want_comments = !options.posts_only;
  if (want_posts && !paths.posts) throw ConfigError("a posts file is required");
  if (want_comments && !paths.comments) throw ConfigError("a comments file is required");

  ingest::Format format;
  format.delimiter = options.delimiter;
  format.strict = options.strict_header;
  format.window = options.window;
  format.threads = options.threads;

  ingest::ParseResult<PostRecord> posts;
  ingest::ParseResult<CommentRecord> comments;
  if (want_posts) {
    posts = ingest::parse_posts_file(*paths.posts, format);
    if (posts.records.empty()) {
      throw EmptyCorpusError("empty corpus: no posts accepted from " + paths.posts->string());
    }
  }
  if (want_comments) {
    comments = ingest::parse_comments_file(*paths.comments, format);
    if (!want_posts && comments.records.empty()) {
      throw EmptyCorpusError("empty corpus: no comments accepted from " +
                             paths.comments->string());
    }
  }

  const Corpus corpus = build_corpus(std::move(posts.records), std::move(comments.records),
                                     CorpusOptions{options.max_depth, options.threads});
  AnalysisReport report = analyze(corpus, options);
  if (want_posts) report.post_ingest = posts.report;
  if (want_comments) report.comment_ingest = comments.report;

  std::filesystem::create_directories(paths.out_dir);
  {
    auto f = open_output(paths.out_dir / "report.json");
    f << canonical_dump(to_json(report)) << '\n';
  }
  for (const auto& d : report.distributions) {
    auto f = open_output(paths.out_dir / (std::string(to_string(d.kind)) + ".csv"));
    write_distribution_csv(f, d);
  }
  if (report.anomaly) {
    const auto* per_account = report.find(MetricKind::posts_per_account);
    const auto samples = fitkit::to_samples(per_account->histogram);
    auto f = open_output(paths.out_dir / "residuals.csv");
    write_residuals_csv(f, fitkit::residual_series(samples, report.anomaly->fit.model,
                                                   report.anomaly->fit.diagnostics.interval));
  }
  if (report.post_ingest) {
    auto f = open_output(paths.out_dir / "posts.quarantine.tsv");
    ingest::write_quarantine(f, *report.post_ingest, '\t');
  }
  if (report.comment_ingest) {
    auto f = open_output(paths.out_dir / "comments.quarantine.tsv");
    ingest::write_quarantine(f, *report.comment_ingest, '\t');
  }
  return report;
}

}  // namespace pubdyn
