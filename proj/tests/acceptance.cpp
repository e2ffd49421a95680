// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "pubdyn/analysis.hpp"
#include "pubdyn/cli.hpp"
#include "pubdyn/fitkit.hpp"
#include "pubdyn/metrics.hpp"
#include "pubdyn/synth.hpp"
#include "test_util.hpp"

using namespace pubdyn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int number, bool passed, const std::string& detail, double seconds) {
  if (!passed) ++failures;
  std::printf("criterion %d: %s  %s  (%.3f s)\n", number, passed ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double round_to(double x, int digits) {
  const double k = std::pow(10.0, digits);
  return std::round(x * k) / k;
}

// Every corpus seen by the suite, for the identity checks of criteria 6 and 9.
struct Sample {
  std::string name;
  Corpus corpus;
};
std::vector<Sample> corpora;

void criterion_1() {
  const auto t0 = Clock::now();
  SummaryCounts c;
  c.n_posts = 96745854;
  c.n_post_accounts = 2864213;
  c.n_comments = 21366037;
  c.n_commenters = 2030855;
  c.n_commented_posts = 5893995;
  c.n_commented_post_authors = 660961;
  const auto s = summarize(c);
  const bool exact = *s.mean_post_performance == 96745854.0 / 2864213.0 &&
                     *s.mean_comment_performance == 21366037.0 / 2030855.0 &&
                     *s.mean_comments_per_commented_post == 21366037.0 / 5893995.0 &&
                     *s.mean_comments_per_commented_author == 21366037.0 / 660961.0;
  const bool shown = round_to(*s.mean_post_performance, 2) == 33.78 &&
                     round_to(*s.mean_comment_performance, 2) == 10.52 &&
                     round_to(*s.mean_comments_per_commented_post, 3) == 3.625 &&
                     round_to(*s.mean_comments_per_commented_author, 1) == 32.3;
  const double t = since(t0);
  report(1, exact && shown && t < 1.0,
         fmt("means %.4f %.4f %.4f %.4f", *s.mean_post_performance, *s.mean_comment_performance,
             *s.mean_comments_per_commented_post, *s.mean_comments_per_commented_author),
         t);
}

void criterion_2() {
  const auto t0 = Clock::now();
  const auto m = fitkit::reference_model();
  bool ok = fitkit::evaluate_model(m, 1) == 295376.0;
  double previous = fitkit::evaluate_model(m, 1);
  for (int i = 1; i <= 99900; ++i) {
    const double v = fitkit::evaluate_model(m, 1.0 + i * 0.01);
    ok = ok && v < previous;
    previous = v;
  }
  const double t = since(t0);
  report(2, ok && t < 1.0, fmt("f(1)=%.1f, f(1000)=%.6f, decreasing on a 0.01 grid", fitkit::evaluate_model(m, 1),
                               fitkit::evaluate_model(m, 1000)),
         t);
}

void criterion_3() {
  const auto t0 = Clock::now();
  const auto m = fitkit::reference_model();
  std::vector<fitkit::Sample> samples;
  for (std::int64_t s = 1; s <= 245; ++s) samples.push_back({s, fitkit::evaluate_model(m, static_cast<double>(s))});
  const auto r = fitkit::fit(samples);
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  const double worst = std::max({rel(r.model.a, m.a), rel(r.model.b, m.b), rel(r.model.p, m.p),
                                 rel(r.model.c, m.c), rel(r.model.q, m.q)});
  const double t = since(t0);
  report(3, worst < 1e-3 && r.diagnostics.max_relative_error < 1e-6 && t < 10.0,
         fmt("worst parameter error %.3g, max_relative_error %.3g, %g iterations", worst,
             r.diagnostics.max_relative_error, r.diagnostics.iterations),
         t);
}

fs::path big_corpus_dir;

void criterion_4() {
  const auto t0 = Clock::now();
  synth::SynthConfig cfg;
  cfg.seed = 2013;
  cfg.n_accounts = 300000;
  cfg.bump = synth::AnomalyBump{{85, 160}, 10000};
  cfg.comment_rate = 0.05;
  cfg.negative_delay_probability = 0.003;
  cfg.write_message_refs = false;
  const auto g = synth::generate(cfg);
  big_corpus_dir = testutil::scratch("criterion4");
  synth::write_corpus(g, big_corpus_dir / "corpus");

  AnalyzePaths paths{big_corpus_dir / "corpus" / "posts.tsv", big_corpus_dir / "corpus" / "comments.tsv",
                     big_corpus_dir / "report"};
  const auto r = run_analyze(paths, AnalyzeOptions{});
  const double t = since(t0);
  bool ok = r.anomaly && r.anomaly->anomaly.region;
  double j = 0, excess = 0;
  if (ok) {
    j = fitkit::jaccard(*r.anomaly->anomaly.region, {85, 160});
    excess = r.anomaly->anomaly.excess_estimate;
    ok = j >= 0.6 && std::abs(excess - 10000.0) <= 1000.0;
  }
  const auto region = ok ? *r.anomaly->anomaly.region : fitkit::Interval{};
  report(4, ok && t < 60.0,
         fmt("region [%g, %g], jaccard %.3f, excess %.1f", static_cast<double>(region.lo),
             static_cast<double>(region.hi), j, excess),
         t);
  corpora.push_back({"criterion-4", build_corpus(g.posts, g.comments)});
}

void criterion_5() {
  const auto t0 = Clock::now();
  int mismatches = 0;
  std::size_t largest = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    synth::SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_accounts = 40 + seed * 3;
    cfg.comment_rate = 0.5 + 0.05 * static_cast<double>(seed % 20);
    cfg.reply_probability = 0.3;
    cfg.negative_delay_probability = 0.05;
    cfg.interevent = {{0.5, 60.0, 2.0}, {0.5, 43703.0, 1.5}};
    cfg.write_message_refs = false;
    auto g = synth::generate(cfg);
    while (g.posts.size() + g.comments.size() > 10000) {
      cfg.n_accounts -= 10;
      g = synth::generate(cfg);
    }
    largest = std::max(largest, g.posts.size() + g.comments.size());
    Corpus c = build_corpus(g.posts, g.comments);
    for (auto kind : kAllMetrics) {
      const auto expected = oracle::compute(g.posts, g.comments, kind);
      if (!oracle::same(expected, compute_distribution(c, kind))) {
        ++mismatches;
        std::printf("  mismatch: seed %llu metric %s\n", static_cast<unsigned long long>(seed),
                    std::string(to_string(kind)).c_str());
      }
    }
    corpora.push_back({"oracle-" + std::to_string(seed), std::move(c)});
  }
  const double t = since(t0);
  report(5, mismatches == 0 && t < 60.0,
         fmt("50 corpora x 16 metrics, %g mismatches, largest corpus %g records", mismatches,
             static_cast<double>(largest)),
         t);
}

std::uint64_t mass(const SparseHistogram& h) {
  std::uint64_t m = 0;
  for (const auto& [s, n] : h.bins()) m += static_cast<std::uint64_t>(s) * n;
  return m;
}

void criterion_6() {
  const auto t0 = Clock::now();
  int bad = 0;
  for (const auto& [name, c] : corpora) {
    auto h = [&](MetricKind k) { return compute_distribution(c, k).histogram; };
    const std::uint64_t posts = c.posts().size(), comments = c.comments().size(),
                        resolved = c.resolved().size();
    const bool ok = mass(h(MetricKind::posts_per_account)) == posts &&
                    h(MetricKind::post_share_by_performance).total_weight() == posts &&
                    mass(h(MetricKind::comments_per_account)) == comments &&
                    h(MetricKind::comment_mass_by_commenter_performance).total_weight() == comments &&
                    mass(h(MetricKind::comments_per_commented_post)) == resolved &&
                    h(MetricKind::comment_mass_by_post_aggregation).total_weight() == resolved &&
                    mass(h(MetricKind::comments_received_per_post_author)) == resolved &&
                    h(MetricKind::comment_mass_by_author_aggregation).total_weight() == resolved;
    if (!ok) {
      ++bad;
      std::printf("  identity broken on %s\n", name.c_str());
    }
  }
  report(6, bad == 0, fmt("%g corpora checked, %g violations", static_cast<double>(corpora.size()), bad),
         since(t0));
}

void criterion_7() {
  const auto t0 = Clock::now();
  bool ok = true;
  // Hand fixture: delays {-5, -5, 10}.
  const Corpus fixture = build_corpus({{1, 1, 100}, {2, 1, 200}, {3, 1, 300}},
                                     {{4, 2, 95, 1}, {5, 2, 195, 2}, {6, 2, 310, 3}});
  const auto f = negative_delay_stats(fixture);
  ok = ok && f.histogram.total_weight() == 2 && f.median_by_population == -5;

  synth::SynthConfig cfg;
  cfg.seed = 77;
  cfg.n_accounts = 3000;
  cfg.comment_rate = 1.0;
  cfg.negative_delay_probability = 0.1;
  cfg.write_message_refs = false;
  const auto g = synth::generate(cfg);
  const Corpus c = build_corpus(g.posts, g.comments);
  const auto delays = compute_distribution(c, MetricKind::first_comment_delay);
  const auto neg = negative_subset(delays);
  const auto& truth = g.truth.negative_delays;
  const std::int64_t hand_median = truth[(truth.size() + 1) / 2 - 1];
  ok = ok && delays.negative_count == truth.size() && neg.histogram.total_weight() == truth.size() &&
       neg.median_by_population == hand_median && neg.min_support == truth.front();
  report(7, ok,
         fmt("%g injected, %g counted, median %g (hand %g)", static_cast<double>(truth.size()),
             static_cast<double>(delays.negative_count),
             static_cast<double>(neg.median_by_population.value_or(0)), static_cast<double>(hand_median)),
         since(t0));
  corpora.push_back({"negative-delays", build_corpus(g.posts, g.comments)});
}

void criterion_8() {
  const auto t0 = Clock::now();
  const auto corpus = big_corpus_dir / "corpus";
  std::string reports[2];
  int codes[2];
  const char* threads[2] = {"1", "8"};
  for (int i = 0; i < 2; ++i) {
    const auto out = big_corpus_dir / (std::string("threads_") + threads[i]);
    std::ostringstream so, se;
    codes[i] = cli::run({"analyze", "--posts", (corpus / "posts.tsv").string(), "--comments",
                         (corpus / "comments.tsv").string(), "--out", out.string(), "--threads", threads[i]},
                        so, se);
    reports[i] = testutil::read_file(out / "report.json");
  }
  const bool ok = codes[0] == 0 && codes[1] == 0 && !reports[0].empty() && reports[0] == reports[1];
  report(8, ok, fmt("report sizes %g and %g bytes, identical: ", static_cast<double>(reports[0].size()),
                    static_cast<double>(reports[1].size())) +
                    (reports[0] == reports[1] ? "yes" : "no"),
         since(t0));
}

void criterion_9() {
  const auto t0 = Clock::now();
  int bad = 0;
  for (const auto& [name, c] : corpora) {
    auto check = [&](const auto& records, MetricKind kind) {
      std::map<AccountId, std::vector<UnixSeconds>> times;
      for (const auto& r : records) times[r.author_id].push_back(r.created);
      std::uint64_t pool = 0, zeros = 0;
      for (auto& [a, t] : times) {
        std::sort(t.begin(), t.end());
        pool += t.size() - 1;
        for (std::size_t i = 1; i < t.size(); ++i) zeros += t[i] == t[i - 1];
      }
      const auto d = compute_distribution(c, kind);
      return d.histogram.total_weight() == pool && d.zero_count == zeros;
    };
    if (!check(c.posts(), MetricKind::post_interevent) || !check(c.comments(), MetricKind::comment_interevent)) {
      ++bad;
      std::printf("  interval identity broken on %s\n", name.c_str());
    }
  }
  report(9, bad == 0, fmt("%g corpora checked, %g violations", static_cast<double>(corpora.size()), bad),
         since(t0));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
