#include <doctest.h>

#include <algorithm>
#include <set>

#include "pubdyn/analysis.hpp"
#include "pubdyn/error.hpp"
#include "pubdyn/metrics.hpp"
#include "pubdyn/report.hpp"
#include "pubdyn/synth.hpp"
#include "test_util.hpp"

using namespace pubdyn;
using namespace pubdyn::synth;

namespace {

SynthConfig small(std::uint64_t seed = 1) {
  SynthConfig c;
  c.seed = seed;
  c.n_accounts = 200;
  c.comment_rate = 1.0;
  return c;
}

nlohmann::json report_for(const SynthCorpus& g) {
  const Corpus c = build_corpus(g.posts, g.comments);
  return to_json(analyze(c, AnalyzeOptions{}));
}

}  // namespace

TEST_CASE("same seed gives byte-identical files") {
  const auto a = testutil::scratch("synth_a");
  const auto b = testutil::scratch("synth_b");
  write_corpus(generate(small(3)), a);
  write_corpus(generate(small(3)), b);
  for (const char* f : {"posts.tsv", "comments.tsv", "accounts.tsv", "messages.tsv", "ground_truth.json"}) {
    CHECK(testutil::read_file(a / f) == testutil::read_file(b / f));
  }
  CHECK(generate(small(4)).posts != generate(small(3)).posts);
}

TEST_CASE("one hundred accounts give one hundred distinct authors") {
  SynthConfig c = small();
  c.n_accounts = 100;
  const auto g = generate(c);
  std::set<AccountId> authors;
  for (const auto& p : g.posts) authors.insert(p.author_id);
  CHECK(authors.size() == 100);
  CHECK(g.accounts.size() == 100);
}

TEST_CASE("generated files ingest back to the same records") {
  const auto dir = testutil::scratch("synth_roundtrip");
  const auto g = generate(small(5));
  write_corpus(g, dir);
  ingest::Format strict;
  strict.strict = true;
  CHECK(ingest::parse_posts_file(dir / "posts.tsv", strict).records == g.posts);
  CHECK(ingest::parse_comments_file(dir / "comments.tsv", strict).records == g.comments);
  const auto accounts = InternTable::read_file(dir / "accounts.tsv");
  CHECK(accounts.entries() == g.accounts.entries());
  const auto messages = InternTable::read_file(dir / "messages.tsv");
  CHECK(messages.size() == g.posts.size() + g.comments.size());
  CHECK(truth_from_json(nlohmann::json::parse(testutil::read_file(dir / "ground_truth.json"))).n_posts ==
        g.truth.n_posts);
}

TEST_CASE("ground truth round trips through json") {
  SynthConfig c = small(6);
  c.bump = AnomalyBump{{10, 20}, 30};
  c.negative_delay_probability = 0.2;
  const auto t = generate(c).truth;
  const auto back = truth_from_json(to_json(t));
  CHECK(to_json(back) == to_json(t));
  CHECK_THROWS_AS(truth_from_json(nlohmann::json::object()), SchemaError);
}

TEST_CASE("noise-free generation passes every exact check") {
  SynthConfig c = small(7);
  c.noise = false;
  c.negative_delay_probability = 0.1;
  const auto g = generate(c);
  const auto checks = verify_against_ground_truth(report_for(g), g.truth);
  CHECK(checks.size() >= 10);
  for (const auto& k : checks) {
    CAPTURE(k.name);
    CHECK(k.passed);
  }
}

TEST_CASE("noise-free apportionment follows the model exactly") {
  SynthConfig c;
  c.n_accounts = 100000;
  c.noise = false;
  c.comment_rate = 0;
  c.write_message_refs = false;
  const auto g = generate(c);
  const auto h = g.truth.posts_per_account_histogram();
  double total = 0;
  for (std::int64_t s = 1; s <= 245; ++s) total += fitkit::evaluate_model(c.performance_model, s);
  for (const auto& [s, n] : h.bins()) {
    const double want = 100000.0 * fitkit::evaluate_model(c.performance_model, s) / total;
    CHECK(std::abs(static_cast<double>(n) - want) < 1.0);
  }
  CHECK(h.total_weight() == 100000);
}

TEST_CASE("bump adds exactly the requested accounts in its region") {
  SynthConfig c = small(8);
  c.n_accounts = 20000;
  c.comment_rate = 0;
  c.write_message_refs = false;
  c.noise = false;
  const auto plain = generate(c).truth.posts_per_account_histogram();
  c.bump = AnomalyBump{{85, 160}, 1000};
  const auto bumped = generate(c);
  CHECK(bumped.truth.n_accounts == 21000);
  CHECK(bumped.truth.n_model_accounts == 20000);
  const auto h = bumped.truth.posts_per_account_histogram();
  CHECK(h.restricted(85, 160).total_weight() - plain.restricted(85, 160).total_weight() == 1000);
  CHECK(h.restricted(1, 84) == plain.restricted(1, 84));
}

TEST_CASE("interevent median converges to the target") {
  SynthConfig c;
  c.n_accounts = 50000;
  c.max_performance = 20;
  c.comment_rate = 0;
  c.write_message_refs = false;
  c.interevent = {{1.0, 3600.0, 1.0}};
  const auto g = generate(c);
  const Corpus corpus = build_corpus(g.posts, {});
  const auto d = compute_distribution(corpus, MetricKind::post_interevent);
  REQUIRE(d.histogram.total_weight() >= 100000);
  CHECK(std::abs(static_cast<double>(*d.median_by_population) - 3600.0) <= 0.05 * 3600.0);
}

TEST_CASE("corrupted report fails the matching checks") {
  const auto g = generate(small(9));
  auto r = report_for(g);
  r["summary"]["n_posts"] = g.truth.n_posts + 1;
  r["distributions"]["comment_interevent"]["total_weight"] = 0;
  for (const auto& k : verify_against_ground_truth(r, g.truth)) {
    CAPTURE(k.name);
    CHECK(k.passed == (k.name != "n_posts" && k.name != "comment_interval_pool"));
  }
}

TEST_CASE("invalid and infeasible configurations") {
  SynthConfig c = small();
  c.n_accounts = 0;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small();
  c.self_comment_probability = 1.5;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small();
  c.window = {100, 100};
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small();
  c.window = {0, 100};  // 101 seconds cannot hold 245 posts
  CHECK_THROWS_AS(generate(c), ConfigError);
  c.max_performance = 50;
  CHECK_NOTHROW(generate(c));
  c.bump = AnomalyBump{{90, 200}, 5};
  CHECK_THROWS_AS(generate(c), ConfigError);
}

TEST_CASE("config keys map onto the generator settings") {
  const auto kv = KeyValueConfig::parse(
      "seed=9\nn_accounts=50\nbump_region=85:160\nbump_accounts=12\ninterevent=0.5:60:1,0.5:3600:2\n"
      "noise=false\nwrite_message_refs=no\nmodel_a=1000\n");
  const auto c = config_from(kv);
  CHECK(c.seed == 9);
  CHECK(c.n_accounts == 50);
  CHECK(c.bump->region == fitkit::Interval{85, 160});
  CHECK(c.bump->extra_accounts == 12);
  CHECK(c.interevent.size() == 2);
  CHECK(c.interevent[1].median_seconds == 3600.0);
  CHECK_FALSE(c.noise);
  CHECK_FALSE(c.write_message_refs);
  CHECK(c.performance_model.a == 1000.0);
  CHECK_THROWS_AS(config_from(KeyValueConfig::parse("bogus=1\n")), ConfigError);
  CHECK_THROWS_AS(config_from(KeyValueConfig::parse("interevent=1:2\n")), ConfigError);
}

TEST_CASE("negative delays are recorded in the ground truth") {
  SynthConfig c = small(10);
  c.negative_delay_probability = 0.5;
  const auto g = generate(c);
  CHECK_FALSE(g.truth.negative_delays.empty());
  CHECK(std::is_sorted(g.truth.negative_delays.begin(), g.truth.negative_delays.end()));
  for (auto d : g.truth.negative_delays) CHECK(d < 0);
}
