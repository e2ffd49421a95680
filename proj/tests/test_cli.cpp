#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "pubdyn/cli.hpp"
#include "pubdyn/fitkit.hpp"
#include "test_util.hpp"

using namespace pubdyn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path synth_corpus(const std::string& name, const std::string& extra = "") {
  const auto dir = testutil::scratch(name);
  testutil::write_file(dir / "synth.cfg", "seed=3\nn_accounts=400\ncomment_rate=1.5\n" + extra);
  const auto r = run({"synth", "--config", (dir / "synth.cfg").string(), "--out", (dir / "corpus").string()});
  REQUIRE(r.code == 0);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"analyze"}).code == cli::kExitUsage);
  CHECK(run({"analyze", "--out", "x", "--posts-only", "--comments-only"}).code == cli::kExitUsage);
  CHECK(run({"analyze", "--out", "x", "--threads", "-2"}).code == cli::kExitUsage);
  CHECK(run({"analyze", "--out", "x", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("synthetic corpus analyzes and verifies") {
  const auto dir = synth_corpus("cli_full", "negative_delay_probability=0.05\n");
  const auto c = dir / "corpus";
  const auto out = dir / "report";
  auto r = run({"analyze", "--posts", (c / "posts.tsv").string(), "--comments", (c / "comments.tsv").string(),
                "--out", out.string(), "--threads", "2"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "posts_per_account.csv"));
  CHECK(fs::exists(out / "comment_interevent.csv"));
  CHECK(fs::exists(out / "posts.quarantine.tsv"));
  CHECK(fs::exists(out / "comments.quarantine.tsv"));
  r = run({"verify", "--report", (out / "report.json").string(), "--truth", (c / "ground_truth.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("posts only needs no comments file") {
  const auto dir = synth_corpus("cli_posts_only");
  const auto out = dir / "report";
  const auto r = run({"analyze", "--posts", (dir / "corpus" / "posts.tsv").string(), "--posts-only", "--out",
                      out.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(testutil::read_file(out / "report.json"));
  CHECK(j["distributions"].size() == 3);
  CHECK(j["distributions"].contains("posts_per_account"));
  CHECK(j["distributions"].contains("post_share_by_performance"));
  CHECK(j["distributions"].contains("post_interevent"));
  CHECK_FALSE(fs::exists(out / "comments_per_account.csv"));
}

TEST_CASE("comments only") {
  const auto dir = synth_corpus("cli_comments_only");
  const auto r = run({"analyze", "--comments", (dir / "corpus" / "comments.tsv").string(), "--comments-only",
                      "--out", (dir / "report").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(testutil::read_file(dir / "report" / "report.json"));
  CHECK(j["distributions"].size() == 3);
  CHECK(j["fit"].is_null());
}

TEST_CASE("empty posts file exits 2 with an empty corpus diagnostic") {
  const auto dir = testutil::scratch("cli_empty");
  testutil::write_file(dir / "posts.tsv", "");
  testutil::write_file(dir / "comments.tsv", "");
  const auto r = run({"analyze", "--posts", (dir / "posts.tsv").string(), "--comments",
                      (dir / "comments.tsv").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kExitIngest);
  CHECK(r.err.find("empty corpus") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("missing input exits 2") {
  const auto dir = testutil::scratch("cli_missing");
  const auto r = run({"analyze", "--posts", (dir / "nope.tsv").string(), "--posts-only", "--out",
                      (dir / "out").string()});
  CHECK(r.code == cli::kExitIngest);
}

TEST_CASE("analyze honours the config file and csv format") {
  const auto dir = testutil::scratch("cli_config");
  testutil::write_file(dir / "posts.csv", "1,1,1,100\n2,2,1,160\n3,3,2,100\n");
  testutil::write_file(dir / "a.cfg", "posts_only=true\nformat=csv\n");
  const auto r = run({"analyze", "--posts", (dir / "posts.csv").string(), "--config", (dir / "a.cfg").string(),
                      "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(testutil::read_file(dir / "out" / "report.json"));
  CHECK(j["summary"]["n_posts"] == 3);
  CHECK(j["fit"].is_null());
  CHECK(j["fit_error"].is_string());
  testutil::write_file(dir / "bad.cfg", "unknown_key=1\n");
  CHECK(run({"analyze", "--posts", (dir / "posts.csv").string(), "--config", (dir / "bad.cfg").string(),
             "--out", (dir / "out").string()})
            .code == cli::kExitUsage);
}

TEST_CASE("fit on a tabulated reference curve") {
  const auto dir = testutil::scratch("cli_fit");
  std::string csv = "support,count\n";
  char line[64];
  for (int s = 1; s <= 245; ++s) {
    std::snprintf(line, sizeof line, "%d,%.17g\n", s, fitkit::evaluate_model(fitkit::reference_model(), s));
    csv += line;
  }
  testutil::write_file(dir / "h.csv", csv);
  auto r = run({"fit", "--histogram", (dir / "h.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto ref = fitkit::reference_model();
  CHECK(std::abs(j["fit"]["model"]["a"].get<double>() / ref.a - 1) < 1e-3);
  CHECK(std::abs(j["fit"]["model"]["p"].get<double>() / ref.p - 1) < 1e-3);
  CHECK(j["anomaly"]["region"].is_null());

  std::string bumped = "support,count\n";
  for (int s = 1; s <= 245; ++s) {
    const double extra = s >= 85 && s <= 160 ? 800.0 : 0.0;
    std::snprintf(line, sizeof line, "%d,%.17g\n", s, fitkit::evaluate_model(ref, s) + extra);
    bumped += line;
  }
  testutil::write_file(dir / "b.csv", bumped);
  r = run({"fit", "--histogram", (dir / "b.csv").string(), "--out", (dir / "fit.json").string()});
  REQUIRE(r.code == 0);
  const auto b = nlohmann::json::parse(testutil::read_file(dir / "fit.json"));
  CHECK(b["anomaly"]["region"].is_array());
  CHECK(b["anomaly"]["excess_estimate"].get<double>() > 0);
}

TEST_CASE("fit failures") {
  const auto dir = testutil::scratch("cli_fit_bad");
  testutil::write_file(dir / "bad.csv", "support,count\n1,x\n");
  CHECK(run({"fit", "--histogram", (dir / "bad.csv").string()}).code != 0);
  testutil::write_file(dir / "few.csv", "1,10\n2,5\n3,2\n");
  CHECK(run({"fit", "--histogram", (dir / "few.csv").string()}).code == cli::kExitFit);
}

TEST_CASE("synth is reproducible and rejects infeasible windows") {
  const auto a = synth_corpus("cli_synth_a", "bump_region=85:160\nbump_accounts=20\n");
  const auto b = synth_corpus("cli_synth_b", "bump_region=85:160\nbump_accounts=20\n");
  CHECK(testutil::read_file(a / "corpus" / "posts.tsv") == testutil::read_file(b / "corpus" / "posts.tsv"));
  const auto truth = nlohmann::json::parse(testutil::read_file(a / "corpus" / "ground_truth.json"));
  CHECK(truth["bump"]["extra_accounts"] == 20);

  const auto dir = testutil::scratch("cli_synth_bad");
  testutil::write_file(dir / "s.cfg", "window_start=0\nwindow_end=10\n");
  CHECK(run({"synth", "--config", (dir / "s.cfg").string(), "--out", (dir / "c").string()}).code != 0);
}

TEST_CASE("verify reports a corrupted report") {
  const auto dir = synth_corpus("cli_verify_bad");
  const auto c = dir / "corpus";
  REQUIRE(run({"analyze", "--posts", (c / "posts.tsv").string(), "--comments", (c / "comments.tsv").string(),
               "--out", (dir / "r").string()})
              .code == 0);
  auto j = nlohmann::json::parse(testutil::read_file(dir / "r" / "report.json"));
  j["summary"]["n_comments"] = 0;
  testutil::write_file(dir / "r" / "bad.json", j.dump());
  const auto r = run({"verify", "--report", (dir / "r" / "bad.json").string(), "--truth",
                      (c / "ground_truth.json").string()});
  CHECK(r.code == cli::kExitVerifyFailed);
  CHECK(r.out.find("FAIL n_comments") != std::string::npos);
}
