#include "pubdyn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "pubdyn/analysis.hpp"
#include "pubdyn/error.hpp"
#include "pubdyn/fitkit.hpp"
#include "pubdyn/report.hpp"
#include "pubdyn/synth.hpp"

namespace pubdyn::cli {

namespace {

std::optional<fitkit::Interval> interval_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto [lo, hi] = parse_range(text);
  return fitkit::Interval{lo, hi};
}

struct AnalyzeArgs {
  std::string posts, comments, config, out;
  bool posts_only = false, comments_only = false;
  std::string exclude_region, fit_interval, format;
  std::optional<int> threads;
};

struct FitArgs {
  std::string histogram, out, exclude_region, fit_interval;
};

struct SynthArgs {
  std::string config, out, format = "tsv";
  std::optional<std::uint64_t> seed;
};

struct VerifyArgs {
  std::string report, truth;
  double tolerance = 0.10;
};

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  AnalyzeOptions options;
  if (!a.config.empty()) options = analyze_options_from(KeyValueConfig::read_file(a.config));
  if (a.posts_only) options.posts_only = true;
  if (a.comments_only) options.comments_only = true;
  if (auto r = interval_flag(a.exclude_region)) options.exclude_region = r;
  if (auto r = interval_flag(a.fit_interval)) options.fit_interval = r;
  if (a.threads) options.threads = *a.threads;
  if (!a.format.empty()) options.delimiter = delimiter_for(a.format);

  AnalyzePaths paths;
  if (!a.posts.empty()) paths.posts = a.posts;
  if (!a.comments.empty()) paths.comments = a.comments;
  paths.out_dir = a.out;
  const AnalysisReport report = run_analyze(paths, options);
  out << "analyzed " << report.summary.n_posts << " posts and " << report.summary.n_comments
      << " comments into " << a.out << '\n';
  if (report.fit_error) out << "fit skipped: " << *report.fit_error << '\n';
  return kExitSuccess;
}

int do_fit(const FitArgs& a, std::ostream& out) {
  std::ifstream in(a.histogram, std::ios::binary);
  if (!in) throw IoError("cannot open " + a.histogram);
  const auto samples = read_histogram_csv(in);
  fitkit::AnomalyOptions options;
  options.fit.interval = interval_flag(a.fit_interval);
  options.fit.exclude = interval_flag(a.exclude_region);
  const auto analysis = fitkit::analyze_anomaly(samples, options);
  nlohmann::json j;
  j["fit"] = to_json(analysis.fit);
  j["fit"]["refits"] = analysis.refits;
  j["anomaly"] = to_json(analysis.anomaly);
  const std::string text = canonical_dump(j) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw IoError("cannot write " + a.out);
    f << text;
  }
  return kExitSuccess;
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  KeyValueConfig kv;
  if (!a.config.empty()) kv = KeyValueConfig::read_file(a.config);
  synth::SynthConfig config = synth::config_from(kv);
  if (a.seed) config.seed = *a.seed;
  const auto corpus = synth::generate(config);
  synth::write_corpus(corpus, a.out, delimiter_for(a.format));
  out << "wrote " << corpus.posts.size() << " posts and " << corpus.comments.size()
      << " comments to " << a.out << '\n';
  return kExitSuccess;
}

nlohmann::json read_json(const std::string& path) {
  const std::string text = ingest::read_all(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const auto report = read_json(a.report);
  const auto truth = synth::truth_from_json(read_json(a.truth));
  synth::VerifyOptions options;
  options.bump_tolerance = a.tolerance;
  bool all = true;
  for (const auto& c : synth::verify_against_ground_truth(report, truth, options)) {
    all = all && c.passed;
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) out << " expected=" << c.expected << " actual=" << c.actual;
    out << '\n';
  }
  return all ? kExitSuccess : kExitVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Publishing dynamics analysis for post and comment logs", "pubdyn"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Compute summary, distributions, fit and report");
  a->add_option("--posts", analyze.posts, "Posts table");
  a->add_option("--comments", analyze.comments, "Comments table");
  a->add_option("--config", analyze.config, "key=value configuration file");
  a->add_option("--out", analyze.out, "Output directory")->required();
  auto* po = a->add_flag("--posts-only", analyze.posts_only, "Analyze posts without comments");
  auto* co = a->add_flag("--comments-only", analyze.comments_only, "Analyze comments without posts");
  po->excludes(co);
  a->add_option("--exclude-region", analyze.exclude_region, "Support range LO:HI left out of the fit");
  a->add_option("--fit-interval", analyze.fit_interval, "Support range LO:HI to fit");
  a->add_option("--threads", analyze.threads, "Worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  a->add_option("--format", analyze.format, "Input delimiter")->check(CLI::IsMember({"tsv", "csv"}));

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit the performance model to a support,count CSV");
  f->add_option("--histogram", fit.histogram, "support,count CSV")->required();
  f->add_option("--out", fit.out, "Output JSON file (default stdout)");
  f->add_option("--exclude-region", fit.exclude_region, "Support range LO:HI left out of the fit");
  f->add_option("--fit-interval", fit.fit_interval, "Support range LO:HI to fit");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  s->add_option("--config", synth.config, "key=value configuration file");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.seed, "Override the configured seed");
  s->add_option("--format", synth.format, "Output delimiter")->check(CLI::IsMember({"tsv", "csv"}));

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a report against synthetic ground truth");
  v->add_option("--report", verify.report, "report.json")->required();
  v->add_option("--truth", verify.truth, "ground_truth.json")->required();
  v->add_option("--bump-tolerance", verify.tolerance, "Relative tolerance for the bump estimate");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (*a) return do_analyze(analyze, out);
    if (*f) return do_fit(fit, out);
    if (*s) return do_synth(synth, out);
    if (*v) return do_verify(verify, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fitkit::FitError& e) {
    err << "fit failed: " << e.what() << '\n';
    return kExitFit;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIngest;
  }
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pubdyn::cli
