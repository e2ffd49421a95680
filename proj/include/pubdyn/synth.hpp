#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pubdyn/fitkit.hpp"
#include "pubdyn/histogram.hpp"
#include "pubdyn/ingest.hpp"
#include "pubdyn/intern.hpp"
#include "pubdyn/kvconfig.hpp"
#include "pubdyn/records.hpp"

namespace pubdyn::synth {

/// Lognormal component given by its median and log-scale sigma.
struct Lognormal {
  double weight = 1.0;
  double median_seconds = 1.0;
  double sigma = 1.0;
};

struct AnomalyBump {
  fitkit::Interval region;
  std::uint64_t extra_accounts = 0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint64_t n_accounts = 1000;
  fitkit::FitModel performance_model = fitkit::reference_model();
  std::int64_t max_performance = 245;  // per-account post counts lie in [1, max_performance]
  std::optional<AnomalyBump> bump;
  ingest::TimeWindow window{1356998401, 1370131869};
  std::vector<Lognormal> interevent{{1.0, 43703.0, 1.5}};
  double comment_rate = 0.25;  // expected comments per post
  double self_comment_probability = 0.3;
  double reply_probability = 0.1;  // comment answers an earlier comment
  double negative_delay_probability = 0.0;
  Lognormal first_comment_delay{1.0, 3076.0, 2.0};
  bool noise = true;  // false: counts apportioned exactly to the model
  bool write_message_refs = true;
};

/// Throws ConfigError for invalid or infeasible settings.
void validate(const SynthConfig& config);

/// Keys: seed, n_accounts, model_a, model_b, model_p, model_c, model_q,
/// max_performance, bump_region (LO:HI), bump_accounts, window_start,
/// window_end, interevent (weight:median:sigma, comma separated),
/// comment_rate, self_comment_probability, reply_probability,
/// negative_delay_probability, first_comment_median, first_comment_sigma,
/// noise, write_message_refs.
SynthConfig config_from(const KeyValueConfig& kv);

/// Everything the generator sampled, for checking analysis output against.
struct GroundTruth {
  std::uint64_t seed = 0;
  std::uint64_t n_accounts = 0;
  std::uint64_t n_model_accounts = 0;
  std::optional<AnomalyBump> bump;
  std::uint64_t n_posts = 0;
  std::map<AccountId, std::uint64_t> posts_per_account;
  std::uint64_t post_interval_pool = 0;  // sum over accounts of (posts - 1)
  std::uint64_t n_comments = 0;
  std::uint64_t n_commented_posts = 0;
  std::uint64_t n_commenters = 0;
  std::uint64_t n_replies = 0;  // comments whose parent is a comment
  std::uint64_t n_self_comments = 0;
  std::map<std::uint64_t, std::uint64_t> comments_per_post;  // comment count -> posts
  std::uint64_t comment_interval_pool = 0;
  std::vector<std::int64_t> negative_delays;  // ascending

  SparseHistogram posts_per_account_histogram() const;
};

nlohmann::json to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& j);

struct SynthCorpus {
  std::vector<PostRecord> posts;        // ordered by (created, message_id)
  std::vector<CommentRecord> comments;  // ordered by (created, message_id)
  InternTable accounts;
  InternTable messages;  // empty unless write_message_refs
  GroundTruth truth;
};

SynthCorpus generate(const SynthConfig& config);

/// posts.tsv, comments.tsv, accounts.tsv, messages.tsv (optional) and
/// ground_truth.json under `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir,
                  char delimiter = '\t');

struct Check {
  std::string name;
  bool passed = false;
  std::string expected;
  std::string actual;
};

struct VerifyOptions {
  double bump_tolerance = 0.10;  // relative
};

/// Compares a JSON analysis report with the generator's ground truth.
/// Failures are listed, never thrown.
std::vector<Check> verify_against_ground_truth(const nlohmann::json& report,
                                               const GroundTruth& truth,
                                               const VerifyOptions& options = {});

}  // namespace pubdyn::synth
