#include "pubdyn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "pubdyn/error.hpp"
#include "pubdyn/histogram.hpp"

namespace pubdyn::synth {

namespace {

/// std::mt19937_64 is bit-exact across standard libraries; the distribution
/// transforms below are written out so the draws are too.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Box-Muller; the second variate is discarded to keep the stream simple.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double lognormal(const Lognormal& l) { return l.median_seconds * std::exp(l.sigma * normal()); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
      const double x = std::round(mean + std::sqrt(mean) * normal());
      return x < 0 ? 0 : static_cast<std::uint64_t>(x);
    }
    // Knuth: multiply uniforms until the product drops below e^-mean.
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

double mixture_draw(Random& rng, const std::vector<Lognormal>& mix, double total_weight) {
  double u = rng.uniform() * total_weight;
  for (const auto& c : mix) {
    if (u < c.weight) return rng.lognormal(c);
    u -= c.weight;
  }
  return rng.lognormal(mix.back());
}

/// Per-account post counts drawn from the model restricted to [1, max].
std::vector<std::int64_t> model_counts(Random& rng, const SynthConfig& config) {
  const auto max = config.max_performance;
  std::vector<double> weight(static_cast<std::size_t>(max));
  for (std::int64_t s = 1; s <= max; ++s) {
    weight[s - 1] = fitkit::evaluate_model(config.performance_model, static_cast<double>(s));
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<std::int64_t> counts;
  counts.reserve(config.n_accounts);

  if (config.noise) {
    std::vector<double> cdf(weight.size());
    std::partial_sum(weight.begin(), weight.end(), cdf.begin());
    for (std::uint64_t i = 0; i < config.n_accounts; ++i) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      counts.push_back(static_cast<std::int64_t>(it - cdf.begin()) + 1);
    }
    return counts;
  }

  // Largest-remainder apportionment of n_accounts over the model weights.
  const auto n = static_cast<double>(config.n_accounts);
  std::vector<std::uint64_t> quota(weight.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const double exact = n * weight[i] / total;
    quota[i] = static_cast<std::uint64_t>(std::floor(exact));
    assigned += quota[i];
    remainder.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < config.n_accounts; ++k, ++assigned) {
    ++quota[remainder[k % remainder.size()].second];
  }
  for (std::size_t i = 0; i < quota.size(); ++i) {
    counts.insert(counts.end(), quota[i], static_cast<std::int64_t>(i) + 1);
  }
  return counts;
}

std::string account_url(std::uint64_t k) { return "https://social.example/u/" + std::to_string(k); }
std::string message_url(std::uint64_t id) {
  return "https://social.example/m/" + std::to_string(id);
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.n_accounts < 1) throw ConfigError("n_accounts must be >= 1");
  if (!fitkit::is_valid(c.performance_model)) throw ConfigError("performance model is invalid");
  if (c.max_performance < 1) throw ConfigError("max_performance must be >= 1");
  if (c.window.end <= c.window.start) throw ConfigError("time window is empty");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob(c.self_comment_probability, "self_comment_probability");
  prob(c.reply_probability, "reply_probability");
  prob(c.negative_delay_probability, "negative_delay_probability");
  if (!(c.comment_rate >= 0.0)) throw ConfigError("comment_rate must be >= 0");
  if (c.interevent.empty()) throw ConfigError("interevent mixture is empty");
  for (const auto& l : c.interevent) {
    if (!(l.weight > 0 && l.median_seconds > 0 && l.sigma >= 0)) {
      throw ConfigError("interevent components need weight > 0, median > 0, sigma >= 0");
    }
  }
  if (!(c.first_comment_delay.median_seconds > 0 && c.first_comment_delay.sigma >= 0)) {
    throw ConfigError("first comment delay needs median > 0 and sigma >= 0");
  }
  std::int64_t busiest = c.max_performance;
  if (c.bump) {
    if (c.bump->region.lo < 1 || c.bump->region.hi < c.bump->region.lo) {
      throw ConfigError("bump region must satisfy 1 <= LO <= HI");
    }
    busiest = std::max(busiest, c.bump->region.hi);
  }
  // Posts of one account need not have distinct timestamps, but an account
  // cannot publish faster than one post per second on average.
  if (c.window.end - c.window.start + 1 < busiest) {
    throw ConfigError("infeasible: window of " + std::to_string(c.window.end - c.window.start + 1) +
                      " s cannot hold " + std::to_string(busiest) +
                      " posts per account at 1-second resolution");
  }
}

SynthConfig config_from(const KeyValueConfig& kv) {
  kv.require_known({"seed", "n_accounts", "model_a", "model_b", "model_p", "model_c", "model_q",
                    "max_performance", "bump_region", "bump_accounts", "window_start",
                    "window_end", "interevent", "comment_rate", "self_comment_probability",
                    "reply_probability", "negative_delay_probability", "first_comment_median",
                    "first_comment_sigma", "noise", "write_message_refs"});
  SynthConfig c;
  c.seed = kv.get_uint("seed").value_or(c.seed);
  c.n_accounts = kv.get_uint("n_accounts").value_or(c.n_accounts);
  c.performance_model.a = kv.get_double("model_a").value_or(c.performance_model.a);
  c.performance_model.b = kv.get_double("model_b").value_or(c.performance_model.b);
  c.performance_model.p = kv.get_double("model_p").value_or(c.performance_model.p);
  c.performance_model.c = kv.get_double("model_c").value_or(c.performance_model.c);
  c.performance_model.q = kv.get_double("model_q").value_or(c.performance_model.q);
  c.max_performance = kv.get_int("max_performance").value_or(c.max_performance);
  if (auto r = kv.get_range("bump_region")) {
    c.bump = AnomalyBump{{r->first, r->second}, kv.get_uint("bump_accounts").value_or(0)};
  } else if (kv.has("bump_accounts")) {
    throw ConfigError("bump_accounts given without bump_region");
  }
  c.window.start = kv.get_int("window_start").value_or(c.window.start);
  c.window.end = kv.get_int("window_end").value_or(c.window.end);
  if (auto mix = kv.get("interevent")) {
    c.interevent.clear();
    std::stringstream ss(*mix);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Lognormal l;
      char c1 = 0, c2 = 0;
      std::istringstream is(item);
      if (!(is >> l.weight >> c1 >> l.median_seconds >> c2 >> l.sigma) || c1 != ':' || c2 != ':') {
        throw ConfigError("interevent component '" + item + "' must be weight:median:sigma");
      }
      c.interevent.push_back(l);
    }
  }
  c.comment_rate = kv.get_double("comment_rate").value_or(c.comment_rate);
  c.self_comment_probability =
      kv.get_double("self_comment_probability").value_or(c.self_comment_probability);
  c.reply_probability = kv.get_double("reply_probability").value_or(c.reply_probability);
  c.negative_delay_probability =
      kv.get_double("negative_delay_probability").value_or(c.negative_delay_probability);
  c.first_comment_delay.median_seconds =
      kv.get_double("first_comment_median").value_or(c.first_comment_delay.median_seconds);
  c.first_comment_delay.sigma =
      kv.get_double("first_comment_sigma").value_or(c.first_comment_delay.sigma);
  c.noise = kv.get_bool("noise").value_or(c.noise);
  c.write_message_refs = kv.get_bool("write_message_refs").value_or(c.write_message_refs);
  return c;
}

SparseHistogram GroundTruth::posts_per_account_histogram() const {
  std::vector<SparseHistogram::Bin> bins;
  for (const auto& [account, n] : posts_per_account) {
    bins.emplace_back(static_cast<std::int64_t>(n), 1);
  }
  return SparseHistogram::from_bins(std::move(bins));
}

SynthCorpus generate(const SynthConfig& config) {
  validate(config);
  Random rng(config.seed);
  SynthCorpus out;
  GroundTruth& truth = out.truth;
  truth.seed = config.seed;
  truth.bump = config.bump;

  // Performance per account, model accounts first, then the bump.
  std::vector<std::int64_t> counts = model_counts(rng, config);
  truth.n_model_accounts = counts.size();
  if (config.bump) {
    const auto& region = config.bump->region;
    for (std::uint64_t j = 0; j < config.bump->extra_accounts; ++j) {
      const auto width = static_cast<std::uint64_t>(region.length());
      const std::uint64_t offset = config.noise ? rng.below(width) : j % width;
      counts.push_back(region.lo + static_cast<std::int64_t>(offset));
    }
  }
  rng.shuffle(counts);
  truth.n_accounts = counts.size();

  std::vector<AccountId> account_ids(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    account_ids[k] = out.accounts.intern(account_url(k + 1));
  }

  // Post times: k-1 mixture gaps per account, compressed if they overrun
  // the window, placed at a uniform offset and floored to whole seconds.
  const double mix_total = std::accumulate(
      config.interevent.begin(), config.interevent.end(), 0.0,
      [](double acc, const Lognormal& l) { return acc + l.weight; });
  const auto span = static_cast<double>(config.window.end - config.window.start);
  struct PendingPost {
    UnixSeconds created;
    AccountId author;
    std::int64_t seq;
  };
  std::vector<PendingPost> pending;
  std::vector<double> gaps;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const std::int64_t n = counts[k];
    gaps.clear();
    double length = 0.0;
    for (std::int64_t i = 1; i < n; ++i) {
      gaps.push_back(mixture_draw(rng, config.interevent, mix_total));
      length += gaps.back();
    }
    double scale = 1.0;
    if (length > span) {
      scale = span / length;
      length = span;
    }
    double t = static_cast<double>(config.window.start) + rng.uniform() * (span - length);
    for (std::int64_t i = 0; i < n; ++i) {
      if (i > 0) t += gaps[i - 1] * scale;
      const auto created = std::min(static_cast<UnixSeconds>(std::floor(t)), config.window.end);
      pending.push_back({created, account_ids[k], i});
    }
    truth.posts_per_account[account_ids[k]] = static_cast<std::uint64_t>(n);
    truth.post_interval_pool += static_cast<std::uint64_t>(n - 1);
  }
  std::sort(pending.begin(), pending.end(), [](const PendingPost& x, const PendingPost& y) {
    return std::tie(x.created, x.author, x.seq) < std::tie(y.created, y.author, y.seq);
  });
  out.posts.reserve(pending.size());
  MessageId next_id = 1;
  for (const auto& p : pending) out.posts.push_back({next_id++, p.author, p.created});
  truth.n_posts = out.posts.size();

  // Comments, post by post in id order.
  std::set<AccountId> commenters;
  std::map<AccountId, std::uint64_t> comments_by;
  for (const auto& post : out.posts) {
    const std::uint64_t n = rng.poisson(config.comment_rate);
    if (n == 0) continue;
    ++truth.n_commented_posts;
    ++truth.comments_per_post[n];
    const std::size_t first = out.comments.size();
    UnixSeconds t = 0;
    for (std::uint64_t j = 0; j < n; ++j) {
      CommentRecord c;
      c.message_id = next_id++;
      const bool self = rng.bernoulli(config.self_comment_probability);
      c.author_id = self ? post.author_id : account_ids[rng.below(account_ids.size())];
      if (j == 0) {
        const bool negative = rng.bernoulli(config.negative_delay_probability);
        const auto delay = static_cast<UnixSeconds>(std::floor(rng.lognormal(config.first_comment_delay)));
        t = post.created + (negative ? -(delay + 1) : delay);
        if (negative) truth.negative_delays.push_back(t - post.created);
      } else {
        t += static_cast<UnixSeconds>(std::floor(rng.lognormal(config.first_comment_delay)));
      }
      c.created = t;
      c.parent_id = post.message_id;
      if (j > 0 && rng.bernoulli(config.reply_probability)) {
        c.parent_id = out.comments[first + rng.below(j)].message_id;
        ++truth.n_replies;
      }
      if (c.author_id == post.author_id) ++truth.n_self_comments;
      commenters.insert(c.author_id);
      out.comments.push_back(c);
    }
  }
  truth.n_comments = out.comments.size();
  truth.n_commenters = commenters.size();
  truth.comment_interval_pool = truth.n_comments - truth.n_commenters;
  std::sort(truth.negative_delays.begin(), truth.negative_delays.end());

  if (config.write_message_refs) {
    for (const auto& p : out.posts) out.messages.intern(message_url(p.message_id));
    for (const auto& c : out.comments) out.messages.intern(message_url(c.message_id));
  }
  std::sort(out.comments.begin(), out.comments.end(),
            [](const CommentRecord& x, const CommentRecord& y) {
              return std::tie(x.created, x.message_id) < std::tie(y.created, y.message_id);
            });
  return out;
}

nlohmann::json to_json(const GroundTruth& t) {
  nlohmann::json j;
  j["seed"] = t.seed;
  j["n_accounts"] = t.n_accounts;
  j["n_model_accounts"] = t.n_model_accounts;
  if (t.bump) {
    j["bump"] = {{"region", {t.bump->region.lo, t.bump->region.hi}},
                 {"extra_accounts", t.bump->extra_accounts}};
  } else {
    j["bump"] = nullptr;
  }
  j["n_posts"] = t.n_posts;
  auto& per = j["posts_per_account"] = nlohmann::json::array();
  for (const auto& [account, n] : t.posts_per_account) per.push_back({account, n});
  j["post_interval_pool"] = t.post_interval_pool;
  j["n_comments"] = t.n_comments;
  j["n_commented_posts"] = t.n_commented_posts;
  j["n_commenters"] = t.n_commenters;
  j["n_replies"] = t.n_replies;
  j["n_self_comments"] = t.n_self_comments;
  auto& cpp = j["comments_per_post"] = nlohmann::json::array();
  for (const auto& [k, n] : t.comments_per_post) cpp.push_back({k, n});
  j["comment_interval_pool"] = t.comment_interval_pool;
  j["negative_delays"] = t.negative_delays;
  return j;
}

GroundTruth truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.n_accounts = j.at("n_accounts").get<std::uint64_t>();
    t.n_model_accounts = j.at("n_model_accounts").get<std::uint64_t>();
    if (!j.at("bump").is_null()) {
      const auto& b = j.at("bump");
      t.bump = AnomalyBump{{b.at("region").at(0).get<std::int64_t>(),
                            b.at("region").at(1).get<std::int64_t>()},
                           b.at("extra_accounts").get<std::uint64_t>()};
    }
    t.n_posts = j.at("n_posts").get<std::uint64_t>();
    for (const auto& e : j.at("posts_per_account")) {
      t.posts_per_account[e.at(0).get<AccountId>()] = e.at(1).get<std::uint64_t>();
    }
    t.post_interval_pool = j.at("post_interval_pool").get<std::uint64_t>();
    t.n_comments = j.at("n_comments").get<std::uint64_t>();
    t.n_commented_posts = j.at("n_commented_posts").get<std::uint64_t>();
    t.n_commenters = j.at("n_commenters").get<std::uint64_t>();
    t.n_replies = j.at("n_replies").get<std::uint64_t>();
    t.n_self_comments = j.at("n_self_comments").get<std::uint64_t>();
    for (const auto& e : j.at("comments_per_post")) {
      t.comments_per_post[e.at(0).get<std::uint64_t>()] = e.at(1).get<std::uint64_t>();
    }
    t.comment_interval_pool = j.at("comment_interval_pool").get<std::uint64_t>();
    t.negative_delays = j.at("negative_delays").get<std::vector<std::int64_t>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("ground truth: ") + e.what());
  }
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir, char delimiter) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("posts.tsv");
    ingest::write_posts(f, corpus.posts, delimiter);
  }
  {
    auto f = open("comments.tsv");
    ingest::write_comments(f, corpus.comments, delimiter);
  }
  {
    auto f = open("accounts.tsv");
    corpus.accounts.write(f, delimiter);
  }
  if (corpus.messages.size() > 0) {
    auto f = open("messages.tsv");
    corpus.messages.write(f, delimiter);
  }
  {
    auto f = open("ground_truth.json");
    f << to_json(corpus.truth).dump(1) << '\n';
  }
}

namespace {

std::string show(const nlohmann::json& j) { return j.is_null() ? "null" : j.dump(); }

}  // namespace

std::vector<Check> verify_against_ground_truth(const nlohmann::json& report,
                                               const GroundTruth& truth,
                                               const VerifyOptions& options) {
  std::vector<Check> checks;
  auto lookup = [&](std::initializer_list<const char*> path) -> nlohmann::json {
    const nlohmann::json* node = &report;
    for (const char* key : path) {
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
    }
    return *node;
  };
  auto exact = [&](std::string name, const nlohmann::json& expected, const nlohmann::json& actual) {
    checks.push_back({std::move(name), expected == actual, show(expected), show(actual)});
  };

  exact("n_posts", truth.n_posts, lookup({"summary", "n_posts"}));
  exact("n_post_accounts", truth.n_accounts, lookup({"summary", "n_post_accounts"}));
  exact("n_comments", truth.n_comments, lookup({"summary", "n_comments"}));
  exact("n_commenters", truth.n_commenters, lookup({"summary", "n_commenters"}));
  exact("n_commented_posts", truth.n_commented_posts, lookup({"summary", "n_commented_posts"}));

  nlohmann::json per_account = nlohmann::json::array();
  const SparseHistogram truth_histogram = truth.posts_per_account_histogram();
  for (const auto& [s, n] : truth_histogram.bins()) per_account.push_back({s, n});
  exact("posts_per_account_histogram", per_account,
        lookup({"distributions", "posts_per_account", "histogram"}));

  nlohmann::json per_post = nlohmann::json::array();
  for (const auto& [k, n] : truth.comments_per_post) per_post.push_back({k, n});
  exact("comments_per_commented_post_histogram", per_post,
        lookup({"distributions", "comments_per_commented_post", "histogram"}));

  exact("post_interval_pool", truth.post_interval_pool,
        lookup({"distributions", "post_interevent", "total_weight"}));
  exact("comment_interval_pool", truth.comment_interval_pool,
        lookup({"distributions", "comment_interevent", "total_weight"}));
  exact("negative_delay_count", truth.negative_delays.size(),
        lookup({"distributions", "first_comment_delay", "negative_count"}));
  if (!truth.negative_delays.empty()) {
    const auto& d = truth.negative_delays;
    // smallest value whose cumulative count reaches half
    const std::int64_t median = d[(d.size() + 1) / 2 - 1];
    exact("negative_delay_median", median, lookup({"negative_delays", "median_by_population"}));
  }

  if (truth.bump) {
    const double want = static_cast<double>(truth.bump->extra_accounts);
    const nlohmann::json got = lookup({"anomaly", "excess_estimate"});
    const bool ok = got.is_number() &&
                    std::abs(got.get<double>() - want) <= options.bump_tolerance * want;
    checks.push_back({"bump_excess_estimate", ok, show(want), show(got)});
  }
  return checks;
}

}  // namespace pubdyn::synth
