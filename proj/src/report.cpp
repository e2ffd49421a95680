#include "pubdyn/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pubdyn/error.hpp"

namespace pubdyn {

namespace {

void dump(const nlohmann::json& j, std::string& out, int indent) {
  using value_t = nlohmann::json::value_t;
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann's default object type is a std::map, so items are sorted.
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += nlohmann::json(key).dump();
        out += ": ";
        dump(value, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) out += "\n" + pad;
        dump(v, out, indent + 2);
      }
      if (!flat) out += "\n" + close;
      out += "]";
      return;
    }
    case value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json interval(const fitkit::Interval& i) { return {i.lo, i.hi}; }

}  // namespace

std::string canonical_dump(const nlohmann::json& j) {
  std::string out;
  dump(j, out, 0);
  return out;
}

nlohmann::json to_json(const SummaryStats& s) {
  return {
      {"first_time", opt(s.first_time)},
      {"last_time", opt(s.last_time)},
      {"span_days", opt(s.span_days)},
      {"first_comment_time", opt(s.first_comment_time)},
      {"last_comment_time", opt(s.last_comment_time)},
      {"comment_span_days", opt(s.comment_span_days)},
      {"n_posts", s.n_posts},
      {"n_post_accounts", s.n_post_accounts},
      {"n_comments", s.n_comments},
      {"n_commenters", s.n_commenters},
      {"n_commented_posts", s.n_commented_posts},
      {"n_commented_post_authors", s.n_commented_post_authors},
      {"n_resolved_comments", s.n_resolved_comments},
      {"n_unresolved_comments", s.n_unresolved_comments},
      {"mean_post_performance", opt(s.mean_post_performance)},
      {"mean_comment_performance", opt(s.mean_comment_performance)},
      {"mean_comments_per_commented_post", opt(s.mean_comments_per_commented_post)},
      {"mean_comments_per_commented_author", opt(s.mean_comments_per_commented_author)},
  };
}

nlohmann::json to_json(const ingest::IngestReport& r) {
  return {{"rows_read", r.rows_read},
          {"rows_accepted", r.rows_accepted},
          {"rows_quarantined", r.rows_quarantined},
          {"quarantine_reasons", r.quarantine_reasons}};
}

nlohmann::json to_json(const DistributionResult& d) {
  nlohmann::json j = {
      {"kind", std::string(to_string(d.kind))},
      {"unit", support_unit(d.kind) == SupportUnit::count ? "count" : "seconds"},
      {"total_weight", d.histogram.total_weight()},
      {"bins", d.histogram.bins().size()},
      {"median_by_population", opt(d.median_by_population)},
      {"median_by_mass", opt(d.median_by_mass)},
      {"max_support", opt(d.max_support)},
      {"min_support", opt(d.min_support)},
      {"mode", opt(mode(d.histogram))},
      {"zero_count", d.zero_count},
      {"negative_count", d.negative_count},
  };
  if (support_unit(d.kind) == SupportUnit::count) {
    auto& h = j["histogram"] = nlohmann::json::array();
    for (const auto& [s, n] : d.histogram.bins()) h.push_back({s, n});
  }
  return j;
}

nlohmann::json to_json(const fitkit::FitModel& m) {
  return {{"a", m.a}, {"b", m.b}, {"p", m.p}, {"c", m.c}, {"q", m.q}};
}

nlohmann::json to_json(const fitkit::FitResult& f) {
  const auto& d = f.diagnostics;
  return {{"model", to_json(f.model)},
          {"diagnostics",
           {{"max_relative_error", d.max_relative_error},
            {"interval", interval(d.interval)},
            {"excluded_region", d.excluded_region ? interval(*d.excluded_region) : nullptr},
            {"bins_used", d.bins_used},
            {"iterations", d.iterations},
            {"cost", d.cost}}}};
}

nlohmann::json to_json(const fitkit::AnomalyReport& a) {
  nlohmann::json residuals = nlohmann::json::array();
  for (const auto& [s, r] : a.residuals) residuals.push_back({s, r});
  return {{"region", a.region ? interval(*a.region) : nullptr},
          {"excess_estimate", a.excess_estimate},
          {"lower_bound", a.lower_bound},
          {"upper_bound", a.upper_bound},
          {"residuals", residuals}};
}

nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["schema"] = "pubdyn.report/1";
  j["summary"] = to_json(r.summary);
  j["ingest"] = {{"posts", r.post_ingest ? to_json(*r.post_ingest) : nullptr},
                 {"comments", r.comment_ingest ? to_json(*r.comment_ingest) : nullptr}};
  j["unresolved_comments"] = r.unresolved;
  auto& dist = j["distributions"] = nlohmann::json::object();
  for (const auto& d : r.distributions) dist[std::string(to_string(d.kind))] = to_json(d);
  j["negative_delays"] = r.negative_delays ? to_json(*r.negative_delays) : nullptr;
  if (r.anomaly) {
    j["fit"] = to_json(r.anomaly->fit);
    j["fit"]["refits"] = r.anomaly->refits;
    j["anomaly"] = to_json(r.anomaly->anomaly);
  } else {
    j["fit"] = nullptr;
    j["anomaly"] = nullptr;
  }
  j["fit_error"] = opt(r.fit_error);
  auto& c = j["conclusions"] = nlohmann::json::object();
  for (const auto& [name, value] : r.conclusions) c[name] = opt(value);
  return j;
}

void write_distribution_csv(std::ostream& out, const DistributionResult& d) {
  out << "support,count,cumulative_fraction\n";
  const auto& bins = d.histogram.bins();
  const auto& cum = d.cumulative.cumulative_fraction;
  char buf[40];
  for (std::size_t i = 0; i < bins.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", i < cum.size() ? cum[i] : 0.0);
    out << bins[i].first << ',' << bins[i].second << ',' << buf << '\n';
  }
}

void write_residuals_csv(std::ostream& out, const std::vector<fitkit::ResidualPoint>& points) {
  out << "support,observed,model,residual,relative\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(p.support), p.observed, p.model, p.residual, p.relative);
    out << buf;
  }
}

std::vector<fitkit::Sample> read_histogram_csv(std::istream& in) {
  std::vector<fitkit::Sample> samples;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char lead = line.front();
    const bool numeric = (lead >= '0' && lead <= '9') || lead == '-' || lead == '+';
    if (line_number == 1 && !numeric) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw SchemaError("histogram line " + std::to_string(line_number) + ": expected support,count");
    }
    fitkit::Sample s;
    const char* b = line.data();
    auto [p, ec] = std::from_chars(b, b + comma, s.support);
    if (ec != std::errc() || p != b + comma) {
      throw SchemaError("histogram line " + std::to_string(line_number) + ": bad support");
    }
    const auto next = line.find(',', comma + 1);
    const std::string rest =
        line.substr(comma + 1, next == std::string::npos ? std::string::npos : next - comma - 1);
    char* end = nullptr;
    s.value = std::strtod(rest.c_str(), &end);
    if (rest.empty() || end != rest.c_str() + rest.size() || !std::isfinite(s.value) || s.value < 0) {
      throw SchemaError("histogram line " + std::to_string(line_number) + ": bad count");
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw SchemaError("histogram has no rows");
  return samples;
}

}  // namespace pubdyn
