#include "pubdyn/histogram.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "pubdyn/error.hpp"

namespace pubdyn {

SparseHistogram SparseHistogram::from_values(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  SparseHistogram h;
  for (std::int64_t v : values) {
    if (h.bins_.empty() || h.bins_.back().first != v) {
      h.bins_.emplace_back(v, 1);
    } else {
      ++h.bins_.back().second;
    }
  }
  h.total_ = values.size();
  return h;
}

SparseHistogram SparseHistogram::from_bins(std::vector<Bin> bins) {
  std::sort(bins.begin(), bins.end(),
            [](const Bin& x, const Bin& y) { return x.first < y.first; });
  SparseHistogram h;
  for (const auto& [support, count] : bins) {
    if (count == 0) continue;
    if (h.bins_.empty() || h.bins_.back().first != support) {
      h.bins_.emplace_back(support, count);
    } else {
      h.bins_.back().second += count;
    }
    h.total_ += count;
  }
  return h;
}

void SparseHistogram::add(std::int64_t support, std::uint64_t count) {
  if (count == 0) return;
  auto it = std::lower_bound(bins_.begin(), bins_.end(), support,
                             [](const Bin& b, std::int64_t s) { return b.first < s; });
  if (it != bins_.end() && it->first == support) {
    it->second += count;
  } else {
    bins_.insert(it, {support, count});
  }
  total_ += count;
}

std::uint64_t SparseHistogram::count_at(std::int64_t support) const {
  auto it = std::lower_bound(bins_.begin(), bins_.end(), support,
                             [](const Bin& b, std::int64_t s) { return b.first < s; });
  return it != bins_.end() && it->first == support ? it->second : 0;
}

std::optional<std::int64_t> SparseHistogram::min_support() const {
  if (bins_.empty()) return std::nullopt;
  return bins_.front().first;
}

std::optional<std::int64_t> SparseHistogram::max_support() const {
  if (bins_.empty()) return std::nullopt;
  return bins_.back().first;
}

SparseHistogram SparseHistogram::mass_weighted() const {
  SparseHistogram h;
  for (const auto& [support, count] : bins_) {
    if (support < 0) {
      throw DomainError("mass weighting needs non-negative support, got " + std::to_string(support));
    }
    if (support == 0) continue;
    const auto mass = static_cast<std::uint64_t>(support) * count;
    h.bins_.emplace_back(support, mass);
    h.total_ += mass;
  }
  return h;
}

SparseHistogram SparseHistogram::restricted(std::int64_t lo, std::int64_t hi) const {
  SparseHistogram h;
  for (const auto& bin : bins_) {
    if (bin.first < lo || bin.first > hi) continue;
    h.bins_.push_back(bin);
    h.total_ += bin.second;
  }
  return h;
}

CumulativeCurve cumulative(const SparseHistogram& histogram) {
  CumulativeCurve curve;
  curve.support.reserve(histogram.bins().size());
  curve.cumulative_fraction.reserve(histogram.bins().size());
  const auto total = static_cast<double>(histogram.total_weight());
  std::uint64_t running = 0;
  for (const auto& [support, count] : histogram.bins()) {
    running += count;
    curve.support.push_back(support);
    curve.cumulative_fraction.push_back(static_cast<double>(running) / total);
  }
  return curve;
}

std::optional<std::int64_t> median_by_population(const SparseHistogram& histogram) {
  if (histogram.empty()) return std::nullopt;
  const std::uint64_t total = histogram.total_weight();
  std::uint64_t running = 0;
  for (const auto& [support, count] : histogram.bins()) {
    running += count;
    if (2 * running >= total) return support;
  }
  return histogram.bins().back().first;
}

std::optional<std::int64_t> median_by_mass(const SparseHistogram& histogram) {
  if (histogram.empty() || *histogram.min_support() < 0) return std::nullopt;
  const SparseHistogram mass = histogram.mass_weighted();
  if (mass.total_weight() == 0) return std::nullopt;
  return median_by_population(mass);
}

std::optional<std::int64_t> mode(const SparseHistogram& histogram) {
  if (histogram.empty()) return std::nullopt;
  const auto& bins = histogram.bins();
  auto best = bins.begin();
  for (auto it = bins.begin(); it != bins.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

SparseHistogram merge(const std::vector<SparseHistogram>& parts) {
  // k-way merge over (support, part index, position).
  using Cursor = std::pair<std::int64_t, std::pair<std::size_t, std::size_t>>;
  std::priority_queue<Cursor, std::vector<Cursor>, std::greater<>> heap;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!parts[p].empty()) heap.push({parts[p].bins()[0].first, {p, 0}});
  }
  std::vector<SparseHistogram::Bin> bins;
  while (!heap.empty()) {
    auto [support, where] = heap.top();
    heap.pop();
    const auto [p, i] = where;
    const std::uint64_t count = parts[p].bins()[i].second;
    if (!bins.empty() && bins.back().first == support) {
      bins.back().second += count;
    } else {
      bins.emplace_back(support, count);
    }
    if (i + 1 < parts[p].bins().size()) heap.push({parts[p].bins()[i + 1].first, {p, i + 1}});
  }
  return SparseHistogram::from_bins(std::move(bins));
}

}  // namespace pubdyn
