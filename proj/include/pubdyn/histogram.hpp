#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pubdyn {

/// Exact frequency map over integer support values, stored as bins sorted by
/// support. Every stored bin has count >= 1.
class SparseHistogram {
 public:
  using Bin = std::pair<std::int64_t, std::uint64_t>;

  SparseHistogram() = default;

  static SparseHistogram from_values(std::vector<std::int64_t> values);
  /// Bins in any order; duplicates are summed and zero counts dropped.
  static SparseHistogram from_bins(std::vector<Bin> bins);

  void add(std::int64_t support, std::uint64_t count = 1);

  const std::vector<Bin>& bins() const { return bins_; }
  std::uint64_t total_weight() const { return total_; }
  std::uint64_t count_at(std::int64_t support) const;
  bool empty() const { return bins_.empty(); }
  std::optional<std::int64_t> min_support() const;
  std::optional<std::int64_t> max_support() const;

  /// Bin s carries s * count. Negative support throws DomainError; support 0
  /// carries no mass and disappears.
  SparseHistogram mass_weighted() const;
  /// Bins with lo <= support <= hi.
  SparseHistogram restricted(std::int64_t lo, std::int64_t hi) const;

  friend bool operator==(const SparseHistogram&, const SparseHistogram&) = default;

 private:
  std::vector<Bin> bins_;
  std::uint64_t total_ = 0;
};

struct CumulativeCurve {
  std::vector<std::int64_t> support;
  std::vector<double> cumulative_fraction;

  friend bool operator==(const CumulativeCurve&, const CumulativeCurve&) = default;
};

CumulativeCurve cumulative(const SparseHistogram& histogram);

/// Smallest support whose cumulative count reaches half the total.
std::optional<std::int64_t> median_by_population(const SparseHistogram& histogram);

/// Smallest s with sum_{s' <= s} s' * count(s') >= half the total mass.
/// Absent for empty histograms, negative support, or zero total mass.
std::optional<std::int64_t> median_by_mass(const SparseHistogram& histogram);

/// Support with the largest count; ties go to the smallest support.
std::optional<std::int64_t> mode(const SparseHistogram& histogram);

/// Merges sorted bin lists, summing counts of equal supports.
SparseHistogram merge(const std::vector<SparseHistogram>& parts);

}  // namespace pubdyn
