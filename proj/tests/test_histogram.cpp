#include <doctest.h>

#include <random>

#include "pubdyn/error.hpp"
#include "pubdyn/histogram.hpp"

using namespace pubdyn;

TEST_CASE("population and mass medians") {
  const auto h = SparseHistogram::from_bins({{1, 3}, {2, 1}});
  CHECK(median_by_population(h) == 1);
  CHECK(median_by_mass(h) == 1);
  const auto single = SparseHistogram::from_bins({{5, 1}});
  CHECK(median_by_population(single) == 5);
  CHECK(median_by_mass(single) == 5);
  CHECK(median_by_population(SparseHistogram{}) == std::nullopt);
  CHECK(median_by_mass(SparseHistogram{}) == std::nullopt);
}

TEST_CASE("median ties go to the smallest support") {
  const auto h = SparseHistogram::from_bins({{1, 1}, {2, 1}});
  CHECK(median_by_population(h) == 1);
  CHECK(median_by_mass(SparseHistogram::from_bins({{1, 2}, {2, 1}})) == 1);
}

TEST_CASE("mass median is absent for negative support or zero mass") {
  CHECK(median_by_mass(SparseHistogram::from_values({-1, 2})) == std::nullopt);
  CHECK(median_by_mass(SparseHistogram::from_values({0, 0})) == std::nullopt);
  CHECK_THROWS_AS(SparseHistogram::from_values({-1}).mass_weighted(), DomainError);
}

TEST_CASE("construction merges bins and drops empty ones") {
  const auto h = SparseHistogram::from_bins({{3, 1}, {1, 0}, {3, 2}, {-2, 1}});
  CHECK(h.bins() == std::vector<SparseHistogram::Bin>{{-2, 1}, {3, 3}});
  CHECK(h.total_weight() == 4);
  CHECK(h.min_support() == -2);
  CHECK(h.max_support() == 3);
  CHECK(h == SparseHistogram::from_values({3, -2, 3, 3}));
}

TEST_CASE("mass weighting drops the zero bin") {
  const auto m = SparseHistogram::from_bins({{0, 5}, {2, 3}, {4, 1}}).mass_weighted();
  CHECK(m.bins() == std::vector<SparseHistogram::Bin>{{2, 6}, {4, 4}});
}

TEST_CASE("cumulative curve is monotone and ends at one") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> v;
    const int n = 1 + static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) v.push_back(static_cast<std::int64_t>(rng() % 40) - 10);
    const auto h = SparseHistogram::from_values(v);
    const auto c = cumulative(h);
    CHECK(c.support.size() == h.bins().size());
    for (std::size_t i = 1; i < c.cumulative_fraction.size(); ++i) {
      CHECK(c.cumulative_fraction[i] >= c.cumulative_fraction[i - 1]);
    }
    CHECK(c.cumulative_fraction.back() == 1.0);
    const auto m = *median_by_population(h);
    std::uint64_t at_or_below = 0, below = 0;
    for (auto x : v) {
      at_or_below += x <= m;
      below += x < m;
    }
    CHECK(2 * at_or_below >= v.size());
    CHECK(2 * below < v.size());
  }
}

TEST_CASE("merge equals building from the concatenation") {
  std::mt19937_64 rng(8);
  std::vector<SparseHistogram> parts;
  std::vector<std::int64_t> all;
  for (int p = 0; p < 7; ++p) {
    std::vector<std::int64_t> v;
    for (int i = 0; i < 100; ++i) v.push_back(static_cast<std::int64_t>(rng() % 50));
    all.insert(all.end(), v.begin(), v.end());
    parts.push_back(SparseHistogram::from_values(v));
  }
  parts.emplace_back();
  CHECK(merge(parts) == SparseHistogram::from_values(all));
}

TEST_CASE("restriction, lookup and mode") {
  const auto h = SparseHistogram::from_values({1, 2, 2, 3, 3, 7});
  CHECK(h.restricted(2, 3).total_weight() == 4);
  CHECK(h.count_at(3) == 2);
  CHECK(h.count_at(4) == 0);
  CHECK(mode(h) == 2);
  CHECK(mode(SparseHistogram{}) == std::nullopt);
  auto g = h;
  g.add(7, 5);
  CHECK(mode(g) == 7);
}
