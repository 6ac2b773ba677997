#include "memstab/alignment.hpp"

#include <random>

#include <gtest/gtest.h>

#include "memstab/error.hpp"
#include "oracles/oracles.hpp"

namespace memstab {
namespace {

MonotonicPeakProfile profile(std::vector<double> values) {
  MonotonicPeakProfile mpp;
  mpp.peak = values.back();
  mpp.values = std::move(values);
  return mpp;
}

TEST(DtwAlign, IdenticalSequences) {
  const std::vector<double> a{0, 1};
  const auto r = dtw_align(a, a);
  EXPECT_EQ(r.total_cost, 0.0);
  EXPECT_EQ(r.dmpd, 0.0);
  EXPECT_EQ(r.path_length, 2u);
}

TEST(DtwAlign, WorkedExamplesMatchPathEnumeration) {
  const std::vector<double> a{0, 1};
  const std::vector<double> b{0, 0.5, 1};
  const auto r = dtw_align(a, b);
  const auto brute = oracles::brute_force_dtw(a, b);
  EXPECT_EQ(brute.cost, 0.5);
  EXPECT_EQ(brute.lengths, (std::set<std::size_t>{3}));
  EXPECT_EQ(r.total_cost, brute.cost);
  EXPECT_EQ(r.path_length, 3u);
  EXPECT_NEAR(r.dmpd, 1.0 / 6.0, 1e-12);

  const std::vector<double> z{0, 0, 0};
  const std::vector<double> up{0, 1};
  const auto r2 = dtw_align(z, up);
  const auto brute2 = oracles::brute_force_dtw(z, up);
  EXPECT_EQ(brute2.cost, 1.0);
  // Two optimal paths; the diagonal-first backtrack takes the shorter one.
  EXPECT_EQ(brute2.lengths, (std::set<std::size_t>{3, 4}));
  EXPECT_EQ(r2.total_cost, 1.0);
  EXPECT_EQ(r2.path_length, 3u);
  EXPECT_NEAR(r2.dmpd, 1.0 / 3.0, 1e-12);
}

TEST(DtwAlign, EmptyIsDegenerate) {
  const std::vector<double> a{0, 1};
  try {
    dtw_align(a, std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateProfile);
  }
}

TEST(DtwAlign, PathIsValidAndLengthBounded) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 25);
  std::uniform_real_distribution<double> val(0, 1);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    const auto r = dtw_align(a, b);
    ASSERT_EQ(r.path.front(), std::make_pair(std::size_t{0}, std::size_t{0}));
    ASSERT_EQ(r.path.back(), std::make_pair(a.size() - 1, b.size() - 1));
    double cost = 0.0;
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      const auto [i, j] = r.path[k];
      cost += std::abs(a[i] - b[j]);
      if (k == 0) continue;
      const auto di = i - r.path[k - 1].first;
      const auto dj = j - r.path[k - 1].second;
      ASSERT_TRUE((di == 1 && dj == 1) || (di == 1 && dj == 0) || (di == 0 && dj == 1));
    }
    ASSERT_NEAR(cost, r.total_cost, 1e-9);
    ASSERT_GE(r.path_length, std::max(a.size(), b.size()));
    ASSERT_LE(r.path_length, a.size() + b.size() - 1);
    ASSERT_EQ(r.dmpd, r.total_cost / static_cast<double>(r.path_length));
  }
}

TEST(DtwAlign, TieBreakPrefersDiagonal) {
  // All-zero sequences: every path costs 0, the diagonal-first walk is the
  // shortest possible one.
  const std::vector<double> a(4, 0.0);
  const std::vector<double> b(6, 0.0);
  EXPECT_EQ(dtw_align(a, b).path_length, 6u);
}

TEST(DtwAlign, TotalCostMatchesEnumerationOnRandomShortPairs) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 7);
  std::uniform_int_distribution<int> level(0, 8);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& x : a) x = level(rng) / 8.0;
    for (auto& x : b) x = level(rng) / 8.0;
    const auto r = dtw_align(a, b);
    const auto brute = oracles::brute_force_dtw(a, b);
    ASSERT_EQ(r.total_cost, brute.cost);
    ASSERT_TRUE(brute.lengths.contains(r.path_length));
  }
}

TEST(Dmpd, IdentityAndScaleInvariance) {
  const auto pa = profile({0, 50, 50, 100});
  const auto pb = profile({0, 100, 100, 200});
  EXPECT_EQ(dmpd(pa, pa), 0.0);
  EXPECT_EQ(dmpd(pa, pb), 0.0);
}

TEST(Dmpd, WorkedShape) {
  EXPECT_NEAR(dmpd(profile({0, 10}), profile({0, 5, 10})), 1.0 / 6.0, 1e-12);
}

TEST(Dmpd, LengthOneIsDegenerate) {
  try {
    dmpd(profile({0}), profile({0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateProfile);
  }
}

TEST(Dmpd, SymmetricAndBounded) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_int_distribution<Bytes> val(0, 5000);
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<Bytes> sa(len(rng)), sb(len(rng));
    for (auto& x : sa) x = val(rng);
    for (auto& x : sb) x = val(rng);
    const auto pa = to_mpp(sa, 0);
    const auto pb = to_mpp(sb, 0);
    const auto ab = dtw_align(unit_peak(pa), unit_peak(pb));
    const auto ba = dtw_align(unit_peak(pb), unit_peak(pa));
    ASSERT_EQ(ab.path_length, ba.path_length);
    ASSERT_LE(std::abs(ab.dmpd - ba.dmpd), 1e-12);
    ASSERT_GE(ab.dmpd, 0.0);
    ASSERT_LE(ab.dmpd, 1.0);
  }
}

TEST(NormalizedPeakDifference, Examples) {
  EXPECT_EQ(normalized_peak_difference(profile({0, 100}), profile({0, 100})), 0.0);
  EXPECT_EQ(normalized_peak_difference(profile({0, 100}), profile({0, 200})), 0.5);
  EXPECT_EQ(normalized_peak_difference(profile({0, 200}), profile({0, 100})), 0.5);
  EXPECT_EQ(normalized_peak_difference(profile({0, 0}), profile({0, 0})), 0.0);
  EXPECT_EQ(normalized_peak_difference(profile({0, 0}), profile({0, 7})), 1.0);
}

}  // namespace
}  // namespace memstab
