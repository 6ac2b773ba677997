#include "memstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "memstab/aggregation.hpp"
#include "memstab/error.hpp"
#include "memstab/summation.hpp"

namespace memstab::stats {

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kNoData, "quantile of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double cliffs_delta(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorCode::kNoData, "cliffs_delta: empty sample");
  }
  std::int64_t greater = 0;
  std::int64_t less = 0;
  for (double xi : x) {
    for (double yj : y) {
      if (xi > yj) ++greater;
      else if (xi < yj) ++less;
    }
  }
  return static_cast<double>(greater - less) /
         (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

namespace {

// Exact null distribution of W+ with (possibly tied) ranks. Ranks are
// doubled so half-ranks stay integral; counts[w] is the number of sign
// assignments with doubled W+ equal to w.
double exact_signed_rank_p(std::span<const double> ranks, double w_plus) {
  std::vector<std::int64_t> doubled;
  std::int64_t total = 0;
  for (double r : ranks) {
    doubled.push_back(std::llround(2.0 * r));
    total += doubled.back();
  }
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  std::int64_t reach = 0;
  for (std::int64_t r : doubled) {
    for (std::int64_t w = reach; w >= 0; --w) {
      counts[static_cast<std::size_t>(w + r)] += counts[static_cast<std::size_t>(w)];
    }
    reach += r;
  }
  const double assignments = std::ldexp(1.0, static_cast<int>(ranks.size()));
  const std::int64_t observed = std::llround(2.0 * w_plus);
  double lower = 0.0;
  double upper = 0.0;
  for (std::int64_t w = 0; w <= total; ++w) {
    if (w <= observed) lower += counts[static_cast<std::size_t>(w)];
    if (w >= observed) upper += counts[static_cast<std::size_t>(w)];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / assignments);
}

}  // namespace

double wilcoxon_signed_rank(std::span<const double> diffs) {
  std::vector<double> nonzero;
  for (double d : diffs) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    throw Error(ErrorCode::kDegenerateTest, "wilcoxon: all differences are zero");
  }
  std::vector<double> magnitudes;
  for (double d : nonzero) magnitudes.push_back(std::abs(d));
  const auto ranks = average_ranks(magnitudes);

  double w_plus = 0.0;
  for (std::size_t k = 0; k < nonzero.size(); ++k) {
    if (nonzero[k] > 0.0) w_plus += ranks[k];
  }

  const auto n = static_cast<double>(nonzero.size());
  if (nonzero.size() <= kWilcoxonExactMax) return exact_signed_rank_p(ranks, w_plus);

  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kValidation,
                fmt::format("correlation: length mismatch {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "correlation needs at least two points");
  }
  const double mx = exact_mean(x);
  const double my = exact_mean(y);
  std::vector<double> sxy;
  std::vector<double> sxx;
  std::vector<double> syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.push_back(dx * dy);
    sxx.push_back(dx * dx);
    syy.push_back(dy * dy);
  }
  const double vx = exact_sum(sxx);
  const double vy = exact_sum(syy);
  if (vx == 0.0 || vy == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "correlation of a constant sequence");
  }
  return std::clamp(exact_sum(sxy) / std::sqrt(vx * vy), -1.0, 1.0);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kValidation,
                fmt::format("correlation: length mismatch {} vs {}", x.size(), y.size()));
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_r(rx, ry);
}

PairedDiffSummary paired_diff_summary(const std::map<std::string, double>& baseline,
                                      const std::map<std::string, double>& variant) {
  std::vector<double> diffs;
  std::vector<double> base_vals;
  std::vector<double> var_vals;
  for (const auto& [problem, base] : baseline) {
    auto it = variant.find(problem);
    if (it == variant.end()) continue;
    diffs.push_back(it->second - base);
    base_vals.push_back(base);
    var_vals.push_back(it->second);
  }
  if (diffs.empty()) {
    throw Error(ErrorCode::kNoData, "paired_diff_summary: no shared problems");
  }
  PairedDiffSummary s;
  s.n = diffs.size();
  s.median_diff = median(diffs);
  s.iqr = std::max(0.0, quantile(diffs, 0.75) - quantile(diffs, 0.25));
  s.cliffs_delta = cliffs_delta(var_vals, base_vals);
  const bool all_zero = std::all_of(diffs.begin(), diffs.end(), [](double d) { return d == 0.0; });
  s.wilcoxon_p = all_zero ? 1.0 : wilcoxon_signed_rank(diffs);
  return s;
}

std::map<std::string, Tertile> tertile_stratify(const std::map<std::string, double>& values) {
  if (values.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                fmt::format("tertiles need at least 3 values, got {}", values.size()));
  }
  std::vector<std::pair<double, std::string>> sorted;
  for (const auto& [id, v] : values) sorted.emplace_back(v, id);
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const std::size_t cut1 = (n + 2) / 3;
  const std::size_t cut2 = (2 * n + 2) / 3;
  std::map<std::string, Tertile> out;
  for (std::size_t k = 0; k < n; ++k) {
    out[sorted[k].second] = k < cut1 ? Tertile::kT1 : (k < cut2 ? Tertile::kT2 : Tertile::kT3);
  }
  return out;
}

}  // namespace memstab::stats
