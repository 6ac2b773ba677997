#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace memstab::stats {

struct PairedDiffSummary {
  double median_diff = 0.0;
  double iqr = 0.0;
  double wilcoxon_p = 1.0;
  double cliffs_delta = 0.0;
  std::size_t n = 0;
};

enum class Tertile { kT1 = 1, kT2 = 2, kT3 = 3 };

/// Linear-interpolation quantile (the "type 7" estimator). p in [0, 1].
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// (#{x > y} - #{x < y}) / (|x| |y|). Throws kNoData on empty input.
double cliffs_delta(std::span<const double> x, std::span<const double> y);

/// Two-sided signed-rank p-value. Zero differences are dropped and tied
/// magnitudes get average ranks. Up to 25 nonzero differences use the exact
/// null distribution; larger samples use the tie-corrected normal
/// approximation with continuity correction.
///
/// Throws kDegenerateTest when every difference is zero.
double wilcoxon_signed_rank(std::span<const double> diffs);

/// Largest sample size handled by the exact branch.
inline constexpr std::size_t kWilcoxonExactMax = 25;

double pearson_r(std::span<const double> x, std::span<const double> y);
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// variant - baseline over the problems present in both maps. When every
/// difference is zero the signed-rank test is undefined and wilcoxon_p is 1.
/// Cliff's delta compares the variant scores against the baseline scores.
PairedDiffSummary paired_diff_summary(const std::map<std::string, double>& baseline,
                                      const std::map<std::string, double>& variant);

/// Sorts by (value, id) and cuts at ceil(n/3) and ceil(2n/3).
/// Throws kInsufficientData for fewer than three values.
std::map<std::string, Tertile> tertile_stratify(const std::map<std::string, double>& values);

}  // namespace memstab::stats
