#include "memstab/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "memstab/error.hpp"

namespace memstab {

AlignmentResult dtw_align(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kDegenerateProfile,
                fmt::format("dtw_align: empty profile (n={}, m={})", a.size(), b.size()));
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t cols = m + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // cost[(i, j)] = D(i, j) with the 1-based boundary row/column at index 0.
  std::vector<double> cost((n + 1) * cols, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return cost[i * cols + j]; };
  at(0, 0) = 0.0;

  for (std::size_t i = 1; i <= n; ++i) {
    const double ai = a[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
      at(i, j) = std::abs(ai - b[j - 1]) + best;
    }
  }

  AlignmentResult result;
  result.total_cost = at(n, m);

  std::size_t i = n;
  std::size_t j = m;
  result.path.emplace_back(i - 1, j - 1);
  while (i > 1 || j > 1) {
    const double diag = at(i - 1, j - 1);
    const double up = at(i - 1, j);
    const double left = at(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    result.path.emplace_back(i - 1, j - 1);
  }
  std::reverse(result.path.begin(), result.path.end());

  result.path_length = result.path.size();
  result.dmpd = result.total_cost / static_cast<double>(result.path_length);
  return result;
}

AlignmentResult dtw_align(const UnitPeakProfile& a, const UnitPeakProfile& b) {
  return dtw_align(std::span<const double>(a.values), std::span<const double>(b.values));
}

double dmpd(const MonotonicPeakProfile& pa, const MonotonicPeakProfile& pb) {
  if (pa.size() < 2 || pb.size() < 2) {
    throw Error(ErrorCode::kDegenerateProfile,
                fmt::format("dmpd: profile too short (n={}, m={})", pa.size(), pb.size()));
  }
  return dtw_align(unit_peak(pa), unit_peak(pb)).dmpd;
}

double normalized_peak_difference(const MonotonicPeakProfile& pa,
                                  const MonotonicPeakProfile& pb) {
  const double hi = std::max(pa.peak, pb.peak);
  if (hi <= 0.0) return 0.0;
  return std::abs(pa.peak - pb.peak) / hi;
}

}  // namespace memstab
