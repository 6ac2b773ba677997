#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "memstab/profiles.hpp"

namespace memstab {

/// Outcome of an unconstrained DTW alignment with L1 local cost.
///
/// `path` holds the recovered optimal warping path as 0-based (i, j) cells,
/// from (0, 0) to (n-1, m-1). `path_length` counts aligned point-pairs.
struct AlignmentResult {
  double total_cost = 0.0;
  std::size_t path_length = 0;
  double dmpd = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Full-matrix DTW. Backtracking from (n, m) prefers the diagonal
/// predecessor, then (i-1, j), then (i, j-1), comparing stored costs
/// exactly.
///
/// Throws Error(kDegenerateProfile) if either sequence is empty.
AlignmentResult dtw_align(std::span<const double> a, std::span<const double> b);
AlignmentResult dtw_align(const UnitPeakProfile& a, const UnitPeakProfile& b);

/// Mean L1 alignment cost per aligned pair between the unit-peak shapes of
/// two profiles; lies in [0, 1]. Profiles shorter than two samples carry
/// no shape and raise kDegenerateProfile.
double dmpd(const MonotonicPeakProfile& pa, const MonotonicPeakProfile& pb);

/// |peak_a - peak_b| / max(peak_a, peak_b), 0 when both peaks are 0.
double normalized_peak_difference(const MonotonicPeakProfile& pa,
                                  const MonotonicPeakProfile& pb);

}  // namespace memstab
