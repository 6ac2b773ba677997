#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "memstab/aggregation.hpp"
#include "memstab/profiles.hpp"

namespace memstab {

struct NMVConfig {
  std::int64_t p_min = 102400;  // 100 KiB
  bool clip_to_unit = false;
  double tau = 1.0;  // reserved; the per-solution mean does not use it
};

struct NMVRecord {
  std::string problem_id;
  std::string solution_id;
  std::string test_id;
  double max_vel = 0.0;
  double median_peak = 0.0;
  double nmv = 0.0;
  bool eligible = false;
};

struct NMVTable {
  std::vector<NMVRecord> records;  // sorted by (problem, test, solution)
  std::vector<SkipEntry> skipped;
};

struct NMVSolutionMean {
  std::string problem_id;
  std::string solution_id;
  double mean_nmv = 0.0;
  std::size_t n_tests = 0;  // eligible tests averaged
};

/// Largest forward difference of the profile. Throws kDegenerateProfile for
/// fewer than two samples.
double max_velocity(const MonotonicPeakProfile& mpp);

/// Median with the mean-of-central-pair rule for even counts.
/// Throws kNoPassingSolutions on an empty collection.
double median_peak(std::span<const double> peaks);

/// NMV = max_vel / median peak of the (problem, test) group. Groups whose
/// median peak is 0 are skipped; so are profiles shorter than two samples,
/// although their peak still counts toward the group median.
NMVTable nmv_records(std::span<const MonotonicPeakProfile> mpps, const NMVConfig& config);

/// Mean NMV over each solution's eligible tests; solutions without any
/// eligible test are absent. Sorted by (problem_id, solution_id).
std::vector<NMVSolutionMean> nmv_solution_mean(std::span<const NMVRecord> records);

}  // namespace memstab
