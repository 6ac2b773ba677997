#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "memstab/profiles.hpp"

namespace memstab {

/// One DMPD value for an unordered solution pair on one test.
/// Stored with sol_i < sol_j.
struct PairwiseDistanceRecord {
  std::string problem_id;
  std::string test_id;
  std::string sol_i;
  std::string sol_j;
  double dmpd = 0.0;

  friend bool operator==(const PairwiseDistanceRecord&,
                         const PairwiseDistanceRecord&) = default;
};

/// A pair or group that produced no record, with the reason.
struct SkipEntry {
  std::string problem_id;
  std::string test_id;
  std::string sol_i;  // empty for group-level warnings
  std::string sol_j;
  std::string reason;
};

struct PairwiseTable {
  std::vector<PairwiseDistanceRecord> records;
  std::vector<SkipEntry> skipped;
};

struct ProblemScore {
  std::string problem_id;
  double d_p = 0.0;
  std::size_t n_pairs = 0;  // distinct unordered pairs evaluated
  std::size_t n_tests = 0;  // distinct tests evaluated
  std::size_t weight = 0;   // DMPD entries evaluated
};

struct ModelScore {
  double mis_macro = 0.0;
  double mis_micro = 0.0;
  std::size_t n_problems = 0;
};

/// Orders records by (problem_id, test_id, sol_i, sol_j, dmpd).
bool record_less(const PairwiseDistanceRecord& a, const PairwiseDistanceRecord& b);

/// DMPD for every unordered solution pair within each (problem, test) group.
///
/// Groups are computed in parallel on up to `workers` threads (0 picks the
/// hardware concurrency); output order is independent of scheduling.
/// Throws kValidation if a group contains the same solution twice.
PairwiseTable pairwise_table(std::span<const MonotonicPeakProfile> mpps,
                             unsigned workers = 0);

/// D_p as the mean of each problem's entries; problems without entries are
/// absent. Output sorted by problem_id.
std::vector<ProblemScore> problem_scores(std::span<const PairwiseDistanceRecord> records);

/// MIS_macro (unweighted mean of D_p) and MIS_micro (weighted by entry count).
/// Throws kNoData when no problem has weight > 0.
ModelScore model_score(std::span<const ProblemScore> scores);

/// Per (problem, solution) mean of every DMPD entry the solution takes part
/// in, across tests and partners. Keyed by (problem_id, solution_id).
std::map<std::pair<std::string, std::string>, double> solution_dmpd_means(
    std::span<const PairwiseDistanceRecord> records);


}  // namespace memstab
