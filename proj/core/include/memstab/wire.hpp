#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "memstab/aggregation.hpp"
#include "memstab/burstiness.hpp"
#include "memstab/profiles.hpp"

namespace memstab::wire {

/// A trace line plus any keys this toolkit does not interpret, kept so a
/// parse/serialize cycle loses nothing.
struct TraceRecord {
  RawTrace trace;
  nlohmann::json extra = nlohmann::json::object();
};

/// Line number (1-based) and message for a line that was skipped.
struct LineWarning {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct ReadResult {
  std::vector<T> items;
  std::vector<LineWarning> warnings;
};

/// Parses one JSONL trace line. Throws Error(kParse) on malformed JSON,
/// missing identity fields or wrongly typed values, and kInvalidTrace when
/// the record violates a RawTrace invariant.
TraceRecord parse_trace(std::string_view line);
nlohmann::json to_json(const TraceRecord& record);
std::string serialize_trace(const TraceRecord& record);

/// Reads a JSONL trace stream; malformed lines become warnings.
ReadResult<TraceRecord> read_traces(std::istream& in);

// MPP store: one JSON object per line with the identity fields, `values`
// and `peak`.
nlohmann::json to_json(const MonotonicPeakProfile& mpp);
MonotonicPeakProfile parse_mpp(std::string_view line);
ReadResult<MonotonicPeakProfile> read_mpp_store(std::istream& in);
void write_mpp_store(std::ostream& out, std::span<const MonotonicPeakProfile> mpps);

// problem_id,test_id,sol_i,sol_j,dmpd
void write_pairwise_csv(std::ostream& out, std::span<const PairwiseDistanceRecord> records);
/// Throws kValidation for a dmpd outside [0, 1] or a pair with sol_i >= sol_j.
std::vector<PairwiseDistanceRecord> read_pairwise_csv(std::istream& in);

// problem_id,d_p,n_pairs,n_tests,weight
void write_scores_csv(std::ostream& out, std::span<const ProblemScore> scores);
// metric,value rows for mis_macro, mis_micro, n_problems
void write_summary_csv(std::ostream& out, const ModelScore& model);

// problem_id,solution_id,test_id,max_vel,median_peak,nmv,eligible
void write_nmv_csv(std::ostream& out, std::span<const NMVRecord> records);
// problem_id,solution_id,mean_nmv,n_tests
void write_nmv_means_csv(std::ostream& out, std::span<const NMVSolutionMean> means);
std::vector<NMVSolutionMean> read_nmv_means_csv(std::istream& in);

struct SEMetricsRow {
  std::string problem_id;
  std::string solution_id;
  double cognitive_complexity = 0.0;
  double cyclomatic_complexity = 0.0;
  double maintainability_index = 0.0;
};

/// Header required: problem_id, solution_id, cognitive_complexity,
/// cyclomatic_complexity, maintainability_index (any column order).
std::vector<SEMetricsRow> read_se_metrics_csv(std::istream& in);

}  // namespace memstab::wire
