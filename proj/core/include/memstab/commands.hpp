#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memstab/burstiness.hpp"
#include "memstab/profiles.hpp"
#include "memstab/stats.hpp"

namespace memstab {

/// Machine-readable account of one command invocation. Skips never make a
/// command fail; they are counted here by reason.
struct RunSummary {
  std::string command;
  std::size_t records_in = 0;
  std::size_t records_out = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::vector<std::string> warnings;

  void skip(const std::string& reason, std::string detail = {});
  nlohmann::json to_json() const;
};

struct TransformOptions {
  std::optional<Bytes> quant_bytes;  // overrides each trace's own quant_bytes
  std::int64_t stride = 1;           // extra decimation applied before the transform
  std::optional<std::string> model;
  std::optional<double> temperature;
};

/// JSONL traces -> JSONL MPP store. Non-ok runs and malformed lines are skipped.
RunSummary cmd_transform(std::istream& traces, std::ostream& mpp_out,
                         const TransformOptions& options);

/// MPP store -> pairwise DMPD CSV. `exact`, when given, receives the
/// full-precision records.
RunSummary cmd_dmpd(std::istream& mpp_store, std::ostream& csv_out,
                    nlohmann::json* exact = nullptr, unsigned workers = 0);

/// Pairwise CSV -> per-problem score CSV plus MIS summary CSV.
/// Throws kNoData for an empty table, kValidation for out-of-range rows.
RunSummary cmd_aggregate(std::istream& pairwise_csv, std::ostream& scores_out,
                         std::ostream& summary_out, nlohmann::json* exact = nullptr);

/// MPP store -> NMV record CSV plus per-solution mean CSV.
RunSummary cmd_nmv(std::istream& mpp_store, std::ostream& records_out, std::ostream& means_out,
                   const NMVConfig& config, nlohmann::json* exact = nullptr);

/// One profiling configuration in a sensitivity grid.
struct AblationSetting {
  std::string name;
  SamplingMode mode = SamplingMode::kLine;
  std::int64_t stride = 1;  // line mode
  Bytes quant_bytes = 64;
  double interval_ms = 0.0;  // time mode
  bool baseline = false;
};

/// Baseline (line, s=1, q=64) followed by stride 5/10, q 128/256 and time
/// sampling at 0.1/1/2 ms.
std::vector<AblationSetting> default_ablation_grid();

/// JSON array of {"name", "mode", "stride", "quant_bytes", "interval_ms",
/// "baseline"} objects.
std::vector<AblationSetting> parse_ablation_grid(const nlohmann::json& grid);

struct AblationRow {
  AblationSetting setting;
  double mis_macro = 0.0;
  double mis_micro = 0.0;
  double delta_macro_pct = 0.0;
  double delta_micro_pct = 0.0;
  stats::PairedDiffSummary paired;
  std::size_t n_problems = 0;
  std::map<std::string, double> problem_scores;
};

/// Re-derives profiles from the traces under every setting and compares each
/// setting's D_p against the baseline's.
///
/// A setting uses, per (problem, solution, test), the trace collected in the
/// same mode whose native stride or interval divides the requested one,
/// decimated to match. Throws kConfiguration unless exactly one setting is
/// marked baseline, and kNoData when a setting yields no scores or shares
/// no problem with the baseline.
std::vector<AblationRow> run_ablation(const std::vector<RawTrace>& traces,
                                      const std::vector<AblationSetting>& grid);

RunSummary cmd_ablate(std::istream& traces, const std::vector<AblationSetting>& grid,
                      std::ostream& report_out, nlohmann::json* exact = nullptr);

struct CorrelationRow {
  std::string proxy;  // "dmpd" or "nmv"
  std::string metric_name;
  double rho_spearman = 0.0;
  double r_pearson = 0.0;
  double cliffs_delta_t1_t3 = 0.0;
  std::size_t n = 0;
};

/// Joins per-solution proxy means with SE metrics on (problem_id,
/// solution_id). Undefined statistics are reported as NaN with a warning.
/// Throws kNoData when no proxy joins any SE row.
RunSummary cmd_correlate(std::istream* pairwise_csv, std::istream* nmv_means_csv,
                         std::istream& se_metrics_csv, std::ostream& out,
                         std::vector<CorrelationRow>* rows = nullptr);

struct ReportOptions {
  TransformOptions transform;
  NMVConfig nmv;
  bool exact = false;
  unsigned workers = 0;
};

/// transform -> dmpd -> aggregate -> nmv into `out_dir`, writing mpp.jsonl,
/// pairwise.csv, scores.csv, summary.csv, nmv.csv and nmv_means.csv.
RunSummary cmd_report(const std::filesystem::path& traces,
                      const std::filesystem::path& out_dir, const ReportOptions& options);

}  // namespace memstab
