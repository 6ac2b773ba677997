#include "memstab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "memstab/aggregation.hpp"
#include "memstab/csv.hpp"
#include "memstab/error.hpp"
#include "memstab/wire.hpp"

namespace memstab {

using nlohmann::json;

void RunSummary::skip(const std::string& reason, std::string detail) {
  ++skipped;
  ++skip_reasons[reason];
  if (!detail.empty()) warnings.push_back(std::move(detail));
}

json RunSummary::to_json() const {
  json out;
  out["command"] = command;
  out["records_in"] = records_in;
  out["records_out"] = records_out;
  out["skipped"] = skipped;
  out["skip_reasons"] = skip_reasons;
  out["warnings"] = warnings.size();
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe(const TraceKey& key) {
  return fmt::format("({}, {}, {})", key.problem_id, key.solution_id, key.test_id);
}

// Profiles from different models or temperatures must never be paired.
template <typename Range, typename KeyOf>
void require_single_cohort(const Range& items, KeyOf key_of) {
  std::set<std::pair<std::optional<std::string>, std::optional<double>>> cohorts;
  for (const auto& item : items) {
    const TraceKey& key = key_of(item);
    cohorts.emplace(key.model, key.temperature);
  }
  if (cohorts.size() > 1) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("input mixes {} (model, temperature) cohorts; select one with "
                            "transform --model/--temperature",
                            cohorts.size()));
  }
}

void record_line_warnings(RunSummary& summary, const std::vector<wire::LineWarning>& warnings) {
  for (const auto& w : warnings) {
    summary.skip("malformed-line", fmt::format("line {}: {}", w.line, w.message));
  }
}

std::vector<MonotonicPeakProfile> load_store(std::istream& in, RunSummary& summary) {
  auto read = wire::read_mpp_store(in);
  summary.records_in = read.items.size() + read.warnings.size();
  record_line_warnings(summary, read.warnings);
  require_single_cohort(read.items, [](const auto& m) -> const TraceKey& { return m.source; });
  return std::move(read.items);
}

void record_skips(RunSummary& summary, const std::vector<SkipEntry>& skipped) {
  for (const auto& s : skipped) {
    const std::string who = s.sol_i.empty() ? ""
                            : s.sol_j.empty() ? fmt::format(" {}", s.sol_i)
                                              : fmt::format(" {}/{}", s.sol_i, s.sol_j);
    summary.skip(s.sol_i.empty() ? "group" : "profile",
                 fmt::format("({}, {}){}: {}", s.problem_id, s.test_id, who, s.reason));
  }
}

double delta_pct(double value, double base) {
  if (base == 0.0) return value == 0.0 ? 0.0 : kNaN;
  return 100.0 * (value - base) / base;
}

// Factor that decimates `trace` to the setting's resolution, if any.
std::optional<std::int64_t> decimation_factor(const RawTrace& trace,
                                              const AblationSetting& setting) {
  if (trace.sampling_mode != setting.mode) return std::nullopt;
  if (setting.mode == SamplingMode::kLine) {
    if (trace.stride < 1 || setting.stride % trace.stride != 0) return std::nullopt;
    return setting.stride / trace.stride;
  }
  const double ratio = setting.interval_ms / trace.interval_ms;
  const auto k = std::llround(ratio);
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio) return std::nullopt;
  return k;
}

void validate_setting(const AblationSetting& s) {
  if (s.mode == SamplingMode::kLine && s.stride < 1) {
    throw Error(ErrorCode::kConfiguration, fmt::format("setting '{}': stride must be >= 1", s.name));
  }
  if (s.mode == SamplingMode::kTime && !(s.interval_ms > 0.0)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("setting '{}': interval_ms must be > 0", s.name));
  }
  if (s.quant_bytes < 0) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("setting '{}': quant_bytes must be >= 0", s.name));
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

RunSummary cmd_transform(std::istream& traces, std::ostream& mpp_out,
                         const TransformOptions& options) {
  RunSummary summary;
  summary.command = "transform";
  auto read = wire::read_traces(traces);
  summary.records_in = read.items.size() + read.warnings.size();
  record_line_warnings(summary, read.warnings);

  std::vector<MonotonicPeakProfile> mpps;
  for (auto& record : read.items) {
    RawTrace trace = std::move(record.trace);
    if (options.model && trace.key.model != options.model) {
      summary.skip("filtered");
      continue;
    }
    if (options.temperature && trace.key.temperature != options.temperature) {
      summary.skip("filtered");
      continue;
    }
    if (trace.status != RunStatus::kOk) {
      summary.skip(fmt::format("status-{}", to_string(trace.status)),
                   fmt::format("{} excluded: status {}", describe(trace.key),
                               to_string(trace.status)));
      continue;
    }
    try {
      if (options.stride > 1) trace = resample_stride(trace, options.stride);
      if (options.quant_bytes) trace.quant_bytes = *options.quant_bytes;
      mpps.push_back(to_mpp(trace));
    } catch (const Error& e) {
      summary.skip(std::string(to_string(e.code())), e.what());
    }
  }
  wire::write_mpp_store(mpp_out, mpps);
  summary.records_out = mpps.size();
  return summary;
}

RunSummary cmd_dmpd(std::istream& mpp_store, std::ostream& csv_out, json* exact,
                    unsigned workers) {
  RunSummary summary;
  summary.command = "dmpd";
  const auto mpps = load_store(mpp_store, summary);
  const auto table = pairwise_table(mpps, workers);
  record_skips(summary, table.skipped);
  wire::write_pairwise_csv(csv_out, table.records);
  summary.records_out = table.records.size();
  if (exact) {
    *exact = json::array();
    for (const auto& r : table.records) {
      exact->push_back({{"problem_id", r.problem_id},
                        {"test_id", r.test_id},
                        {"sol_i", r.sol_i},
                        {"sol_j", r.sol_j},
                        {"dmpd", r.dmpd}});
    }
  }
  return summary;
}

RunSummary cmd_aggregate(std::istream& pairwise_csv, std::ostream& scores_out,
                         std::ostream& summary_out, json* exact) {
  RunSummary summary;
  summary.command = "aggregate";
  const auto records = wire::read_pairwise_csv(pairwise_csv);
  summary.records_in = records.size();
  if (records.empty()) throw Error(ErrorCode::kNoData, "aggregate: pairwise table has no rows");
  const auto scores = problem_scores(records);
  const auto model = model_score(scores);
  wire::write_scores_csv(scores_out, scores);
  wire::write_summary_csv(summary_out, model);
  summary.records_out = scores.size();
  if (exact) {
    json problems = json::array();
    for (const auto& s : scores) {
      problems.push_back({{"problem_id", s.problem_id},
                          {"d_p", s.d_p},
                          {"n_pairs", s.n_pairs},
                          {"n_tests", s.n_tests},
                          {"weight", s.weight}});
    }
    *exact = {{"problems", problems},
              {"mis_macro", model.mis_macro},
              {"mis_micro", model.mis_micro},
              {"n_problems", model.n_problems}};
  }
  return summary;
}

RunSummary cmd_nmv(std::istream& mpp_store, std::ostream& records_out, std::ostream& means_out,
                   const NMVConfig& config, json* exact) {
  RunSummary summary;
  summary.command = "nmv";
  const auto mpps = load_store(mpp_store, summary);
  const auto table = nmv_records(mpps, config);
  record_skips(summary, table.skipped);
  const auto means = nmv_solution_mean(table.records);
  wire::write_nmv_csv(records_out, table.records);
  wire::write_nmv_means_csv(means_out, means);
  summary.records_out = table.records.size();
  if (exact) {
    json recs = json::array();
    for (const auto& r : table.records) {
      recs.push_back({{"problem_id", r.problem_id},
                      {"solution_id", r.solution_id},
                      {"test_id", r.test_id},
                      {"max_vel", r.max_vel},
                      {"median_peak", r.median_peak},
                      {"nmv", r.nmv},
                      {"eligible", r.eligible}});
    }
    json mean_rows = json::array();
    for (const auto& m : means) {
      mean_rows.push_back({{"problem_id", m.problem_id},
                           {"solution_id", m.solution_id},
                           {"mean_nmv", m.mean_nmv},
                           {"n_tests", m.n_tests}});
    }
    *exact = {{"records", recs}, {"means", mean_rows}};
  }
  return summary;
}

std::vector<AblationSetting> default_ablation_grid() {
  using M = SamplingMode;
  return {
      {"baseline", M::kLine, 1, 64, 0.0, true},
      {"stride-5", M::kLine, 5, 64, 0.0, false},
      {"stride-10", M::kLine, 10, 64, 0.0, false},
      {"quant-128", M::kLine, 1, 128, 0.0, false},
      {"quant-256", M::kLine, 1, 256, 0.0, false},
      {"time-0.1ms", M::kTime, 1, 64, 0.1, false},
      {"time-1ms", M::kTime, 1, 64, 1.0, false},
      {"time-2ms", M::kTime, 1, 64, 2.0, false},
  };
}

std::vector<AblationSetting> parse_ablation_grid(const json& grid) {
  if (!grid.is_array()) throw Error(ErrorCode::kConfiguration, "ablation grid must be a JSON array");
  std::vector<AblationSetting> out;
  for (const auto& item : grid) {
    if (!item.is_object()) {
      throw Error(ErrorCode::kConfiguration, "ablation grid entries must be objects");
    }
    AblationSetting s;
    try {
      s.name = item.at("name").get<std::string>();
      s.mode = parse_sampling_mode(item.value("mode", std::string("line")));
      s.stride = item.value("stride", std::int64_t{1});
      s.quant_bytes = item.value("quant_bytes", Bytes{64});
      s.interval_ms = item.value("interval_ms", 0.0);
      s.baseline = item.value("baseline", false);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfiguration, fmt::format("ablation grid: {}", e.what()));
    }
    validate_setting(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AblationRow> run_ablation(const std::vector<RawTrace>& traces,
                                      const std::vector<AblationSetting>& grid) {
  const auto n_baselines =
      std::count_if(grid.begin(), grid.end(), [](const auto& s) { return s.baseline; });
  if (n_baselines != 1) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("ablation grid needs exactly one baseline setting, found {}",
                            n_baselines));
  }
  for (const auto& s : grid) validate_setting(s);

  std::vector<const RawTrace*> usable;
  for (const auto& t : traces) {
    if (t.status == RunStatus::kOk) usable.push_back(&t);
  }
  require_single_cohort(usable, [](const RawTrace* t) -> const TraceKey& { return t->key; });

  using Identity = std::tuple<std::string, std::string, std::string>;
  std::map<Identity, std::vector<const RawTrace*>> by_identity;
  for (const auto* t : usable) {
    by_identity[{t->key.problem_id, t->key.solution_id, t->key.test_id}].push_back(t);
  }

  std::vector<AblationRow> rows;
  for (const auto& setting : grid) {
    std::vector<MonotonicPeakProfile> mpps;
    for (const auto& [identity, candidates] : by_identity) {
      const RawTrace* chosen = nullptr;
      std::int64_t best = 0;
      for (const auto* t : candidates) {
        auto factor = decimation_factor(*t, setting);
        if (factor && (!chosen || *factor < best)) {
          chosen = t;
          best = *factor;
        }
      }
      if (!chosen) continue;
      RawTrace derived = resample_stride(*chosen, best);
      derived.quant_bytes = setting.quant_bytes;
      mpps.push_back(to_mpp(derived));
    }
    const auto table = pairwise_table(mpps);
    const auto scores = problem_scores(table.records);
    if (scores.empty()) {
      throw Error(ErrorCode::kNoData,
                  fmt::format("setting '{}' produced no problem scores", setting.name));
    }
    const auto model = model_score(scores);
    AblationRow row;
    row.setting = setting;
    row.mis_macro = model.mis_macro;
    row.mis_micro = model.mis_micro;
    row.n_problems = model.n_problems;
    for (const auto& s : scores) row.problem_scores[s.problem_id] = s.d_p;
    rows.push_back(std::move(row));
  }

  const auto& base =
      *std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.setting.baseline; });
  const auto base_macro = base.mis_macro;
  const auto base_micro = base.mis_micro;
  const auto base_scores = base.problem_scores;
  for (auto& row : rows) {
    row.delta_macro_pct = delta_pct(row.mis_macro, base_macro);
    row.delta_micro_pct = delta_pct(row.mis_micro, base_micro);
    try {
      row.paired = stats::paired_diff_summary(base_scores, row.problem_scores);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("setting '{}': {}", row.setting.name, e.what()));
    }
  }
  return rows;
}

RunSummary cmd_ablate(std::istream& traces, const std::vector<AblationSetting>& grid,
                      std::ostream& report_out, json* exact) {
  RunSummary summary;
  summary.command = "ablate";
  auto read = wire::read_traces(traces);
  summary.records_in = read.items.size() + read.warnings.size();
  record_line_warnings(summary, read.warnings);
  std::vector<RawTrace> raw;
  for (auto& r : read.items) {
    if (r.trace.status != RunStatus::kOk) {
      summary.skip(fmt::format("status-{}", to_string(r.trace.status)));
      continue;
    }
    raw.push_back(std::move(r.trace));
  }
  const auto rows = run_ablation(raw, grid);

  csv::write_row(report_out,
                 {"setting", "mode", "stride", "quant_bytes", "interval_ms", "mis_macro",
                  "delta_macro_pct", "mis_micro", "delta_micro_pct", "paired_median_diff",
                  "paired_iqr", "wilcoxon_p", "cliffs_delta", "n_problems", "n_shared"});
  if (exact) *exact = json::array();
  for (const auto& row : rows) {
    const auto& s = row.setting;
    const bool line = s.mode == SamplingMode::kLine;
    csv::write_row(report_out,
                   {s.name, std::string(to_string(s.mode)), line ? std::to_string(s.stride) : "",
                    std::to_string(s.quant_bytes), line ? "" : fmt::format("{}", s.interval_ms),
                    csv::fixed6(row.mis_macro), csv::fixed6(row.delta_macro_pct),
                    csv::fixed6(row.mis_micro), csv::fixed6(row.delta_micro_pct),
                    csv::fixed6(row.paired.median_diff), csv::fixed6(row.paired.iqr),
                    csv::fixed6(row.paired.wilcoxon_p), csv::fixed6(row.paired.cliffs_delta),
                    std::to_string(row.n_problems), std::to_string(row.paired.n)});
    if (exact) {
      exact->push_back({{"setting", s.name},
                        {"mis_macro", row.mis_macro},
                        {"mis_micro", row.mis_micro},
                        {"delta_macro_pct", row.delta_macro_pct},
                        {"delta_micro_pct", row.delta_micro_pct},
                        {"paired_median_diff", row.paired.median_diff},
                        {"paired_iqr", row.paired.iqr},
                        {"wilcoxon_p", row.paired.wilcoxon_p},
                        {"cliffs_delta", row.paired.cliffs_delta},
                        {"problem_scores", row.problem_scores}});
    }
  }
  summary.records_out = rows.size();
  return summary;
}

RunSummary cmd_correlate(std::istream* pairwise_csv, std::istream* nmv_means_csv,
                         std::istream& se_metrics_csv, std::ostream& out,
                         std::vector<CorrelationRow>* rows_out) {
  RunSummary summary;
  summary.command = "correlate";
  using Key = std::pair<std::string, std::string>;

  std::map<Key, wire::SEMetricsRow> se;
  for (auto& row : wire::read_se_metrics_csv(se_metrics_csv)) {
    Key key{row.problem_id, row.solution_id};
    if (!se.emplace(key, std::move(row)).second) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("duplicate SE metrics row for ({}, {})", key.first, key.second));
    }
  }

  std::vector<std::pair<std::string, std::map<Key, double>>> proxies;
  if (pairwise_csv) {
    const auto records = wire::read_pairwise_csv(*pairwise_csv);
    summary.records_in += records.size();
    proxies.emplace_back("dmpd", solution_dmpd_means(records));
  }
  if (nmv_means_csv) {
    std::map<Key, double> means;
    for (const auto& m : wire::read_nmv_means_csv(*nmv_means_csv)) {
      means[{m.problem_id, m.solution_id}] = m.mean_nmv;
    }
    summary.records_in += means.size();
    proxies.emplace_back("nmv", std::move(means));
  }
  if (proxies.empty()) {
    throw Error(ErrorCode::kConfiguration, "correlate needs a DMPD or NMV proxy input");
  }

  struct Metric {
    const char* name;
    double wire::SEMetricsRow::*field;
  };
  const Metric metrics[] = {
      {"cognitive_complexity", &wire::SEMetricsRow::cognitive_complexity},
      {"cyclomatic_complexity", &wire::SEMetricsRow::cyclomatic_complexity},
      {"maintainability_index", &wire::SEMetricsRow::maintainability_index},
  };

  std::vector<CorrelationRow> rows;
  bool joined_any = false;
  for (const auto& [proxy_name, proxy] : proxies) {
    std::vector<const wire::SEMetricsRow*> joined;
    std::vector<double> proxy_vals;
    std::map<std::string, double> proxy_by_id;
    for (const auto& [key, value] : proxy) {
      auto it = se.find(key);
      if (it == se.end()) continue;
      joined.push_back(&it->second);
      proxy_vals.push_back(value);
      proxy_by_id[key.first + '\x1f' + key.second] = value;
    }
    if (joined.empty()) {
      summary.warnings.push_back(fmt::format("proxy {}: no rows joined SE metrics", proxy_name));
      continue;
    }
    joined_any = true;

    std::optional<std::map<std::string, stats::Tertile>> tertiles;
    try {
      tertiles = stats::tertile_stratify(proxy_by_id);
    } catch (const Error& e) {
      summary.warnings.push_back(fmt::format("proxy {}: {}", proxy_name, e.what()));
    }

    for (const auto& metric : metrics) {
      CorrelationRow row;
      row.proxy = proxy_name;
      row.metric_name = metric.name;
      row.n = joined.size();
      std::vector<double> metric_vals;
      for (const auto* s : joined) metric_vals.push_back(s->*metric.field);

      auto guarded = [&](auto&& compute) {
        try {
          return compute();
        } catch (const Error& e) {
          summary.skip(std::string(to_string(e.code())),
                       fmt::format("{} vs {}: {}", proxy_name, metric.name, e.what()));
          return kNaN;
        }
      };
      row.rho_spearman = guarded([&] { return stats::spearman_rho(proxy_vals, metric_vals); });
      row.r_pearson = guarded([&] { return stats::pearson_r(proxy_vals, metric_vals); });
      row.cliffs_delta_t1_t3 = kNaN;
      if (tertiles) {
        std::vector<double> low;
        std::vector<double> high;
        for (const auto* s : joined) {
          const auto tier = tertiles->at(s->problem_id + '\x1f' + s->solution_id);
          if (tier == stats::Tertile::kT1) low.push_back(s->*metric.field);
          if (tier == stats::Tertile::kT3) high.push_back(s->*metric.field);
        }
        row.cliffs_delta_t1_t3 = guarded([&] { return stats::cliffs_delta(low, high); });
      }
      rows.push_back(std::move(row));
    }
  }
  if (!joined_any) {
    throw Error(ErrorCode::kNoData, "correlate: no proxy rows joined the SE metrics");
  }

  csv::write_row(out, {"proxy", "metric", "rho_spearman", "r_pearson", "cliffs_delta_t1_t3", "n"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.proxy, r.metric_name, csv::fixed6(r.rho_spearman),
                         csv::fixed6(r.r_pearson), csv::fixed6(r.cliffs_delta_t1_t3),
                         std::to_string(r.n)});
  }
  summary.records_out = rows.size();
  if (rows_out) *rows_out = std::move(rows);
  return summary;
}

RunSummary cmd_report(const std::filesystem::path& traces,
                      const std::filesystem::path& out_dir, const ReportOptions& options) {
  std::ifstream in(traces, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read '{}'", traces.string()));
  std::filesystem::create_directories(out_dir);

  RunSummary summary;
  summary.command = "report";
  auto merge = [&](const RunSummary& step) {
    summary.skipped += step.skipped;
    for (const auto& [reason, n] : step.skip_reasons) {
      summary.skip_reasons[step.command + ":" + reason] += n;
    }
    summary.warnings.insert(summary.warnings.end(), step.warnings.begin(), step.warnings.end());
  };
  auto write_exact = [&](const std::string& name, const json& payload) {
    if (!options.exact) return;
    auto out = open_output(out_dir / name);
    out << payload.dump(2) << '\n';
  };

  std::stringstream mpp_store;
  const auto transform = cmd_transform(in, mpp_store, options.transform);
  summary.records_in = transform.records_in;
  merge(transform);
  open_output(out_dir / "mpp.jsonl") << mpp_store.str();

  std::stringstream pairwise;
  json exact_pairs;
  std::istringstream store_for_dmpd(mpp_store.str());
  merge(cmd_dmpd(store_for_dmpd, pairwise, options.exact ? &exact_pairs : nullptr,
                 options.workers));
  open_output(out_dir / "pairwise.csv") << pairwise.str();
  write_exact("pairwise.exact.json", exact_pairs);

  std::stringstream scores;
  std::stringstream model;
  json exact_scores;
  const auto aggregate = cmd_aggregate(pairwise, scores, model,
                                       options.exact ? &exact_scores : nullptr);
  merge(aggregate);
  open_output(out_dir / "scores.csv") << scores.str();
  open_output(out_dir / "summary.csv") << model.str();
  write_exact("scores.exact.json", exact_scores);

  std::stringstream nmv;
  std::stringstream means;
  json exact_nmv;
  std::istringstream store_for_nmv(mpp_store.str());
  const auto nmv_step = cmd_nmv(store_for_nmv, nmv, means, options.nmv,
                                options.exact ? &exact_nmv : nullptr);
  merge(nmv_step);
  open_output(out_dir / "nmv.csv") << nmv.str();
  open_output(out_dir / "nmv_means.csv") << means.str();
  write_exact("nmv.exact.json", exact_nmv);

  summary.records_out = aggregate.records_out;
  return summary;
}

}  // namespace memstab
