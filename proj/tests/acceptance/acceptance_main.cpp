// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "memstab/aggregation.hpp"
#include "memstab/alignment.hpp"
#include "memstab/burstiness.hpp"
#include "memstab/commands.hpp"
#include "memstab/csv.hpp"
#include "memstab/error.hpp"
#include "memstab/profiles.hpp"
#include "memstab/stats.hpp"
#include "memstab/wire.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;
using namespace memstab;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MonotonicPeakProfile make_mpp(std::vector<double> values) {
  MonotonicPeakProfile m;
  m.peak = values.empty() ? 0.0 : values.back();
  m.values = std::move(values);
  return m;
}

MonotonicPeakProfile random_mpp(std::mt19937_64& rng) {
  std::vector<Bytes> samples(2 + rng() % 40);
  const auto range = 1 + rng() % 1000000;
  for (auto& s : samples) s = static_cast<Bytes>(rng() % range);
  return to_mpp(samples, static_cast<Bytes>(rng() % 3 == 0 ? 64 : 0));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-decreasing sequences over {0, .25, .5, .75, 1} ending at 1, lengths 2-6,
// plus the all-zero sequence of each length.
std::vector<std::vector<double>> grid_sequences() {
  std::vector<std::vector<double>> out;
  std::function<void(std::vector<double>&, std::size_t, int)> extend =
      [&](std::vector<double>& cur, std::size_t len, int min_level) {
        if (cur.size() + 1 == len) {
          cur.push_back(1.0);
          out.push_back(cur);
          cur.pop_back();
          return;
        }
        for (int level = min_level; level <= 4; ++level) {
          cur.push_back(level * 0.25);
          extend(cur, len, level);
          cur.pop_back();
        }
      };
  for (std::size_t len = 2; len <= 6; ++len) {
    std::vector<double> cur;
    extend(cur, len, 0);
    out.emplace_back(len, 0.0);
  }
  return out;
}

Outcome dtw_oracle() {
  Outcome o;
  const auto start = Clock::now();
  const auto seqs = grid_sequences();
  std::size_t pairs = 0;
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      const auto got = dtw_align(a, b);
      const auto want = oracles::brute_force_dtw(a, b);
      ++pairs;
      o.require(got.total_cost == want.cost,
                fmt::format("cost mismatch {} vs {}", got.total_cost, want.cost));
      o.require(want.lengths.contains(got.path_length), "path length not a minimum-cost path");
    }
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 60.0, fmt::format("took {:.1f}s", elapsed));
  if (o.ok) o.detail = fmt::format("{} sequences, {} pairs, {:.2f}s", seqs.size(), pairs, elapsed);
  return o;
}

Outcome dmpd_properties() {
  Outcome o;
  std::mt19937_64 rng(20240901);
  for (int i = 0; i < 10000 && o.ok; ++i) {
    const auto a = random_mpp(rng);
    const auto b = random_mpp(rng);
    const double ab = dmpd(a, b);
    const double ba = dmpd(b, a);
    o.require(ab >= 0.0 && ab <= 1.0, fmt::format("out of bounds: {}", ab));
    o.require(dmpd(a, a) == 0.0, "dmpd(P, P) != 0");
    o.require(std::abs(ab - ba) <= 1e-12, fmt::format("asymmetry {}", std::abs(ab - ba)));
    for (double alpha : {0.5, 3.0, 1000.0}) {
      auto scaled = a;
      for (auto& v : scaled.values) v *= alpha;
      scaled.peak *= alpha;
      o.require(dmpd(scaled, b) == ab, fmt::format("scale {} changed dmpd", alpha));
    }
  }
  if (o.ok) o.detail = "10000 pairs";
  return o;
}

Outcome worked_values() {
  Outcome o;
  const double a = dmpd(make_mpp({0, 1}), make_mpp({0, 0.5, 1}));
  const double b = dmpd(make_mpp({0, 0, 0}), make_mpp({0, 1}));
  o.require(std::abs(a - 1.0 / 6.0) <= 1e-12, fmt::format("dmpd = {}", a));
  o.require(std::abs(b - 1.0 / 3.0) <= 1e-12, fmt::format("dmpd = {}", b));

  const auto want_a = oracles::brute_force_dtw(std::vector<double>{0, 1},
                                               std::vector<double>{0, 0.5, 1});
  o.require(want_a.cost / static_cast<double>(*want_a.lengths.begin()) == a,
            "brute force disagrees on the first worked value");

  const std::vector<ProblemScore> scores{{"p1", 0.2, 2, 2, 4}, {"p2", 0.4, 1, 1, 1}};
  const auto m = model_score(scores);
  // 0.3 and 0.24 are not doubles; with the double inputs 0.2 and 0.4 the
  // exact results of both formulas round to these values.
  o.require(m.mis_macro == 0x1.3333333333334p-2, fmt::format("macro {:.17g}", m.mis_macro));
  o.require(m.mis_micro == 0x1.eb851eb851eb9p-3, fmt::format("micro {:.17g}", m.mis_micro));
  o.require(csv::fixed6(m.mis_macro) == "0.300000" && csv::fixed6(m.mis_micro) == "0.240000",
            "reported values differ from 0.300000 / 0.240000");
  if (o.ok) {
    o.detail = fmt::format("1/6, 1/3, macro {} micro {}", csv::fixed6(m.mis_macro),
                           csv::fixed6(m.mis_micro));
  }
  return o;
}

Outcome mpp_properties() {
  Outcome o;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000 && o.ok; ++i) {
    std::vector<Bytes> s(1 + rng() % 200);
    for (auto& x : s) x = static_cast<Bytes>(rng() % (1u << 30));
    const Bytes q = static_cast<Bytes>(std::array<int, 4>{0, 1, 64, 4096}[rng() % 4]);
    const auto m = to_mpp(s, q);
    o.require(m.values.front() == 0.0, "p_1 != 0");
    o.require(std::is_sorted(m.values.begin(), m.values.end()), "not non-decreasing");
    o.require(m.peak == m.values.back(), "peak mismatch");
    std::vector<Bytes> again(m.values.begin(), m.values.end());
    o.require(to_mpp(again, q).values == m.values, "not idempotent");
    o.require(quantize(s, 1) == s, "quantize(., 1) is not the identity");
  }
  if (o.ok) o.detail = "10000 series";
  return o;
}

Outcome aggregation_determinism() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0, 1);
  std::vector<PairwiseDistanceRecord> recs;
  for (int p = 0; p < 12; ++p) {
    for (int t = 0; t < 4; ++t) {
      for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
          recs.push_back({fmt::format("p{:02}", p), fmt::format("t{}", t), fmt::format("s{}", i),
                          fmt::format("s{}", j), d(rng)});
        }
      }
    }
  }
  auto run = [](const std::vector<PairwiseDistanceRecord>& in) {
    std::ostringstream csv_in;
    wire::write_pairwise_csv(csv_in, in);
    std::istringstream src(csv_in.str());
    std::ostringstream scores;
    std::ostringstream summary;
    cmd_aggregate(src, scores, summary);
    return scores.str() + summary.str();
  };
  const auto reference = run(recs);
  for (int k = 0; k < 100 && o.ok; ++k) {
    std::shuffle(recs.begin(), recs.end(), rng);
    o.require(run(recs) == reference, fmt::format("shuffle {} changed the output", k));
  }
  if (o.ok) o.detail = fmt::format("{} records, 100 shuffles", recs.size());
  return o;
}

Outcome nmv_checks() {
  Outcome o;
  o.require(max_velocity(make_mpp({0, 100, 100, 300})) == 200.0, "max_velocity != 200");

  auto with_id = [](std::string sol, std::vector<double> v) {
    auto m = make_mpp(std::move(v));
    m.source = {"p", std::move(sol), "t", std::nullopt, std::nullopt};
    return m;
  };
  const std::vector<MonotonicPeakProfile> group{with_id("a", {0, 100, 100, 300}),
                                                with_id("b", {0, 400, 400}),
                                                with_id("c", {0, 0, 500})};
  const auto table = nmv_records(group, {});
  o.require(table.records.size() == 3 && table.records[0].nmv == 0.5, "worked NMV != 0.5");

  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 1000 && o.ok; ++iter) {
    std::vector<MonotonicPeakProfile> base;
    for (int s = 0; s < 2 + iter % 6; ++s) {
      auto m = random_mpp(rng);
      m.source = {"p", fmt::format("s{}", s), "t", std::nullopt, std::nullopt};
      base.push_back(std::move(m));
    }
    const auto ref = nmv_records(base, {});
    for (double alpha : {2.0, 10.0}) {
      auto scaled = base;
      for (auto& m : scaled) {
        for (auto& v : m.values) v *= alpha;
        m.peak *= alpha;
      }
      const auto got = nmv_records(scaled, {});
      o.require(got.records.size() == ref.records.size(), "record count changed under scaling");
      for (std::size_t i = 0; i < got.records.size() && o.ok; ++i) {
        o.require(got.records[i].nmv == ref.records[i].nmv,
                  fmt::format("scale {} changed nmv", alpha));
      }
    }
  }
  if (o.ok) o.detail = "200, 0.5, scale invariance on 1000 groups";
  return o;
}

Outcome statistics_oracles() {
  Outcome o;
  std::size_t vectors = 0;
  // Every multiset of magnitudes from {1, 2, 3} with every sign pattern; the
  // statistic does not depend on element order.
  for (std::size_t n = 1; n <= 10 && o.ok; ++n) {
    for (std::size_t ones = 0; ones <= n; ++ones) {
      for (std::size_t twos = 0; ones + twos <= n; ++twos) {
        std::vector<double> mags(ones, 1.0);
        mags.insert(mags.end(), twos, 2.0);
        mags.insert(mags.end(), n - ones - twos, 3.0);
        for (std::uint32_t mask = 0; mask < (1u << n) && o.ok; ++mask) {
          std::vector<double> d(mags);
          for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1u) d[i] = -d[i];
          }
          const double got = stats::wilcoxon_signed_rank(d);
          const double want = oracles::wilcoxon_by_enumeration(d);
          ++vectors;
          o.require(std::abs(got - want) <= 1e-12,
                    fmt::format("n={} mask={}: {} vs {}", n, mask, got, want));
        }
      }
    }
  }
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> mag(1, 3);
  for (int i = 0; i < 2000 && o.ok; ++i) {
    std::vector<double> d(1 + i % 10);
    for (auto& x : d) x = mag(rng) * (rng() % 2 ? 1.0 : -1.0);
    const double p = stats::wilcoxon_signed_rank(d);
    std::shuffle(d.begin(), d.end(), rng);
    o.require(stats::wilcoxon_signed_rank(d) == p, "order changed the p-value");
  }

  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000 && o.ok; ++i) {
    std::vector<double> x(1 + rng() % 20);
    std::vector<double> y(1 + rng() % 20);
    for (auto& v : x) v = std::round(u(rng) * 10);
    for (auto& v : y) v = std::round(u(rng) * 10);
    o.require(stats::cliffs_delta(x, y) == -stats::cliffs_delta(y, x), "cliffs not antisymmetric");
  }
  const double rho =
      stats::spearman_rho(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
  o.require(std::abs(rho - 0.8) <= 1e-12, fmt::format("spearman {}", rho));
  if (o.ok) o.detail = fmt::format("{} signed-rank vectors, rho {:.12f}", vectors, rho);
  return o;
}

Outcome ablation() {
  Outcome o;
  const auto start = Clock::now();
  std::ifstream traces(fs::path(MEMSTAB_FIXTURE_DIR) / "ablation_traces.jsonl");
  std::ostringstream report;
  cmd_ablate(traces, default_ablation_grid(), report);
  std::istringstream back(report.str());
  const auto table = csv::read(back);
  const std::vector<std::string> header{
      "setting",   "mode",           "stride",    "quant_bytes",     "interval_ms",
      "mis_macro", "delta_macro_pct", "mis_micro", "delta_micro_pct", "paired_median_diff",
      "paired_iqr", "wilcoxon_p",    "cliffs_delta", "n_problems",    "n_shared"};
  o.require(table.header == header, "unexpected report columns");
  o.require(table.rows.size() == default_ablation_grid().size(), "one row per setting expected");
  if (!o.ok) return o;
  const auto name = table.column("setting");
  const auto macro = table.column("delta_macro_pct");
  const auto micro = table.column("delta_micro_pct");
  const auto problems = table.column("n_problems");
  double stride10 = NAN;
  for (const auto& row : table.rows) {
    o.require(row[problems] == "50", fmt::format("{}: n_problems {}", row[name], row[problems]));
    if (row[name] == "baseline") {
      o.require(row[macro] == "0.000000" && row[micro] == "0.000000", "baseline delta not 0");
    }
    if (row[name] == "stride-10") stride10 = csv::parse_double(row[macro], "delta");
  }
  // The exact deltas behind the rendered ones.
  std::ifstream again(fs::path(MEMSTAB_FIXTURE_DIR) / "ablation_traces.jsonl");
  std::vector<RawTrace> raw;
  for (auto& r : wire::read_traces(again).items) raw.push_back(std::move(r.trace));
  const auto rows = run_ablation(raw, default_ablation_grid());
  for (const auto& r : rows) {
    if (r.setting.baseline) {
      o.require(r.delta_macro_pct == 0.0 && r.delta_micro_pct == 0.0, "baseline delta not 0");
    }
    if (r.setting.name == "stride-10") stride10 = r.delta_macro_pct;
  }
  o.require(std::abs(stride10) < 15.0, fmt::format("stride-10 delta {:.3f}%", stride10));
  if (o.ok) {
    o.detail = fmt::format("{} settings, stride-10 delta {:+.2f}%, {:.2f}s", rows.size(), stride10,
                           seconds_since(start));
  }
  return o;
}

Outcome full_pipeline() {
  Outcome o;
  const fs::path fixtures = MEMSTAB_FIXTURE_DIR;
  const auto out_dir = fs::temp_directory_path() / "memstab_acceptance_report";
  fs::remove_all(out_dir);
  const auto start = Clock::now();
  ReportOptions opts;
  cmd_report(fixtures / "pipeline_traces.jsonl", out_dir, opts);
  const double elapsed = seconds_since(start);
  for (const char* file :
       {"mpp.jsonl", "pairwise.csv", "scores.csv", "summary.csv", "nmv.csv", "nmv_means.csv"}) {
    o.require(slurp(out_dir / file) == slurp(fixtures / "golden" / file),
              fmt::format("{} differs from golden", file));
  }
  o.require(elapsed < 5.0, fmt::format("took {:.2f}s", elapsed));
  fs::remove_all(out_dir);
  if (o.ok) o.detail = fmt::format("6 golden files, {:.3f}s", elapsed);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"dtw-oracle-equivalence", dtw_oracle},
      {"dmpd-bounds-identity-symmetry-scale", dmpd_properties},
      {"worked-values", worked_values},
      {"mpp-properties", mpp_properties},
      {"aggregation-determinism", aggregation_determinism},
      {"nmv", nmv_checks},
      {"statistics-oracles", statistics_oracles},
      {"ablation-machinery", ablation},
      {"full-pipeline-golden", full_pipeline},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
