#include "memstab/burstiness.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "memstab/error.hpp"
#include "memstab/summation.hpp"

namespace memstab {

double max_velocity(const MonotonicPeakProfile& mpp) {
  if (mpp.size() < 2) {
    throw Error(ErrorCode::kDegenerateProfile,
                fmt::format("max_velocity: profile length {} < 2", mpp.size()));
  }
  double best = 0.0;
  for (std::size_t t = 1; t < mpp.values.size(); ++t) {
    best = std::max(best, mpp.values[t] - mpp.values[t - 1]);
  }
  return best;
}

double median_peak(std::span<const double> peaks) {
  if (peaks.empty()) {
    throw Error(ErrorCode::kNoPassingSolutions, "median_peak: no passing solutions");
  }
  std::vector<double> sorted(peaks.begin(), peaks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

NMVTable nmv_records(std::span<const MonotonicPeakProfile> mpps, const NMVConfig& config) {
  if (config.p_min < 0) {
    throw Error(ErrorCode::kConfiguration, "nmv: p_min must be >= 0");
  }
  std::map<std::pair<std::string, std::string>, std::vector<const MonotonicPeakProfile*>>
      groups;
  for (const auto& mpp : mpps) {
    groups[{mpp.source.problem_id, mpp.source.test_id}].push_back(&mpp);
  }

  NMVTable table;
  for (auto& [key, members] : groups) {
    const auto& [problem_id, test_id] = key;
    std::sort(members.begin(), members.end(), [](const auto* a, const auto* b) {
      return a->source.solution_id < b->source.solution_id;
    });
    std::vector<double> peaks;
    for (const auto* m : members) peaks.push_back(m->peak);
    const double median = median_peak(peaks);
    if (median <= 0.0) {
      table.skipped.push_back({problem_id, test_id, "", "",
                               "median peak is 0; NMV undefined for this test"});
      continue;
    }
    for (const auto* m : members) {
      if (m->size() < 2) {
        table.skipped.push_back({problem_id, test_id, m->source.solution_id, "",
                                 fmt::format("degenerate profile (length {})", m->size())});
        continue;
      }
      NMVRecord rec;
      rec.problem_id = problem_id;
      rec.solution_id = m->source.solution_id;
      rec.test_id = test_id;
      rec.max_vel = max_velocity(*m);
      rec.median_peak = median;
      rec.nmv = rec.max_vel / median;
      if (config.clip_to_unit) rec.nmv = std::clamp(rec.nmv, 0.0, 1.0);
      rec.eligible = m->peak >= static_cast<double>(config.p_min);
      table.records.push_back(std::move(rec));
    }
  }
  return table;
}

std::vector<NMVSolutionMean> nmv_solution_mean(std::span<const NMVRecord> records) {
  std::vector<const NMVRecord*> eligible;
  for (const auto& r : records) {
    if (r.eligible) eligible.push_back(&r);
  }
  std::sort(eligible.begin(), eligible.end(), [](const auto* a, const auto* b) {
    return std::tie(a->problem_id, a->solution_id, a->test_id, a->nmv) <
           std::tie(b->problem_id, b->solution_id, b->test_id, b->nmv);
  });

  std::vector<NMVSolutionMean> out;
  std::vector<double> values;
  auto flush = [&](const NMVRecord& last) {
    out.push_back({last.problem_id, last.solution_id,
                   exact_mean(values),
                   values.size()});
    values.clear();
  };
  for (std::size_t k = 0; k < eligible.size(); ++k) {
    values.push_back(eligible[k]->nmv);
    const bool last = k + 1 == eligible.size() ||
                      eligible[k + 1]->problem_id != eligible[k]->problem_id ||
                      eligible[k + 1]->solution_id != eligible[k]->solution_id;
    if (last) flush(*eligible[k]);
  }
  return out;
}

}  // namespace memstab
