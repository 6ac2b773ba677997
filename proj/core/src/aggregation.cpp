#include "memstab/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "memstab/alignment.hpp"
#include "memstab/error.hpp"
#include "memstab/summation.hpp"
#include "parallel.hpp"

namespace memstab {

bool record_less(const PairwiseDistanceRecord& a, const PairwiseDistanceRecord& b) {
  return std::tie(a.problem_id, a.test_id, a.sol_i, a.sol_j, a.dmpd) <
         std::tie(b.problem_id, b.test_id, b.sol_i, b.sol_j, b.dmpd);
}

namespace {

struct Group {
  std::string problem_id;
  std::string test_id;
  std::vector<const MonotonicPeakProfile*> members;  // sorted by solution_id
};

PairwiseTable evaluate_group(const Group& group) {
  PairwiseTable out;
  std::vector<const MonotonicPeakProfile*> valid;
  for (const auto* mpp : group.members) {
    if (mpp->size() < 2) {
      out.skipped.push_back({group.problem_id, group.test_id, mpp->source.solution_id, "",
                             fmt::format("degenerate profile (length {})", mpp->size())});
    } else {
      valid.push_back(mpp);
    }
  }
  if (valid.size() < 2) {
    out.skipped.push_back({group.problem_id, group.test_id, "", "",
                           fmt::format("fewer than 2 valid profiles ({})", valid.size())});
    return out;
  }
  for (std::size_t x = 0; x < valid.size(); ++x) {
    for (std::size_t y = x + 1; y < valid.size(); ++y) {
      out.records.push_back({group.problem_id, group.test_id, valid[x]->source.solution_id,
                             valid[y]->source.solution_id, dmpd(*valid[x], *valid[y])});
    }
  }
  return out;
}

}  // namespace

PairwiseTable pairwise_table(std::span<const MonotonicPeakProfile> mpps, unsigned workers) {
  std::map<std::pair<std::string, std::string>, Group> by_key;
  for (const auto& mpp : mpps) {
    auto& group = by_key[{mpp.source.problem_id, mpp.source.test_id}];
    group.problem_id = mpp.source.problem_id;
    group.test_id = mpp.source.test_id;
    group.members.push_back(&mpp);
  }

  std::vector<Group> groups;
  groups.reserve(by_key.size());
  for (auto& [key, group] : by_key) {
    std::sort(group.members.begin(), group.members.end(),
              [](const auto* a, const auto* b) {
                return a->source.solution_id < b->source.solution_id;
              });
    for (std::size_t k = 1; k < group.members.size(); ++k) {
      if (group.members[k]->source.solution_id == group.members[k - 1]->source.solution_id) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("duplicate solution '{}' in problem '{}' test '{}'",
                                group.members[k]->source.solution_id, group.problem_id,
                                group.test_id));
      }
    }
    groups.push_back(std::move(group));
  }

  std::vector<PairwiseTable> partial(groups.size());
  detail::parallel_for(groups.size(), workers,
                       [&](std::size_t g) { partial[g] = evaluate_group(groups[g]); });

  PairwiseTable table;
  for (auto& part : partial) {
    table.records.insert(table.records.end(), part.records.begin(), part.records.end());
    table.skipped.insert(table.skipped.end(), part.skipped.begin(), part.skipped.end());
  }
  return table;
}

std::vector<ProblemScore> problem_scores(std::span<const PairwiseDistanceRecord> records) {
  std::vector<PairwiseDistanceRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), record_less);

  std::vector<ProblemScore> scores;
  auto it = sorted.begin();
  while (it != sorted.end()) {
    auto end = std::find_if(it, sorted.end(), [&](const auto& r) {
      return r.problem_id != it->problem_id;
    });
    std::vector<double> values;
    std::set<std::pair<std::string, std::string>> pairs;
    std::set<std::string> tests;
    for (auto r = it; r != end; ++r) {
      if (!(r->dmpd >= 0.0 && r->dmpd <= 1.0)) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("dmpd {} outside [0, 1] for problem '{}'", r->dmpd,
                                r->problem_id));
      }
      values.push_back(r->dmpd);
      pairs.emplace(r->sol_i, r->sol_j);
      tests.insert(r->test_id);
    }
    ProblemScore score;
    score.problem_id = it->problem_id;
    score.weight = values.size();
    score.n_pairs = pairs.size();
    score.n_tests = tests.size();
    score.d_p = exact_mean(values);
    scores.push_back(std::move(score));
    it = end;
  }
  return scores;
}

ModelScore model_score(std::span<const ProblemScore> scores) {
  std::vector<ProblemScore> used;
  for (const auto& s : scores) {
    if (s.weight > 0) used.push_back(s);
  }
  if (used.empty()) {
    throw Error(ErrorCode::kNoData, "model_score: no problem with evaluated DMPD entries");
  }
  std::vector<double> d_values;
  std::vector<std::uint64_t> weights;
  for (const auto& s : used) {
    d_values.push_back(s.d_p);
    weights.push_back(s.weight);
  }

  ModelScore model;
  model.n_problems = used.size();
  model.mis_macro = exact_mean(d_values);
  model.mis_micro = exact_weighted_mean(d_values, weights);
  return model;
}

std::map<std::pair<std::string, std::string>, double> solution_dmpd_means(
    std::span<const PairwiseDistanceRecord> records) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> values;
  for (const auto& r : records) {
    values[{r.problem_id, r.sol_i}].push_back(r.dmpd);
    values[{r.problem_id, r.sol_j}].push_back(r.dmpd);
  }
  std::map<std::pair<std::string, std::string>, double> means;
  for (const auto& [key, vals] : values) {
    means[key] = exact_mean(vals);
  }
  return means;
}

}  // namespace memstab
