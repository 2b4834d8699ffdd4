// Copyright 2026 ZRSEval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zrseval/probmetrics.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

namespace zrseval {

namespace {

std::vector<double> pair_credits(const std::vector<ScoredStimulus>& scores,
                                 const std::vector<GoldPair>& gold) {
  std::unordered_map<std::string, double> table;
  table.reserve(scores.size());
  for (const auto& s : scores)
    if (!table.emplace(s.stimulus_id, s.logprob).second)
      throw InvariantError("duplicate stimulus id '" + s.stimulus_id + "'");
  std::vector<double> credits;
  credits.reserve(gold.size());
  for (const auto& p : gold) {
    p.validate();
    auto pos = table.find(p.positive_id);
    if (pos == table.end())
      throw InvariantError("missing score for id '" + p.positive_id + "'");
    auto neg = table.find(p.negative_id);
    if (neg == table.end())
      throw InvariantError("missing score for id '" + p.negative_id + "'");
    credits.push_back(pos->second > neg->second
                          ? 1.0
                          : (pos->second < neg->second ? 0.0 : 0.5));
  }
  return credits;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

PairedAccuracy paired_accuracy(const std::vector<ScoredStimulus>& scores,
                               const std::vector<GoldPair>& gold) {
  if (gold.empty()) throw InvariantError("paired_accuracy: no gold pairs");
  const auto credits = pair_credits(scores, gold);

  PairedAccuracy acc;
  acc.n_pairs = gold.size();
  acc.overall = mean(credits);

  std::map<std::string, std::vector<double>> by_paradigm, by_category;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i].paradigm.empty())
      by_paradigm[gold[i].paradigm].push_back(credits[i]);
    if (!gold[i].category.empty())
      by_category[gold[i].category].push_back(credits[i]);
  }
  for (const auto& [name, cs] : by_paradigm) {
    acc.by_paradigm[name] = mean(cs);
    acc.paradigm_counts[name] = cs.size();
  }
  for (const auto& [name, cs] : by_category) {
    acc.by_category[name] = mean(cs);
    acc.category_counts[name] = cs.size();
  }
  return acc;
}

std::pair<double, double> bootstrap_ci(const std::vector<ScoredStimulus>& scores,
                                       const std::vector<GoldPair>& gold,
                                       std::size_t n_resamples,
                                       std::uint64_t seed) {
  const auto credits = pair_credits(scores, gold);
  const std::size_t n = credits.size();
  if (n < 2) throw InvariantError("bootstrap_ci: need at least 2 pairs");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means;
  means.reserve(n_resamples);
  for (std::size_t r = 0; r < n_resamples; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += credits[pick(rng)];
    means.push_back(sum / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, means.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  return {quantile(0.025), quantile(0.975)};
}

}  // namespace zrseval
