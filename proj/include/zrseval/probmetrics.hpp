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

#ifndef ZRSEVAL_PROBMETRICS_HPP
#define ZRSEVAL_PROBMETRICS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

struct PairedAccuracy {
  double overall = 0.0;  // (wins + 0.5 * ties) / n_pairs
  std::size_t n_pairs = 0;
  std::map<std::string, double> by_paradigm;
  std::map<std::string, double> by_category;
  std::map<std::string, std::size_t> paradigm_counts;
  std::map<std::string, std::size_t> category_counts;
};

// Pair credit: 1 if logprob(positive) > logprob(negative), 0.5 on tie,
// else 0. Serves both the word/nonword and grammatical/ungrammatical
// metrics. Only the ordering of the scores matters.
PairedAccuracy paired_accuracy(const std::vector<ScoredStimulus>& scores,
                               const std::vector<GoldPair>& gold);

// Percentile 95% interval over pair-level bootstrap resampling.
std::pair<double, double> bootstrap_ci(const std::vector<ScoredStimulus>& scores,
                                       const std::vector<GoldPair>& gold,
                                       std::size_t n_resamples,
                                       std::uint64_t seed);

}  // namespace zrseval

#endif  // ZRSEVAL_PROBMETRICS_HPP
