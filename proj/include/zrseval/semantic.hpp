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

#ifndef ZRSEVAL_SEMANTIC_HPP
#define ZRSEVAL_SEMANTIC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

enum class PoolMode { kMax, kMean, kLast };

struct SubsetScore {
  double rho = 0.0;  // raw rho in [-1, 1]
  std::size_t n = 0;
};

struct SemanticScore {
  std::map<std::string, SubsetScore> by_subset;
  double unweighted = 0.0;  // mean of subset rhos
  double weighted = 0.0;    // sum(n_i * rho_i) / sum(n_i)
  bool scale_x100 = true;   // reported values are rho * 100 when set
  std::vector<std::string> excluded_subsets;  // too small or undefined rho
  std::string similarity_convention = "cosine_similarity";
};

// Element-wise max / mean / final frame over time.
Eigen::VectorXd pool(const FeatureSequence& seq, PoolMode mode);

// Tie-corrected (average-rank) Spearman: fractional ranks, then Pearson
// correlation of the ranks. Returns nullopt when either side has zero rank
// variance.
std::optional<double> spearman_rho(const std::vector<double>& xs,
                                   const std::vector<double>& ys);

// Unweighted mean and size-weighted mean of subset rhos, scaled x100
// when requested. Pair (unweighted, weighted).
std::pair<double, double> aggregate_subsets(
    const std::map<std::string, SubsetScore>& by_subset, bool scale_x100);

// Per subset: rho(cosine similarity of pooled vectors, human scores);
// aggregated unweighted and size-weighted, reported x100 per convention.
SemanticScore evaluate_semantic(
    const std::map<std::string, FeatureSequence>& features,
    const std::vector<SimilarityRecord>& gold, PoolMode mode,
    bool scale_x100 = true);

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace zrseval

#endif  // ZRSEVAL_SEMANTIC_HPP
