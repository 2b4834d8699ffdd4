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

#include "zrseval/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zrseval {

namespace {

// Fractional (average) ranks, 1-based.
std::vector<double> fractional_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) return std::nan("");
  return cov / std::sqrt(va * vb);
}

}  // namespace

Eigen::VectorXd pool(const FeatureSequence& seq, PoolMode mode) {
  seq.validate();
  const Eigen::MatrixXd m = seq.frames.cast<double>();
  switch (mode) {
    case PoolMode::kMax:
      return m.colwise().maxCoeff().transpose();
    case PoolMode::kMean:
      return m.colwise().mean().transpose();
    case PoolMode::kLast:
      return m.row(m.rows() - 1).transpose();
  }
  throw InvariantError("pool: unknown mode");
}

std::optional<double> spearman_rho(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw InvariantError("spearman: need two equal-length lists of size >= 2");
  const double r = pearson(fractional_ranks(xs), fractional_ranks(ys));
  if (std::isnan(r)) return std::nullopt;
  return r;
}

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

std::pair<double, double> aggregate_subsets(
    const std::map<std::string, SubsetScore>& by_subset, bool scale_x100) {
  if (by_subset.empty())
    throw InvariantError("semantic: no subsets to aggregate");
  double rho_sum = 0.0, weighted_sum = 0.0, weight_total = 0.0;
  for (const auto& [subset, s] : by_subset) {
    rho_sum += s.rho;
    weighted_sum += s.rho * static_cast<double>(s.n);
    weight_total += static_cast<double>(s.n);
  }
  const double scale = scale_x100 ? 100.0 : 1.0;
  return {scale * rho_sum / static_cast<double>(by_subset.size()),
          scale * weighted_sum / weight_total};
}

SemanticScore evaluate_semantic(
    const std::map<std::string, FeatureSequence>& features,
    const std::vector<SimilarityRecord>& gold, PoolMode mode,
    bool scale_x100) {
  SemanticScore score;
  score.scale_x100 = scale_x100;

  std::map<std::string, Eigen::VectorXd> pooled;
  auto pooled_vec = [&](const std::string& word) -> const Eigen::VectorXd& {
    auto it = pooled.find(word);
    if (it != pooled.end()) return it->second;
    auto f = features.find(word);
    if (f == features.end())
      throw InvariantError("semantic: missing features for word '" + word + "'");
    return pooled.emplace(word, pool(f->second, mode)).first->second;
  };

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      subsets;  // subset -> (model similarities, human scores)
  for (const auto& rec : gold) {
    auto& [model, human] = subsets[rec.subset_id];
    // Pool word_a before word_b so a missing-word diagnostic always names
    // the first unresolved word of the record.
    const Eigen::VectorXd& va = pooled_vec(rec.word_a);
    const Eigen::VectorXd& vb = pooled_vec(rec.word_b);
    model.push_back(cosine_similarity(va, vb));
    human.push_back(rec.human_score);
  }

  for (const auto& [subset, lists] : subsets) {
    const auto& [model, human] = lists;
    if (model.size() < 2) {
      score.excluded_subsets.push_back(subset + " (fewer than 2 pairs)");
      continue;
    }
    const auto rho = spearman_rho(model, human);
    if (!rho) {
      score.excluded_subsets.push_back(subset + " (zero rank variance)");
      continue;
    }
    score.by_subset[subset] = SubsetScore{*rho, model.size()};
  }
  if (score.by_subset.empty())
    throw InvariantError("semantic: no subset produced a defined rho");
  std::tie(score.unweighted, score.weighted) =
      aggregate_subsets(score.by_subset, scale_x100);
  return score;
}

}  // namespace zrseval
