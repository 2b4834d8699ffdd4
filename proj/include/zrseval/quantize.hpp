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

#ifndef ZRSEVAL_QUANTIZE_HPP
#define ZRSEVAL_QUANTIZE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

struct Codebook {
  Eigen::MatrixXd centroids;  // K x D
  int k = 50;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  int iterations_run = 0;
  double training_inertia = 0.0;
  // Inertia after each Lloyd iteration; non-increasing by construction and
  // asserted in tests.
  std::vector<double> inertia_history;
};

struct PseudoText {
  std::string utterance_id;
  std::vector<int> unit_ids;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed
// and independent of n_threads (fixed-chunk double-precision reduction).
// Throws if the data has fewer distinct rows than k or non-finite values.
Codebook kmeans_fit(const Eigen::MatrixXd& data, int k, std::uint64_t seed,
                    int max_iter = 300, double tol = 1e-4, int n_threads = 1);

// Nearest centroid by squared Euclidean distance, ties broken toward the
// lowest index. dedup collapses consecutive repeats.
PseudoText kmeans_assign(const Codebook& codebook, const FeatureSequence& seq,
                         bool dedup = false);

double inertia(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data);

// Codebook file: the centroid matrix in the binary feature format, plus a
// "<path>.meta" sidecar with k, seed, tol, iterations, inertia.
void write_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

void write_pseudo_text(const std::filesystem::path& path,
                       const std::vector<PseudoText>& lines);

}  // namespace zrseval

#endif  // ZRSEVAL_QUANTIZE_HPP
