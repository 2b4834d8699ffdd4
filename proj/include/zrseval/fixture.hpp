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

#ifndef ZRSEVAL_FIXTURE_HPP
#define ZRSEVAL_FIXTURE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

// Synthetic ABX corpus with known ground truth:
//   separability == 0   -> both categories share one distribution (error ~0.5)
//   separability == inf -> one constant vector per category (error exactly 0)
//   0 < s < inf         -> disjoint bounded supports around orthogonal
//                          category directions, margin grows with s (error 0)
// constant_features overrides everything with a single shared vector
// (every triple ties, error exactly 0.5).
struct AbxFixtureParams {
  int n_phones = 4;
  int n_speakers = 4;
  int tokens_per_cell = 3;  // per (phone, speaker)
  int dim = 39;
  int mean_frames = 10;
  double separability = 1.0;  // inf accepted
  bool constant_features = false;
  std::uint64_t seed = 0;
};

struct AbxFixture {
  std::map<std::string, FeatureSequence> features;
  std::vector<AbxItem> items;
};

AbxFixture make_abx_fixture(const AbxFixtureParams& params);
void write_abx_fixture(const std::filesystem::path& dir,
                       const AbxFixture& fixture);

// Paired scores with an exactly planted win fraction: round(f * n) wins,
// the rest losses.
struct ScoredFixture {
  std::vector<ScoredStimulus> scores;
  std::vector<GoldPair> gold;
};
ScoredFixture make_scored_fixture(std::size_t n_pairs, double win_fraction,
                                  bool with_paradigms, std::uint64_t seed);
void write_scored_fixture(const std::filesystem::path& dir,
                          const ScoredFixture& fixture);

// Semantic sets: planted_rho = 1 plants a perfect monotone map between
// model similarity and human score; otherwise human scores are noisy copies.
struct SemanticFixtureParams {
  std::vector<std::size_t> subset_sizes = {10, 20, 30};
  int dim = 16;
  double planted_rho = 1.0;  // 1.0 => exact monotone map
  std::uint64_t seed = 0;
};
struct SemanticFixture {
  std::map<std::string, FeatureSequence> features;
  std::vector<SimilarityRecord> gold;
};
SemanticFixture make_semantic_fixture(const SemanticFixtureParams& params);
void write_semantic_fixture(const std::filesystem::path& dir,
                            const SemanticFixture& fixture);

// Deterministic test audio: a sum of sinusoids plus seeded noise.
std::vector<float> make_audio_fixture(std::size_t n_samples,
                                      std::uint64_t seed);

}  // namespace zrseval

#endif  // ZRSEVAL_FIXTURE_HPP
