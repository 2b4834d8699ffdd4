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

#ifndef ZRSEVAL_ABX_HPP
#define ZRSEVAL_ABX_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

enum class AbxCondition { kWithinSpeaker, kAcrossSpeaker };
enum class FrameDistance { kCosine, kAngular, kEuclidean };

// How the across-speaker probe x is drawn: pooled over all other speakers,
// or one other speaker sampled per cell.
enum class AcrossProbeMode { kPooled, kSampledSpeaker };

struct AbxTask {
  std::vector<AbxItem> items;
  AbxCondition condition = AbxCondition::kWithinSpeaker;
  FrameDistance frame_distance = FrameDistance::kCosine;
  AcrossProbeMode probe_mode = AcrossProbeMode::kPooled;
  std::uint64_t seed = 0;  // used only by kSampledSpeaker
};

// Per-(A,B,context,speaker-assignment) aggregation granule.
struct AbxCell {
  std::string phone_a;
  std::string phone_b;
  std::string context;  // "prev_next"
  std::string speakers;
  std::size_t triple_count = 0;
  double error_sum = 0.0;
};

struct AbxScore {
  double error_rate = 0.0;  // in [0, 1]
  std::map<std::string, double> by_phone_pair;  // unordered "A-B"
  std::vector<AbxCell> by_cell;
  std::size_t n_triples = 0;
  std::size_t skipped_cells = 0;  // cells with zero valid triples
  std::string probe_mode;         // "pooled" or "sampled"
};

// DTW over steps {(1,0),(0,1),(1,1)}; returns min over all monotone paths
// of (sum of frame distances along the path) / (path length).
double dtw_distance(const FeatureSequence& x, const FeatureSequence& y,
                    FrameDistance metric);

// Frame-level distance. Cosine = 1 - cos similarity; angular =
// arccos(clamped cos similarity)/pi; euclidean = |u - v|_2. Zero-norm
// frames have cosine/angular distance 1 to anything.
double frame_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      FrameDistance metric);

// 0 when d(a,x) < d(b,x), 1 when d(a,x) > d(b,x), 0.5 on exact tie.
double score_triple(const FeatureSequence& a, const FeatureSequence& b,
                    const FeatureSequence& x, FrameDistance metric);

// Aggregation: cell means, averaged over speaker assignments, then contexts,
// then symmetrized over ordered (A,B)/(B,A), then averaged over phone pairs.
AbxScore evaluate_abx(const std::map<std::string, FeatureSequence>& features,
                      const AbxTask& task, int n_threads = 1,
                      bool use_distance_cache = true);

}  // namespace zrseval

#endif  // ZRSEVAL_ABX_HPP
