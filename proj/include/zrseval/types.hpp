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

#ifndef ZRSEVAL_TYPES_HPP
#define ZRSEVAL_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zrseval {

// Frame matrices are row-major: one row per time frame, stored as f32 to
// match the on-disk feature format bit for bit.
using FrameMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what)
      : std::runtime_error(what) {}
};

// Variable-length sequence of frame vectors for one utterance or stimulus.
struct FeatureSequence {
  FrameMatrix frames;
  double frame_shift = 0.01;  // seconds per frame hop
  std::string utterance_id;

  Eigen::Index rows() const { return frames.rows(); }
  Eigen::Index cols() const { return frames.cols(); }

  // Throws InvariantError on empty matrix, non-finite values or
  // non-positive frame shift.
  void validate() const {
    if (frames.rows() < 1 || frames.cols() < 1)
      throw InvariantError("feature sequence '" + utterance_id +
                           "': zero frames or zero dimensions");
    if (!frames.allFinite())
      throw InvariantError("feature sequence '" + utterance_id +
                           "': non-finite value");
    if (!(frame_shift > 0.0))
      throw InvariantError("feature sequence '" + utterance_id +
                           "': frame_shift must be > 0");
  }
};

// One triphone token: where it lives and its phonetic context.
struct AbxItem {
  std::string file_id;
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds
  std::string center_phone;
  std::string prev_phone;
  std::string next_phone;
  std::string speaker;

  void validate() const {
    if (!(onset >= 0.0) || !(onset < offset))
      throw InvariantError("item " + file_id + ": require 0 <= onset < offset, got [" +
                           std::to_string(onset) + ", " + std::to_string(offset) + ")");
  }
};

// Stimulus id plus a pseudo-log-probability from an external LM. Only the
// ordering between paired stimuli is contractual.
struct ScoredStimulus {
  std::string stimulus_id;
  double logprob = 0.0;
};

// One human similarity judgement for a word pair.
struct SimilarityRecord {
  std::string word_a;
  std::string word_b;
  double human_score = 0.0;
  std::string subset_id;
};

// A (positive, negative) stimulus pair, optionally tagged with a syntactic
// paradigm and broad category.
struct GoldPair {
  std::string positive_id;
  std::string negative_id;
  std::string paradigm;  // optional, empty when absent
  std::string category;  // optional, empty when absent

  void validate() const {
    if (positive_id == negative_id)
      throw InvariantError("gold pair: positive and negative id are both '" +
                           positive_id + "'");
  }
};

}  // namespace zrseval

#endif  // ZRSEVAL_TYPES_HPP
