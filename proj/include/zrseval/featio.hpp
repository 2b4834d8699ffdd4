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

#ifndef ZRSEVAL_FEATIO_HPP
#define ZRSEVAL_FEATIO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

enum class FeatureFormat { kText, kBinary };

// On-disk binary layout: magic "ZRF1", rows u32 LE, cols u32 LE, then
// rows*cols f32 LE row-major. Round-trips bit-exactly.
void write_feature_file(const std::filesystem::path& path,
                        const FeatureSequence& seq, FeatureFormat format);

FeatureSequence load_feature_file(const std::filesystem::path& path,
                                  FeatureFormat format,
                                  double frame_shift = 0.01);

// One FeatureSequence per regular file in the directory; utterance_id is the
// file stem. Keys are sorted, so the result is independent of directory
// enumeration order.
std::map<std::string, FeatureSequence> load_feature_dir(
    const std::filesystem::path& dir, FeatureFormat format,
    double frame_shift = 0.01);

// Item file: a header line (content ignored, presence required) followed by
// 7 whitespace-separated columns: file onset offset center prev next speaker.
std::vector<AbxItem> load_item_file(const std::filesystem::path& path);

// Two columns: stimulus_id logprob. Duplicate ids and non-finite values are
// errors.
std::vector<ScoredStimulus> load_scored_file(const std::filesystem::path& path);

// Four columns: word_a word_b human_score subset_id.
std::vector<SimilarityRecord> load_similarity_file(
    const std::filesystem::path& path);

// Two or four columns: positive_id negative_id [paradigm category].
std::vector<GoldPair> load_gold_pair_file(const std::filesystem::path& path);

void write_scored_file(const std::filesystem::path& path,
                       const std::vector<ScoredStimulus>& scores);
void write_gold_pair_file(const std::filesystem::path& path,
                          const std::vector<GoldPair>& pairs);
void write_similarity_file(const std::filesystem::path& path,
                           const std::vector<SimilarityRecord>& records);
void write_item_file(const std::filesystem::path& path,
                     const std::vector<AbxItem>& items);

// Frames i with onset <= i * frame_shift < offset (half-open, start-aligned).
// Throws if the slice rounds to zero frames.
FeatureSequence slice_item(const FeatureSequence& seq, const AbxItem& item);

}  // namespace zrseval

#endif  // ZRSEVAL_FEATIO_HPP
