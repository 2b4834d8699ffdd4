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

#include "zrseval/fixture.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "zrseval/featio.hpp"
#include "zrseval/semantic.hpp"

namespace zrseval {

namespace fs = std::filesystem;

AbxFixture make_abx_fixture(const AbxFixtureParams& p) {
  if (p.n_phones < 2 || p.n_speakers < 1 || p.tokens_per_cell < 1 ||
      p.dim < p.n_phones || p.mean_frames < 2)
    throw InvariantError("abx fixture: invalid params");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> frame_jitter(-2, 2);
  const bool disjoint = std::isinf(p.separability);
  // Per-dimension noise half-width keeping the total noise norm below
  // 0.05/(1+s), which guarantees within-category frame distances stay
  // strictly under across-category ones for orthogonal category directions.
  const double r = disjoint || p.separability <= 0.0
                       ? 0.0
                       : 0.05 / ((1.0 + p.separability) * std::sqrt(p.dim));
  std::uniform_real_distribution<double> jitter(-r, r);

  AbxFixture fixture;
  int token_id = 0;
  for (int phone = 0; phone < p.n_phones; ++phone) {
    for (int spk = 0; spk < p.n_speakers; ++spk) {
      for (int tok = 0; tok < p.tokens_per_cell; ++tok) {
        const int n_frames =
            std::max(2, p.mean_frames + frame_jitter(rng));
        FeatureSequence seq;
        seq.frames.resize(n_frames, p.dim);
        seq.frame_shift = 0.01;
        seq.utterance_id = "item_" + std::to_string(token_id);
        for (int t = 0; t < n_frames; ++t) {
          for (int d = 0; d < p.dim; ++d) {
            double v;
            if (p.constant_features) {
              v = d == 0 ? 1.0 : 0.5;
            } else if (p.separability == 0.0 && !disjoint) {
              v = gauss(rng);
            } else {
              v = (d == phone ? 1.0 : 0.0) + (disjoint ? 0.0 : jitter(rng));
            }
            seq.frames(t, d) = static_cast<float>(v);
          }
        }
        AbxItem item;
        item.file_id = seq.utterance_id;
        item.onset = 0.0;
        item.offset = n_frames * seq.frame_shift;
        item.center_phone = "p" + std::to_string(phone);
        item.prev_phone = "k";
        item.next_phone = "l";
        item.speaker = "spk" + std::to_string(spk);
        fixture.features.emplace(seq.utterance_id, std::move(seq));
        fixture.items.push_back(std::move(item));
        ++token_id;
      }
    }
  }
  return fixture;
}

void write_abx_fixture(const fs::path& dir, const AbxFixture& fixture) {
  fs::create_directories(dir / "features");
  for (const auto& [id, seq] : fixture.features)
    write_feature_file(dir / "features" / (id + ".zrf"), seq,
                       FeatureFormat::kBinary);
  write_item_file(dir / "fixture.item", fixture.items);
}

ScoredFixture make_scored_fixture(std::size_t n_pairs, double win_fraction,
                                  bool with_paradigms, std::uint64_t seed) {
  if (n_pairs == 0 || win_fraction < 0.0 || win_fraction > 1.0)
    throw InvariantError("scored fixture: invalid params");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  const std::size_t n_wins =
      static_cast<std::size_t>(std::lround(win_fraction * n_pairs));
  ScoredFixture fixture;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::string pos_id = "pos_" + std::to_string(i);
    const std::string neg_id = "neg_" + std::to_string(i);
    const double base = -10.0 - noise(rng);
    const bool win = i < n_wins;
    fixture.scores.push_back({pos_id, win ? base + 2.0 : base - 2.0});
    fixture.scores.push_back({neg_id, base});
    GoldPair p;
    p.positive_id = pos_id;
    p.negative_id = neg_id;
    if (with_paradigms) {
      p.paradigm = "par" + std::to_string(i % 4);
      p.category = "cat" + std::to_string(i % 2);
    }
    fixture.gold.push_back(std::move(p));
  }
  return fixture;
}

void write_scored_fixture(const fs::path& dir, const ScoredFixture& fixture) {
  fs::create_directories(dir);
  write_scored_file(dir / "scores.txt", fixture.scores);
  write_gold_pair_file(dir / "gold.txt", fixture.gold);
}

SemanticFixture make_semantic_fixture(const SemanticFixtureParams& p) {
  if (p.subset_sizes.empty() || p.dim < 2)
    throw InvariantError("semantic fixture: invalid params");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SemanticFixture fixture;
  // Single-frame word vectors, so the fixture is pooling-invariant.
  auto make_word = [&](const std::string& id) {
    FeatureSequence seq;
    seq.frames.resize(1, p.dim);
    for (int d = 0; d < p.dim; ++d)
      seq.frames(0, d) = static_cast<float>(gauss(rng));
    seq.frame_shift = 0.01;
    seq.utterance_id = id;
    const Eigen::VectorXd vec = seq.frames.row(0).cast<double>().transpose();
    fixture.features.emplace(id, std::move(seq));
    return vec;
  };
  for (std::size_t s = 0; s < p.subset_sizes.size(); ++s) {
    const std::string subset = "set" + std::to_string(s);
    for (std::size_t i = 0; i < p.subset_sizes[s]; ++i) {
      const std::string wa = subset + "_w" + std::to_string(i) + "a";
      const std::string wb = subset + "_w" + std::to_string(i) + "b";
      const Eigen::VectorXd va = make_word(wa);
      const Eigen::VectorXd vb = make_word(wb);
      const double sim = cosine_similarity(va, vb);
      SimilarityRecord rec;
      rec.word_a = wa;
      rec.word_b = wb;
      // planted_rho == 1: a strictly increasing map of the model
      // similarity, so rank correlation is exactly 1.
      rec.human_score = p.planted_rho >= 1.0
                            ? 3.0 * sim + 5.0
                            : p.planted_rho * sim +
                                  (1.0 - p.planted_rho) * gauss(rng);
      rec.subset_id = subset;
      fixture.gold.push_back(std::move(rec));
    }
  }
  return fixture;
}

void write_semantic_fixture(const fs::path& dir,
                            const SemanticFixture& fixture) {
  fs::create_directories(dir / "features");
  for (const auto& [id, seq] : fixture.features)
    write_feature_file(dir / "features" / (id + ".zrf"), seq,
                       FeatureFormat::kBinary);
  write_similarity_file(dir / "gold.txt", fixture.gold);
}

std::vector<float> make_audio_fixture(std::size_t n_samples,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<float> samples(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i);
    const double v = 0.15 * std::sin(2.0 * std::numbers::pi * t / 64.0) +
                     0.08 * std::sin(2.0 * std::numbers::pi * t / 23.0) +
                     0.04 * std::sin(2.0 * std::numbers::pi * t / 7.0) +
                     noise(rng);
    samples[i] = static_cast<float>(v);
  }
  return samples;
}

}  // namespace zrseval
