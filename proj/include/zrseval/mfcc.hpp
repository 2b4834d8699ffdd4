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

#ifndef ZRSEVAL_MFCC_HPP
#define ZRSEVAL_MFCC_HPP

#include <filesystem>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

enum class WindowFn { kHamming, kHann };

struct MfccConfig {
  double sample_rate = 16000.0;
  double window_len = 0.025;  // seconds
  double hop = 0.010;         // seconds
  int n_mel_filters = 26;
  int n_cepstra = 12;
  int delta_window = 2;  // frames
  WindowFn window_fn = WindowFn::kHamming;
  double pre_emphasis = 0.97;
  bool mean_var_normalize = false;  // off by default

  void validate() const {
    if (!(window_len > hop) || !(hop > 0.0))
      throw InvariantError("mfcc config: require window_len > hop > 0");
    if (n_cepstra >= n_mel_filters)
      throw InvariantError("mfcc config: require n_cepstra < n_mel_filters");
    if (delta_window < 1)
      throw InvariantError("mfcc config: require delta_window >= 1");
    if (!(sample_rate > 0.0))
      throw InvariantError("mfcc config: require sample_rate > 0");
  }
};

struct PcmSignal {
  std::vector<float> samples;  // amplitude nominally in [-1, 1]
  double sample_rate = 16000.0;
};

// Reads a 16-bit LE mono PCM WAV file.
PcmSignal load_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const PcmSignal& signal);

// Regression-based delta: d_t = sum_{k=1..W} k*(x_{t+k} - x_{t-k}) / (2*sum k^2)
// with boundary frames replicated past the edges. Same shape as input.
FeatureSequence delta(const FeatureSequence& seq, int window);

// 39-dim MFCC front-end: [c1..c12, logE, delta x13, delta-delta x13] under
// default config. Frame count = 1 + floor((N - window_samples) / hop_samples).
FeatureSequence extract_mfcc(const PcmSignal& signal, const MfccConfig& cfg);

}  // namespace zrseval

#endif  // ZRSEVAL_MFCC_HPP
