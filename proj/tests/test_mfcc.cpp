#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "zrseval/fixture.hpp"
#include "zrseval/mfcc.hpp"

using namespace zrseval;

TEST_CASE("1 s at 16 kHz under defaults gives 98 x 39") {
  PcmSignal sig;
  sig.samples = make_audio_fixture(16000, 3);
  const FeatureSequence feats = extract_mfcc(sig, MfccConfig{});
  CHECK(feats.rows() == 98);
  CHECK(feats.cols() == 39);
  CHECK(feats.frame_shift == doctest::Approx(0.010));
}

TEST_CASE("shape invariant holds for any input of at least one window") {
  MfccConfig cfg;
  for (std::size_t n : {400u, 401u, 560u, 1000u, 4321u}) {
    PcmSignal sig;
    sig.samples = make_audio_fixture(n, 5);
    const FeatureSequence feats = extract_mfcc(sig, cfg);
    CHECK(feats.cols() == 39);
    CHECK(feats.rows() == 1 + static_cast<Eigen::Index>((n - 400) / 160));
  }
}

TEST_CASE("signal shorter than one window is an error") {
  PcmSignal sig;
  sig.samples.assign(399, 0.1f);
  CHECK_THROWS_AS(extract_mfcc(sig, MfccConfig{}), InvariantError);
}

TEST_CASE("silence: constant cepstra, exactly zero deltas") {
  PcmSignal sig;
  sig.samples.assign(16000, 0.0f);
  const FeatureSequence feats = extract_mfcc(sig, MfccConfig{});
  for (Eigen::Index t = 1; t < feats.rows(); ++t)
    for (Eigen::Index j = 0; j < 13; ++j)
      CHECK(feats.frames(t, j) == feats.frames(0, j));
  for (Eigen::Index t = 0; t < feats.rows(); ++t)
    for (Eigen::Index j = 13; j < 39; ++j) CHECK(feats.frames(t, j) == 0.0f);
}

TEST_CASE("doubling amplitude shifts only the energy column, by log 4") {
  PcmSignal sig;
  sig.samples = make_audio_fixture(16000, 9);
  PcmSignal doubled = sig;
  for (auto& s : doubled.samples) s *= 2.0f;
  const FeatureSequence a = extract_mfcc(sig, MfccConfig{});
  const FeatureSequence b = extract_mfcc(doubled, MfccConfig{});
  const double log4 = std::log(4.0);
  for (Eigen::Index t = 0; t < a.rows(); ++t) {
    for (Eigen::Index j = 0; j < 12; ++j)
      CHECK(std::abs(b.frames(t, j) - a.frames(t, j)) < 1e-6);
    CHECK(std::abs((b.frames(t, 12) - a.frames(t, 12)) - log4) < 1e-6);
  }
}

TEST_CASE("determinism: identical input gives bit-identical output") {
  PcmSignal sig;
  sig.samples = make_audio_fixture(8000, 17);
  const FeatureSequence a = extract_mfcc(sig, MfccConfig{});
  const FeatureSequence b = extract_mfcc(sig, MfccConfig{});
  REQUIRE(a.rows() == b.rows());
  for (Eigen::Index t = 0; t < a.rows(); ++t)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      CHECK(a.frames(t, j) == b.frames(t, j));
}

TEST_CASE("shift equivariance: prepending one hop shifts interior frames") {
  PcmSignal sig;
  sig.samples = make_audio_fixture(4000, 23);
  PcmSignal shifted;
  shifted.samples.assign(160, 0.0f);
  shifted.samples.insert(shifted.samples.end(), sig.samples.begin(),
                         sig.samples.end());
  const FeatureSequence a = extract_mfcc(sig, MfccConfig{});
  const FeatureSequence b = extract_mfcc(shifted, MfccConfig{});
  // Skip the delta context at both ends; compare static coefficients of
  // interior frames.
  for (Eigen::Index t = 5; t + 5 < a.rows(); ++t)
    for (Eigen::Index j = 0; j < 39; ++j)
      CHECK(std::abs(b.frames(t + 1, j) - a.frames(t, j)) < 1e-5);
}

TEST_CASE("delta of a constant sequence is zero") {
  FeatureSequence seq;
  seq.frames = FrameMatrix::Constant(20, 3, 2.5f);
  seq.frame_shift = 0.01;
  const FeatureSequence d = delta(seq, 2);
  for (Eigen::Index t = 0; t < d.rows(); ++t)
    for (Eigen::Index j = 0; j < d.cols(); ++j) CHECK(d.frames(t, j) == 0.0f);
}

TEST_CASE("delta of a linear ramp is 1 at interior frames") {
  FeatureSequence seq;
  seq.frames.resize(10, 1);
  for (int t = 0; t < 10; ++t) seq.frames(t, 0) = static_cast<float>(t);
  seq.frame_shift = 0.01;
  const FeatureSequence d = delta(seq, 2);
  for (int t = 2; t < 8; ++t)
    CHECK(d.frames(t, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("delta of a single frame is zero") {
  FeatureSequence seq;
  seq.frames = FrameMatrix::Constant(1, 4, 3.0f);
  seq.frame_shift = 0.01;
  const FeatureSequence d = delta(seq, 2);
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(d.frames(0, j) == 0.0f);
}

TEST_CASE("config invariants are enforced") {
  MfccConfig cfg;
  cfg.hop = 0.03;  // > window_len
  PcmSignal sig;
  sig.samples.assign(16000, 0.1f);
  CHECK_THROWS_AS(extract_mfcc(sig, cfg), InvariantError);
  cfg = MfccConfig{};
  cfg.n_cepstra = 26;
  CHECK_THROWS_AS(extract_mfcc(sig, cfg), InvariantError);
}

TEST_CASE("wav round-trip preserves samples to quantization accuracy") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "zrseval_test.wav";
  PcmSignal sig;
  sig.samples = make_audio_fixture(2000, 29);
  sig.sample_rate = 16000.0;
  write_wav(p, sig);
  const PcmSignal back = load_wav(p);
  REQUIRE(back.samples.size() == sig.samples.size());
  CHECK(back.sample_rate == 16000.0);
  for (std::size_t i = 0; i < sig.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - sig.samples[i]) < 1.0f / 32000.0f);
  fs::remove(p);
}
