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

#include "zrseval/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace zrseval {

namespace {

constexpr double kLogFloorArg = 1e-10;

// In-place iterative radix-2 FFT.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular mel filterbank, filters spanning 0..Nyquist.
// Returns n_filters x (nfft/2 + 1) weights.
Eigen::MatrixXd mel_filterbank(int n_filters, std::size_t nfft,
                               double sample_rate) {
  const std::size_t n_bins = nfft / 2 + 1;
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_filters + 1));
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_filters, n_bins);
  for (int f = 0; f < n_filters; ++f) {
    const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double hz = sample_rate * static_cast<double>(b) /
                        static_cast<double>(nfft);
      if (hz > lo && hz < mid)
        fb(f, b) = (hz - lo) / (mid - lo);
      else if (hz >= mid && hz < hi)
        fb(f, b) = (hi - hz) / (hi - mid);
    }
  }
  return fb;
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

PcmSignal load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  char tag[4];
  in.read(tag, 4);
  if (std::memcmp(tag, "RIFF", 4) != 0)
    throw ParseError(path.string() + ": not a RIFF file");
  read_le<std::uint32_t>(in);  // file size
  in.read(tag, 4);
  if (std::memcmp(tag, "WAVE", 4) != 0)
    throw ParseError(path.string() + ": not a WAVE file");

  PcmSignal sig;
  bool got_fmt = false;
  while (in.read(tag, 4)) {
    const auto chunk_size = read_le<std::uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      const auto format = read_le<std::uint16_t>(in);
      const auto channels = read_le<std::uint16_t>(in);
      const auto rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      const auto bits = read_le<std::uint16_t>(in);
      if (format != 1 || bits != 16)
        throw ParseError(path.string() + ": only 16-bit PCM supported");
      if (channels != 1)
        throw ParseError(path.string() + ": only mono supported");
      sig.sample_rate = rate;
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      got_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!got_fmt) throw ParseError(path.string() + ": data before fmt chunk");
      const std::size_t n = chunk_size / 2;
      sig.samples.resize(n);
      std::vector<std::int16_t> raw(n);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(chunk_size));
      if (!in) throw ParseError(path.string() + ": truncated data chunk");
      for (std::size_t i = 0; i < n; ++i)
        sig.samples[i] = static_cast<float>(raw[i]) / 32768.0f;
      return sig;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  throw ParseError(path.string() + ": no data chunk");
}

void write_wav(const std::filesystem::path& path, const PcmSignal& signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t data_bytes = n * 2;
  const std::uint32_t rate = static_cast<std::uint32_t>(signal.sample_rate);
  auto w16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
  auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  out.write("RIFF", 4);
  w32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  w32(16);
  w16(1);  // PCM
  w16(1);  // mono
  w32(rate);
  w32(rate * 2);
  w16(2);
  w16(16);
  out.write("data", 4);
  w32(data_bytes);
  for (float s : signal.samples) {
    const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const std::int16_t q =
        static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    out.write(reinterpret_cast<const char*>(&q), 2);
  }
}

FeatureSequence delta(const FeatureSequence& seq, int window) {
  seq.validate();
  if (window < 1) throw InvariantError("delta: window must be >= 1");
  const Eigen::Index n = seq.frames.rows();
  const Eigen::Index d = seq.frames.cols();
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += static_cast<double>(k) * k;
  denom *= 2.0;
  FeatureSequence out;
  out.frames.resize(n, d);
  out.frame_shift = seq.frame_shift;
  out.utterance_id = seq.utterance_id;
  auto clamp_row = [&](Eigen::Index t) {
    return std::clamp<Eigen::Index>(t, 0, n - 1);
  };
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int k = 1; k <= window; ++k)
      acc += static_cast<double>(k) *
             (seq.frames.row(clamp_row(t + k)).cast<double>() -
              seq.frames.row(clamp_row(t - k)).cast<double>())
                 .transpose();
    out.frames.row(t) = (acc / denom).cast<float>().transpose();
  }
  return out;
}

FeatureSequence extract_mfcc(const PcmSignal& signal, const MfccConfig& cfg) {
  cfg.validate();
  const std::size_t win =
      static_cast<std::size_t>(std::lround(cfg.window_len * cfg.sample_rate));
  const std::size_t hop =
      static_cast<std::size_t>(std::lround(cfg.hop * cfg.sample_rate));
  const std::size_t n_samples = signal.samples.size();
  if (n_samples < win)
    throw InvariantError("signal shorter than one analysis window (" +
                         std::to_string(n_samples) + " < " +
                         std::to_string(win) + " samples)");
  const Eigen::Index n_frames =
      1 + static_cast<Eigen::Index>((n_samples - win) / hop);
  const std::size_t nfft = next_pow2(win);
  const std::size_t n_bins = nfft / 2 + 1;

  std::vector<double> window_fn(win);
  for (std::size_t i = 0; i < win; ++i) {
    const double phase =
        2.0 * std::numbers::pi * static_cast<double>(i) / (win - 1);
    window_fn[i] = cfg.window_fn == WindowFn::kHamming
                       ? 0.54 - 0.46 * std::cos(phase)
                       : 0.5 - 0.5 * std::cos(phase);
  }

  const Eigen::MatrixXd fb =
      mel_filterbank(cfg.n_mel_filters, nfft, cfg.sample_rate);

  // DCT-II, orthonormal, coefficients 1..n_cepstra (c0 dropped: log energy
  // takes its place).
  const int M = cfg.n_mel_filters;
  Eigen::MatrixXd dct(cfg.n_cepstra, M);
  for (int k = 1; k <= cfg.n_cepstra; ++k)
    for (int j = 0; j < M; ++j)
      dct(k - 1, j) = std::sqrt(2.0 / M) *
                      std::cos(std::numbers::pi * k * (j + 0.5) / M);

  // Pre-emphasis over the whole signal.
  std::vector<double> pcm(n_samples);
  pcm[0] = signal.samples[0] * (1.0 - cfg.pre_emphasis);
  for (std::size_t i = 1; i < n_samples; ++i)
    pcm[i] = static_cast<double>(signal.samples[i]) -
             cfg.pre_emphasis * static_cast<double>(signal.samples[i - 1]);

  const int base_dim = cfg.n_cepstra + 1;  // cepstra + log energy
  Eigen::MatrixXd base(n_frames, base_dim);
  std::vector<std::complex<double>> buf(nfft);
  Eigen::VectorXd power(n_bins);
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * hop;
    // Energy from the raw frame, before pre-emphasis and windowing.
    double energy = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      const double s = signal.samples[start + i];
      energy += s * s;
    }
    for (std::size_t i = 0; i < win; ++i)
      buf[i] = pcm[start + i] * window_fn[i];
    std::fill(buf.begin() + win, buf.end(), std::complex<double>(0.0));
    fft(buf);
    for (std::size_t b = 0; b < n_bins; ++b) power(b) = std::norm(buf[b]);
    Eigen::VectorXd logmel = (fb * power).cwiseMax(kLogFloorArg).array().log();
    base.row(t).head(cfg.n_cepstra) = (dct * logmel).transpose();
    base(t, cfg.n_cepstra) = std::log(std::max(energy, kLogFloorArg));
  }

  FeatureSequence stat;
  stat.frames = base.cast<float>();
  stat.frame_shift = cfg.hop;
  stat.utterance_id = "";
  FeatureSequence d1 = delta(stat, cfg.delta_window);
  FeatureSequence d2 = delta(d1, cfg.delta_window);

  FeatureSequence out;
  out.frames.resize(n_frames, 3 * base_dim);
  out.frames.leftCols(base_dim) = stat.frames;
  out.frames.middleCols(base_dim, base_dim) = d1.frames;
  out.frames.rightCols(base_dim) = d2.frames;
  out.frame_shift = cfg.hop;

  if (cfg.mean_var_normalize) {
    Eigen::MatrixXd m = out.frames.cast<double>();
    Eigen::RowVectorXd mean = m.colwise().mean();
    m.rowwise() -= mean;
    Eigen::RowVectorXd sd =
        (m.array().square().colwise().mean()).sqrt().matrix();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (sd(j) > 0.0) m.col(j) /= sd(j);
    out.frames = m.cast<float>();
  }
  return out;
}

}  // namespace zrseval
