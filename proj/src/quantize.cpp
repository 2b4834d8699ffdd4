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

#include "zrseval/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "zrseval/featio.hpp"
#include "zrseval/parallel.hpp"

namespace zrseval {

namespace {

constexpr std::size_t kChunk = 4096;

int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::VectorXd& point, double* dist2_out) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - point).squaredNorm();
    if (d < best_d) {  // strict: ties stay with the lowest index
      best_d = d;
      best = c;
    }
  }
  if (dist2_out) *dist2_out = best_d;
  return best;
}

std::size_t count_distinct_rows(const Eigen::MatrixXd& data) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    std::vector<double> row(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) row[j] = data(i, j);
    rows.insert(std::move(row));
  }
  return rows.size();
}

// k-means++ seeding from a fixed generator.
Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& data, int k,
                               std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd centroids(k, data.cols());
  std::uniform_int_distribution<Eigen::Index> uni(0, n - 1);
  centroids.row(0) = data.row(uni(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d2(i) = (data.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> ud(0.0, total);
      double r = ud(rng);
      for (; pick < n - 1; ++pick) {
        r -= d2(pick);
        if (r <= 0.0) break;
      }
    } else {
      pick = uni(rng);
    }
    centroids.row(c) = data.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (data.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

}  // namespace

double inertia(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double d2 = 0.0;
    nearest_centroid(centroids, data.row(i).transpose(), &d2);
    total += d2;
  }
  return total;
}

Codebook kmeans_fit(const Eigen::MatrixXd& data, int k, std::uint64_t seed,
                    int max_iter, double tol, int n_threads) {
  if (k < 1) throw InvariantError("kmeans: k must be >= 1");
  if (!data.allFinite()) throw InvariantError("kmeans: non-finite input");
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (count_distinct_rows(data) < static_cast<std::size_t>(k))
    throw InvariantError("kmeans: fewer distinct points than k=" +
                         std::to_string(k));

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centroids = plus_plus_init(data, k, rng);

  Codebook cb;
  cb.k = k;
  cb.seed = seed;
  cb.tol = tol;

  std::vector<int> assignment(n, 0);
  const std::size_t n_chunks = (static_cast<std::size_t>(n) + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXd> chunk_sums(n_chunks);
  std::vector<Eigen::VectorXd> chunk_counts(n_chunks);
  std::vector<double> chunk_inertia(n_chunks);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment + per-chunk partial sums. Chunks are reduced in index
    // order below, so the result does not depend on thread count.
    parallel_for(n_chunks, n_threads, [&](std::size_t ci) {
      const Eigen::Index lo = static_cast<Eigen::Index>(ci * kChunk);
      const Eigen::Index hi =
          std::min<Eigen::Index>(lo + static_cast<Eigen::Index>(kChunk), n);
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
      double local_inertia = 0.0;
      for (Eigen::Index i = lo; i < hi; ++i) {
        double d2 = 0.0;
        const int c = nearest_centroid(centroids, data.row(i).transpose(), &d2);
        assignment[i] = c;
        sums.row(c) += data.row(i);
        counts(c) += 1.0;
        local_inertia += d2;
      }
      chunk_sums[ci] = std::move(sums);
      chunk_counts[ci] = counts;
      chunk_inertia[ci] = local_inertia;
    });
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    double current_inertia = 0.0;
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {
      sums += chunk_sums[ci];
      counts += chunk_counts[ci];
      current_inertia += chunk_inertia[ci];
    }
    cb.inertia_history.push_back(current_inertia);
    cb.training_inertia = current_inertia;
    cb.iterations_run = iter + 1;

    Eigen::MatrixXd updated(k, dim);
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0.0) {
        updated.row(c) = sums.row(c) / counts(c);
      } else {
        // Empty cluster: reseed at the point farthest from its centroid.
        Eigen::Index far_i = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d =
              (data.row(i) - centroids.row(assignment[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        updated.row(c) = data.row(far_i);
      }
    }
    const double shift =
        (updated - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(updated);
    if (shift < tol) break;
  }

  cb.centroids = std::move(centroids);
  // Report the inertia of the final centroids.
  cb.training_inertia = inertia(cb.centroids, data);
  cb.inertia_history.push_back(cb.training_inertia);
  return cb;
}

PseudoText kmeans_assign(const Codebook& codebook, const FeatureSequence& seq,
                         bool dedup) {
  seq.validate();
  if (seq.frames.cols() != codebook.centroids.cols())
    throw InvariantError(
        "kmeans_assign: dimension mismatch (features " +
        std::to_string(seq.frames.cols()) + ", codebook " +
        std::to_string(codebook.centroids.cols()) + ")");
  PseudoText out;
  out.utterance_id = seq.utterance_id;
  out.unit_ids.reserve(seq.frames.rows());
  for (Eigen::Index i = 0; i < seq.frames.rows(); ++i) {
    const int c = nearest_centroid(
        codebook.centroids, seq.frames.row(i).cast<double>().transpose(),
        nullptr);
    if (!dedup || out.unit_ids.empty() || out.unit_ids.back() != c)
      out.unit_ids.push_back(c);
  }
  return out;
}

void write_codebook(const std::filesystem::path& path, const Codebook& cb) {
  FeatureSequence mat;
  mat.frames = cb.centroids.cast<float>();
  mat.frame_shift = 1.0;
  mat.utterance_id = path.stem().string();
  write_feature_file(path, mat, FeatureFormat::kBinary);
  std::ofstream meta(path.string() + ".meta");
  if (!meta) throw ParseError("cannot write " + path.string() + ".meta");
  meta.precision(17);
  meta << "k=" << cb.k << " seed=" << cb.seed << " tol=" << cb.tol
       << " iterations=" << cb.iterations_run
       << " inertia=" << cb.training_inertia << "\n";
}

Codebook load_codebook(const std::filesystem::path& path) {
  const FeatureSequence mat = load_feature_file(path, FeatureFormat::kBinary);
  Codebook cb;
  cb.centroids = mat.frames.cast<double>();
  cb.k = static_cast<int>(mat.frames.rows());
  std::ifstream meta(path.string() + ".meta");
  if (meta) {
    std::string tok;
    while (meta >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "k") cb.k = std::stoi(val);
      else if (key == "seed") cb.seed = std::stoull(val);
      else if (key == "tol") cb.tol = std::stod(val);
      else if (key == "iterations") cb.iterations_run = std::stoi(val);
      else if (key == "inertia") cb.training_inertia = std::stod(val);
    }
  }
  return cb;
}

void write_pseudo_text(const std::filesystem::path& path,
                       const std::vector<PseudoText>& lines) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  for (const auto& line : lines) {
    out << line.utterance_id;
    for (int u : line.unit_ids) out << ' ' << u;
    out << '\n';
  }
}

}  // namespace zrseval
