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

#include "zrseval/abx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>

#include "zrseval/featio.hpp"
#include "zrseval/parallel.hpp"

namespace zrseval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double frame_distance_impl(const Eigen::MatrixXd& x, Eigen::Index i,
                           const Eigen::MatrixXd& y, Eigen::Index j,
                           FrameDistance metric) {
  if (metric == FrameDistance::kEuclidean)
    return (x.row(i) - y.row(j)).norm();
  const double nu = x.row(i).norm();
  const double nv = y.row(j).norm();
  if (nu == 0.0 || nv == 0.0) return 1.0;  // zero-norm: maximal dissimilarity
  // Chord length between the unit vectors; unlike acos(dot), this keeps full
  // precision at small angles, so identical frames get distance exactly 0.
  const double chord = (x.row(i) / nu - y.row(j) / nv).norm();
  const double half = std::min(1.0, 0.5 * chord);
  if (metric == FrameDistance::kCosine) return 2.0 * half * half;  // 1 - cos
  return 2.0 * std::asin(half) / std::numbers::pi;
}

// Min over all monotone paths of (sum of frame distances / path length),
// via a DP on path length with two rolling slices.
double dtw_impl(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                FrameDistance metric) {
  const Eigen::Index n = x.rows(), m = y.rows();
  Eigen::MatrixXd dist(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      dist(i, j) = frame_distance_impl(x, i, y, j, metric);

  const Eigen::Index max_len = n + m - 1;
  Eigen::MatrixXd prev = Eigen::MatrixXd::Constant(n, m, kInf);
  Eigen::MatrixXd cur = Eigen::MatrixXd::Constant(n, m, kInf);
  prev(0, 0) = dist(0, 0);
  double best = max_len == 1 ? prev(n - 1, m - 1) : kInf;
  for (Eigen::Index len = 2; len <= max_len; ++len) {
    cur.setConstant(kInf);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        double pred = kInf;
        if (i > 0) pred = std::min(pred, prev(i - 1, j));
        if (j > 0) pred = std::min(pred, prev(i, j - 1));
        if (i > 0 && j > 0) pred = std::min(pred, prev(i - 1, j - 1));
        if (pred < kInf) cur(i, j) = pred + dist(i, j);
      }
    }
    if (cur(n - 1, m - 1) < kInf)
      best = std::min(best, cur(n - 1, m - 1) / static_cast<double>(len));
    std::swap(prev, cur);
  }
  return best;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct CellSpec {
  std::string phone_a, phone_b, context, speakers;
  std::vector<std::size_t> a_tokens;  // category A, role a
  std::vector<std::size_t> b_tokens;  // category B, role b
  std::vector<std::size_t> x_tokens;  // category A, role x
  bool x_is_a_pool = false;  // when true, x ranges over x_tokens with x != a
                             // only by token index
};

}  // namespace

double frame_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      FrameDistance metric) {
  Eigen::MatrixXd mu = u.transpose();
  Eigen::MatrixXd mv = v.transpose();
  return frame_distance_impl(mu, 0, mv, 0, metric);
}

double dtw_distance(const FeatureSequence& x, const FeatureSequence& y,
                    FrameDistance metric) {
  x.validate();
  y.validate();
  if (x.cols() != y.cols())
    throw InvariantError("dtw: dimension mismatch (" +
                         std::to_string(x.cols()) + " vs " +
                         std::to_string(y.cols()) + ")");
  return dtw_impl(x.frames.cast<double>(), y.frames.cast<double>(), metric);
}

double score_triple(const FeatureSequence& a, const FeatureSequence& b,
                    const FeatureSequence& x, FrameDistance metric) {
  const double dax = dtw_distance(a, x, metric);
  const double dbx = dtw_distance(b, x, metric);
  if (dax < dbx) return 0.0;
  if (dax > dbx) return 1.0;
  return 0.5;
}

AbxScore evaluate_abx(const std::map<std::string, FeatureSequence>& features,
                      const AbxTask& task, int n_threads,
                      bool use_distance_cache) {
  // Repeated item rows (same file, same interval) describe one token; keep
  // the first so listing an item twice cannot change any score.
  std::vector<AbxItem> items;
  {
    std::set<std::tuple<std::string, double, double>> seen;
    for (const auto& item : task.items)
      if (seen.emplace(item.file_id, item.onset, item.offset).second)
        items.push_back(item);
  }

  // Materialize the token slices once.
  std::vector<Eigen::MatrixXd> tokens;
  tokens.reserve(items.size());
  for (const auto& item : items) {
    auto it = features.find(item.file_id);
    if (it == features.end())
      throw InvariantError("abx: no features for file '" + item.file_id + "'");
    tokens.push_back(slice_item(it->second, item).frames.cast<double>());
    if (tokens.back().cols() != tokens.front().cols())
      throw InvariantError("abx: inconsistent feature dimension at item " +
                           item.file_id);
  }

  // (context, phone, speaker) -> token indices.
  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<std::size_t>>>>
      groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.center_phone.empty() || it.prev_phone.empty() || it.next_phone.empty())
      throw InvariantError("abx: empty phone label on item " + it.file_id);
    groups[it.prev_phone + "_" + it.next_phone][it.center_phone][it.speaker]
        .push_back(i);
  }

  std::vector<CellSpec> cells;
  std::size_t skipped = 0;
  for (const auto& [context, by_phone] : groups) {
    for (const auto& [phone_a, a_speakers] : by_phone) {
      for (const auto& [phone_b, b_speakers] : by_phone) {
        if (phone_a == phone_b) continue;
        if (task.condition == AbxCondition::kWithinSpeaker) {
          for (const auto& [spk, a_toks] : a_speakers) {
            auto bs = b_speakers.find(spk);
            if (bs == b_speakers.end()) continue;
            if (a_toks.size() < 2 || bs->second.empty()) {
              ++skipped;
              continue;
            }
            CellSpec cell;
            cell.phone_a = phone_a;
            cell.phone_b = phone_b;
            cell.context = context;
            cell.speakers = spk;
            cell.a_tokens = a_toks;
            cell.b_tokens = bs->second;
            cell.x_tokens = a_toks;
            cell.x_is_a_pool = true;
            cells.push_back(std::move(cell));
          }
        } else {
          for (const auto& [spk, a_toks] : a_speakers) {
            auto bs = b_speakers.find(spk);
            if (bs == b_speakers.end() || a_toks.empty() || bs->second.empty())
              continue;
            // Probe tokens: category A from other speakers.
            std::vector<std::string> other_speakers;
            for (const auto& [ospk, otoks] : a_speakers)
              if (ospk != spk && !otoks.empty()) other_speakers.push_back(ospk);
            if (other_speakers.empty()) {
              ++skipped;
              continue;
            }
            CellSpec cell;
            cell.phone_a = phone_a;
            cell.phone_b = phone_b;
            cell.context = context;
            cell.a_tokens = a_toks;
            cell.b_tokens = bs->second;
            if (task.probe_mode == AcrossProbeMode::kPooled) {
              cell.speakers = spk + "|pooled";
              for (const auto& ospk : other_speakers)
                for (std::size_t t : a_speakers.at(ospk))
                  cell.x_tokens.push_back(t);
            } else {
              const std::string key =
                  context + "|" + phone_a + "|" + phone_b + "|" + spk;
              std::mt19937_64 rng(task.seed ^ fnv1a(key));
              std::uniform_int_distribution<std::size_t> pick(
                  0, other_speakers.size() - 1);
              const std::string& ospk = other_speakers[pick(rng)];
              cell.speakers = spk + "|" + ospk;
              cell.x_tokens = a_speakers.at(ospk);
            }
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  if (cells.empty())
    throw InvariantError("abx: no cell has any valid triple (empty task)");

  // Pairwise DTW distances needed by any cell, computed once.
  std::unordered_map<std::uint64_t, double> cache;
  auto pair_key = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::uint64_t>(i) * tokens.size() + j;
  };
  if (use_distance_cache) {
    for (const auto& cell : cells) {
      for (std::size_t x : cell.x_tokens) {
        for (std::size_t a : cell.a_tokens)
          if (a != x) cache.emplace(pair_key(a, x), 0.0);
        for (std::size_t b : cell.b_tokens) cache.emplace(pair_key(b, x), 0.0);
      }
    }
    std::vector<std::unordered_map<std::uint64_t, double>::iterator> slots;
    slots.reserve(cache.size());
    for (auto it = cache.begin(); it != cache.end(); ++it) slots.push_back(it);
    parallel_for(slots.size(), n_threads, [&](std::size_t si) {
      const std::uint64_t key = slots[si]->first;
      const std::size_t i = key / tokens.size();
      const std::size_t j = key % tokens.size();
      slots[si]->second = dtw_impl(tokens[i], tokens[j], task.frame_distance);
    });
  }
  auto distance = [&](std::size_t i, std::size_t j) {
    if (use_distance_cache) return cache.at(pair_key(i, j));
    return dtw_impl(tokens[i], tokens[j], task.frame_distance);
  };

  // Score every cell: mean triple credit over all (a, b, x) with a != x.
  std::vector<AbxCell> scored(cells.size());
  parallel_for(cells.size(), n_threads, [&](std::size_t ci) {
    const auto& cell = cells[ci];
    double error_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t x : cell.x_tokens) {
      for (std::size_t a : cell.a_tokens) {
        if (a == x) continue;
        const double dax = distance(a, x);
        for (std::size_t b : cell.b_tokens) {
          const double dbx = distance(b, x);
          error_sum += dax < dbx ? 0.0 : (dax > dbx ? 1.0 : 0.5);
          ++count;
        }
      }
    }
    AbxCell out;
    out.phone_a = cell.phone_a;
    out.phone_b = cell.phone_b;
    out.context = cell.context;
    out.speakers = cell.speakers;
    out.triple_count = count;
    out.error_sum = error_sum;
    scored[ci] = std::move(out);
  });

  // Aggregate: cells -> speaker assignments -> contexts -> ordered pair,
  // then symmetrize (A,B)/(B,A), then average over phone pairs.
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::vector<double>>>
      by_ordered_context;  // (A,B) -> context -> cell means
  AbxScore score;
  score.n_triples = 0;
  score.skipped_cells = skipped;
  score.probe_mode = task.condition == AbxCondition::kAcrossSpeaker
                         ? (task.probe_mode == AcrossProbeMode::kPooled
                                ? "pooled"
                                : "sampled")
                         : "n/a";
  for (auto& cell : scored) {
    if (cell.triple_count == 0) {
      ++score.skipped_cells;
      continue;
    }
    by_ordered_context[{cell.phone_a, cell.phone_b}][cell.context].push_back(
        cell.error_sum / static_cast<double>(cell.triple_count));
    score.n_triples += cell.triple_count;
    score.by_cell.push_back(std::move(cell));
  }
  if (by_ordered_context.empty())
    throw InvariantError("abx: no cell has any valid triple (empty task)");

  std::map<std::pair<std::string, std::string>, double> ordered_rate;
  for (const auto& [pair, contexts] : by_ordered_context) {
    double sum = 0.0;
    for (const auto& [context, means] : contexts) {
      double csum = 0.0;
      for (double m : means) csum += m;
      sum += csum / static_cast<double>(means.size());
    }
    ordered_rate[pair] = sum / static_cast<double>(contexts.size());
  }

  std::map<std::string, std::vector<double>> unordered;
  for (const auto& [pair, rate] : ordered_rate) {
    const std::string key = pair.first < pair.second
                                ? pair.first + "-" + pair.second
                                : pair.second + "-" + pair.first;
    unordered[key].push_back(rate);
  }
  double total = 0.0;
  for (const auto& [key, rates] : unordered) {
    double sum = 0.0;
    for (double r : rates) sum += r;
    score.by_phone_pair[key] = sum / static_cast<double>(rates.size());
    total += score.by_phone_pair[key];
  }
  score.error_rate = total / static_cast<double>(unordered.size());
  return score;
}

}  // namespace zrseval
