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

#include "zrseval/featio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace zrseval {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'Z', 'R', 'F', '1'};

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line_no,
                             const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

double parse_double(const fs::path& path, std::size_t line_no,
                    const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    parse_fail(path, line_no, "unparseable number '" + tok + "'");
  }
  if (pos != tok.size())
    parse_fail(path, line_no, "unparseable number '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  return out;
}

FeatureSequence load_text_features(const fs::path& path, double frame_shift) {
  auto in = open_in(path, std::ios::in);
  std::vector<std::vector<float>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    std::vector<float> row;
    row.reserve(toks.size());
    for (const auto& t : toks)
      row.push_back(static_cast<float>(parse_double(path, line_no, t)));
    if (!rows.empty() && row.size() != rows.front().size())
      parse_fail(path, line_no,
                 "dimension mismatch: expected " +
                     std::to_string(rows.front().size()) + " columns, got " +
                     std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string() + ": zero frames");
  FeatureSequence seq;
  seq.frames.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      seq.frames(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  seq.frame_shift = frame_shift;
  seq.utterance_id = path.stem().string();
  seq.validate();
  return seq;
}

FeatureSequence load_binary_features(const fs::path& path,
                                     double frame_shift) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError(path.string() + ": byte 0: bad magic (expected ZRF1)");
  std::uint32_t rows = 0, cols = 0;
  if (!in.read(reinterpret_cast<char*>(&rows), 4) ||
      !in.read(reinterpret_cast<char*>(&cols), 4))
    throw ParseError(path.string() + ": byte 4: truncated header");
  if (rows == 0 || cols == 0)
    throw ParseError(path.string() + ": zero frames");
  FeatureSequence seq;
  seq.frames.resize(rows, cols);
  const std::streamsize payload =
      static_cast<std::streamsize>(rows) * cols * sizeof(float);
  if (!in.read(reinterpret_cast<char*>(seq.frames.data()), payload))
    throw ParseError(path.string() + ": byte 12: truncated payload (expected " +
                     std::to_string(payload) + " bytes)");
  seq.frame_shift = frame_shift;
  seq.utterance_id = path.stem().string();
  seq.validate();
  return seq;
}

}  // namespace

void write_feature_file(const fs::path& path, const FeatureSequence& seq,
                        FeatureFormat format) {
  seq.validate();
  if (format == FeatureFormat::kBinary) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kMagic, 4);
    const std::uint32_t rows = static_cast<std::uint32_t>(seq.frames.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(seq.frames.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(seq.frames.data()),
              static_cast<std::streamsize>(rows) * cols * sizeof(float));
  } else {
    auto out = open_out(path, std::ios::out);
    out.precision(9);
    for (Eigen::Index i = 0; i < seq.frames.rows(); ++i) {
      for (Eigen::Index j = 0; j < seq.frames.cols(); ++j) {
        if (j) out << ' ';
        out << seq.frames(i, j);
      }
      out << '\n';
    }
  }
}

FeatureSequence load_feature_file(const fs::path& path, FeatureFormat format,
                                  double frame_shift) {
  return format == FeatureFormat::kBinary
             ? load_binary_features(path, frame_shift)
             : load_text_features(path, frame_shift);
}

std::map<std::string, FeatureSequence> load_feature_dir(const fs::path& dir,
                                                        FeatureFormat format,
                                                        double frame_shift) {
  if (!fs::is_directory(dir))
    throw ParseError(dir.string() + ": not a directory");
  std::map<std::string, FeatureSequence> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto seq = load_feature_file(entry.path(), format, frame_shift);
    out.emplace(seq.utterance_id, std::move(seq));
  }
  return out;
}

std::vector<AbxItem> load_item_file(const fs::path& path) {
  auto in = open_in(path, std::ios::in);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": missing header line");
  std::vector<AbxItem> items;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 7)
      parse_fail(path, line_no,
                 "expected 7 columns, got " + std::to_string(toks.size()));
    AbxItem item;
    item.file_id = toks[0];
    item.onset = parse_double(path, line_no, toks[1]);
    item.offset = parse_double(path, line_no, toks[2]);
    item.center_phone = toks[3];
    item.prev_phone = toks[4];
    item.next_phone = toks[5];
    item.speaker = toks[6];
    try {
      item.validate();
    } catch (const InvariantError& e) {
      parse_fail(path, line_no, e.what());
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<ScoredStimulus> load_scored_file(const fs::path& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<ScoredStimulus> scores;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      parse_fail(path, line_no,
                 "expected 2 columns, got " + std::to_string(toks.size()));
    ScoredStimulus s;
    s.stimulus_id = toks[0];
    s.logprob = parse_double(path, line_no, toks[1]);
    if (!std::isfinite(s.logprob))
      parse_fail(path, line_no, "non-finite logprob for '" + s.stimulus_id + "'");
    if (!seen.insert(s.stimulus_id).second)
      parse_fail(path, line_no, "duplicate stimulus id '" + s.stimulus_id + "'");
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<SimilarityRecord> load_similarity_file(const fs::path& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<SimilarityRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 4)
      parse_fail(path, line_no,
                 "expected 4 columns, got " + std::to_string(toks.size()));
    SimilarityRecord r;
    r.word_a = toks[0];
    r.word_b = toks[1];
    r.human_score = parse_double(path, line_no, toks[2]);
    if (!std::isfinite(r.human_score))
      parse_fail(path, line_no, "non-finite human score");
    r.subset_id = toks[3];
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<GoldPair> load_gold_pair_file(const fs::path& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<GoldPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2 && toks.size() != 4)
      parse_fail(path, line_no,
                 "expected 2 or 4 columns, got " + std::to_string(toks.size()));
    GoldPair p;
    p.positive_id = toks[0];
    p.negative_id = toks[1];
    if (toks.size() == 4) {
      p.paradigm = toks[2];
      p.category = toks[3];
    }
    try {
      p.validate();
    } catch (const InvariantError& e) {
      parse_fail(path, line_no, e.what());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_scored_file(const fs::path& path,
                       const std::vector<ScoredStimulus>& scores) {
  auto out = open_out(path, std::ios::out);
  out.precision(17);
  for (const auto& s : scores) out << s.stimulus_id << ' ' << s.logprob << '\n';
}

void write_gold_pair_file(const fs::path& path,
                          const std::vector<GoldPair>& pairs) {
  auto out = open_out(path, std::ios::out);
  for (const auto& p : pairs) {
    out << p.positive_id << ' ' << p.negative_id;
    if (!p.paradigm.empty() || !p.category.empty())
      out << ' ' << p.paradigm << ' ' << p.category;
    out << '\n';
  }
}

void write_similarity_file(const fs::path& path,
                           const std::vector<SimilarityRecord>& records) {
  auto out = open_out(path, std::ios::out);
  out.precision(17);
  for (const auto& r : records)
    out << r.word_a << ' ' << r.word_b << ' ' << r.human_score << ' '
        << r.subset_id << '\n';
}

void write_item_file(const fs::path& path, const std::vector<AbxItem>& items) {
  auto out = open_out(path, std::ios::out);
  out.precision(17);
  out << "#file onset offset center prev next speaker\n";
  for (const auto& it : items)
    out << it.file_id << ' ' << it.onset << ' ' << it.offset << ' '
        << it.center_phone << ' ' << it.prev_phone << ' ' << it.next_phone
        << ' ' << it.speaker << '\n';
}

FeatureSequence slice_item(const FeatureSequence& seq, const AbxItem& item) {
  seq.validate();
  item.validate();
  if (item.file_id != seq.utterance_id)
    throw InvariantError("item file_id '" + item.file_id +
                         "' does not match sequence '" + seq.utterance_id + "'");
  // Frame i covers time i*shift; keep onset <= i*shift < offset. The small
  // epsilon absorbs decimal timestamps that are not exactly representable.
  const double shift = seq.frame_shift;
  const double eps = 1e-9;
  auto first = static_cast<Eigen::Index>(std::ceil(item.onset / shift - eps));
  auto end = static_cast<Eigen::Index>(std::ceil(item.offset / shift - eps));
  first = std::max<Eigen::Index>(first, 0);
  end = std::min(end, seq.frames.rows());
  if (first >= end)
    throw InvariantError("item " + item.file_id + " [" +
                         std::to_string(item.onset) + ", " +
                         std::to_string(item.offset) +
                         "): empty slice after rounding");
  FeatureSequence out;
  out.frames = seq.frames.middleRows(first, end - first);
  out.frame_shift = seq.frame_shift;
  out.utterance_id = seq.utterance_id;
  return out;
}

}  // namespace zrseval
