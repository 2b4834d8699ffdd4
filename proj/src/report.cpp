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

#include "zrseval/report.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "zrseval/featio.hpp"

namespace zrseval {

namespace fs = std::filesystem;
using nlohmann::json;

SubmissionManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  SubmissionManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    try {
      if (key == "track") {
        if (val != "low_budget" && val != "high_budget")
          throw ParseError("track must be low_budget or high_budget");
        m.track = val;
      } else if (key == "gpu_count") {
        m.gpu_count = std::stoi(val);
      } else if (key == "wall_hours") {
        m.wall_hours = std::stod(val);
      } else if (key == "description") {
        m.description = val;
      } else if (key == "train_data") {
        TrainDataEntry e;
        std::istringstream fields(val);
        std::string tok;
        if (!std::getline(fields, e.name, ','))
          throw ParseError("train_data needs name,speech_hours,image_count,video_hours");
        if (std::getline(fields, tok, ',')) e.speech_hours = std::stod(tok);
        if (std::getline(fields, tok, ',')) e.image_count = std::stol(tok);
        if (std::getline(fields, tok, ',')) e.video_hours = std::stod(tok);
        m.train_data.push_back(std::move(e));
      } else {
        m.extra[key] = val;  // AIC/BIC etc. pass through untouched
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return m;
}

void write_manifest(const fs::path& path, const SubmissionManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out.precision(17);
  if (!manifest.track.empty()) out << "track=" << manifest.track << "\n";
  out << "gpu_count=" << manifest.gpu_count << "\n";
  out << "wall_hours=" << manifest.wall_hours << "\n";
  if (!manifest.description.empty())
    out << "description=" << manifest.description << "\n";
  for (const auto& e : manifest.train_data)
    out << "train_data=" << e.name << ',' << e.speech_hours << ','
        << e.image_count << ',' << e.video_hours << "\n";
  for (const auto& [k, v] : manifest.extra) out << k << '=' << v << "\n";
}

BudgetResult compute_budget(const SubmissionManifest& manifest) {
  manifest.validate();
  BudgetResult r;
  r.gpu_hours = static_cast<double>(manifest.gpu_count) * manifest.wall_hours;
  r.track_advice = r.gpu_hours <= 100.0 ? "track-A-compatible" : "track-B";
  return r;
}

namespace {

bool dir_nonempty(const fs::path& dir) {
  if (!fs::is_directory(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) return true;
  return false;
}

bool has_item_file(const fs::path& dir) {
  if (!fs::is_directory(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".item") return true;
  return false;
}

CheckResult check(const std::string& name, bool ok, const std::string& detail) {
  return CheckResult{name, ok, detail};
}

}  // namespace

ValidationReport validate_submission(const fs::path& dir) {
  ValidationReport report;
  const fs::path manifest_path = dir / "manifest.txt";
  bool manifest_ok = false;
  SubmissionManifest manifest;
  if (!fs::exists(manifest_path)) {
    report.checks.push_back(check("manifest_present", false,
                                  manifest_path.string() + " missing"));
  } else {
    report.checks.push_back(check("manifest_present", true, ""));
    try {
      manifest = load_manifest(manifest_path);
      manifest.validate();
      manifest_ok = true;
      report.checks.push_back(check("manifest_valid", true, ""));
    } catch (const std::exception& e) {
      report.checks.push_back(check("manifest_valid", false, e.what()));
    }
  }
  report.checks.push_back(check(
      "budget_stated", manifest_ok && manifest.wall_hours >= 0.0,
      manifest_ok ? "gpu_hours=" + std::to_string(compute_budget(manifest).gpu_hours)
                  : "manifest unavailable"));
  report.checks.push_back(check(
      "training_data_described", manifest_ok && !manifest.train_data.empty(),
      manifest_ok ? std::to_string(manifest.train_data.size()) + " entries"
                  : "manifest unavailable"));

  const bool phonetic = dir_nonempty(dir / "phonetic" / "features") &&
                        has_item_file(dir / "phonetic");
  report.checks.push_back(check("phonetic_inputs", phonetic,
                                phonetic ? "" : "phonetic inputs absent"));
  auto scored_pair = [&](const std::string& metric) {
    const fs::path scores = dir / metric / "scores.txt";
    const fs::path gold = dir / metric / "gold.txt";
    if (!fs::exists(scores) || !fs::exists(gold)) return false;
    try {
      load_scored_file(scores);
      load_gold_pair_file(gold);
      return true;
    } catch (const std::exception&) {
      return false;
    }
  };
  const bool lexical = scored_pair("lexical");
  report.checks.push_back(
      check("lexical_inputs", lexical, lexical ? "" : "lexical inputs absent"));
  const bool syntactic = scored_pair("syntactic");
  report.checks.push_back(check("syntactic_inputs", syntactic,
                                syntactic ? "" : "syntactic inputs absent"));
  bool semantic = dir_nonempty(dir / "semantic" / "features");
  if (semantic) {
    try {
      load_similarity_file(dir / "semantic" / "gold.txt");
    } catch (const std::exception&) {
      semantic = false;
    }
  }
  report.checks.push_back(check("semantic_inputs", semantic,
                                semantic ? "" : "semantic inputs absent"));
  report.checks.push_back(check("all_conditions_present",
                                phonetic && lexical && syntactic && semantic,
                                ""));
  return report;
}

bool operator==(const ReportCell& a, const ReportCell& b) {
  return a.value == b.value && a.module_version == b.module_version &&
         a.config_hash == b.config_hash;
}

void ScoreReport::insert(const std::string& metric, const std::string& split,
                         const std::string& column, const ReportCell& cell) {
  const std::string key = metric + "/" + split + "/" + column;
  auto [it, inserted] = cells.emplace(key, cell);
  if (!inserted && !(it->second == cell))
    throw InvariantError("score report: conflicting duplicate cell '" + key + "'");
}

std::string to_json(const ScoreReport& report) {
  json j;
  j["engine"] = kEngineVersion;
  if (report.budget_gpu_hours) j["budget_gpu_hours"] = *report.budget_gpu_hours;
  if (!report.track.empty()) j["track"] = report.track;
  json cells = json::object();
  for (const auto& [key, cell] : report.cells) {
    cells[key] = {{"value", cell.value},
                  {"version", cell.module_version},
                  {"config_hash", cell.config_hash}};
  }
  j["cells"] = cells;
  return j.dump(2);
}

ScoreReport report_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  ScoreReport report;
  if (j.contains("budget_gpu_hours"))
    report.budget_gpu_hours = j["budget_gpu_hours"].get<double>();
  if (j.contains("track")) report.track = j["track"].get<std::string>();
  for (const auto& [key, cell] : j.at("cells").items()) {
    ReportCell c;
    c.value = cell.at("value").get<double>();
    c.module_version = cell.at("version").get<std::string>();
    c.config_hash = cell.at("config_hash").get<std::string>();
    report.cells[key] = c;
  }
  return report;
}

std::string to_csv(const ScoreReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "metric,split,column,value,version,config_hash\n";
  for (const auto& [key, cell] : report.cells) {
    const auto s1 = key.find('/');
    const auto s2 = key.find('/', s1 + 1);
    out << key.substr(0, s1) << ',' << key.substr(s1 + 1, s2 - s1 - 1) << ','
        << key.substr(s2 + 1) << ',' << cell.value << ','
        << cell.module_version << ',' << cell.config_hash << '\n';
  }
  if (report.budget_gpu_hours)
    out << "budget,,gpu_hours," << *report.budget_gpu_hours << ",,\n";
  if (!report.track.empty()) out << "track,," << report.track << ",,,\n";
  return out.str();
}

ScoreReport report_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty input");
  ScoreReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    while (fields.size() < 6) fields.emplace_back();
    if (fields[0] == "budget") {
      report.budget_gpu_hours = std::stod(fields[3]);
      continue;
    }
    if (fields[0] == "track") {
      report.track = fields[2];
      continue;
    }
    ReportCell cell;
    try {
      cell.value = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw ParseError("csv:" + std::to_string(line_no) + ": bad value '" +
                       fields[3] + "'");
    }
    cell.module_version = fields[4];
    cell.config_hash = fields[5];
    report.insert(fields[0], fields[1], fields[2], cell);
  }
  return report;
}

std::string render_table(const ScoreReport& report) {
  static const std::vector<std::pair<std::string, std::string>> columns = {
      {"phonetic", "within_clean"},      {"phonetic", "within_other"},
      {"phonetic", "across_clean"},      {"phonetic", "across_other"},
      {"lexical", "overall"},            {"syntactic", "overall"},
      {"semantic", "unweighted_synth"},  {"semantic", "unweighted_libri"},
      {"semantic", "weighted_synth"},    {"semantic", "weighted_libri"},
  };
  static const std::vector<std::string> headers = {
      "phon-w-clean", "phon-w-other", "phon-a-clean", "phon-a-other",
      "lexical",      "syntactic",    "sem-u-synth",  "sem-u-libri",
      "sem-w-synth",  "sem-w-libri"};
  std::ostringstream out;
  out << std::left << std::setw(6) << "set";
  for (const auto& h : headers) out << std::right << std::setw(14) << h;
  out << '\n';
  for (const std::string split : {"dev", "test"}) {
    out << std::left << std::setw(6) << split;
    for (const auto& [metric, column] : columns) {
      const std::string key = metric + "/" + split + "/" + column;
      auto it = report.cells.find(key);
      if (it == report.cells.end()) {
        out << std::right << std::setw(14) << "—";
      } else {
        std::ostringstream v;
        v << std::fixed << std::setprecision(4) << it->second.value;
        out << std::right << std::setw(14) << v.str();
      }
    }
    out << '\n';
  }
  if (report.budget_gpu_hours)
    out << "budget: " << *report.budget_gpu_hours << " GPU-hours"
        << (report.track.empty() ? "" : " (" + report.track + ")") << '\n';
  return out.str();
}

std::string config_hash(const std::string& config_text) {
  // FNV-1a, hex-encoded; stability matters, cryptographic strength does not.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace zrseval
