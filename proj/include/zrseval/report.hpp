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

#ifndef ZRSEVAL_REPORT_HPP
#define ZRSEVAL_REPORT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zrseval/types.hpp"

namespace zrseval {

struct TrainDataEntry {
  std::string name;
  double speech_hours = 0.0;
  long image_count = 0;
  double video_hours = 0.0;
};

struct SubmissionManifest {
  std::string track;  // "low_budget" or "high_budget"
  int gpu_count = 0;
  double wall_hours = 0.0;
  std::vector<TrainDataEntry> train_data;
  std::string description;
  // Optional pass-through metadata; never computed here.
  std::map<std::string, std::string> extra;

  void validate() const {
    if (gpu_count < 0) throw InvariantError("manifest: gpu_count must be >= 0");
    if (wall_hours < 0.0)
      throw InvariantError("manifest: wall_hours must be >= 0");
    if (train_data.empty())
      throw InvariantError("manifest: at least one train_data entry required");
  }
};

struct BudgetResult {
  double gpu_hours = 0.0;
  // Advisory classification against the ~100 GPU-hour track boundary.
  std::string track_advice;  // "track-A-compatible" or "track-B"
};

// Line-oriented key=value format; repeated train_data lines of the form
// train_data=name,speech_hours,image_count,video_hours.
SubmissionManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const SubmissionManifest& manifest);

BudgetResult compute_budget(const SubmissionManifest& manifest);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

// Checks manifest presence/parseability and the presence of inputs for all
// four metrics; never throws on a failing check.
ValidationReport validate_submission(const std::filesystem::path& dir);

struct ReportCell {
  double value = 0.0;
  std::string module_version;
  std::string config_hash;
};

// Cells keyed by (metric, split, column) matching the benchmark table
// layout: phonetic within/across x clean/other, lexical, syntactic,
// semantic unweighted/weighted x synth/libri.
struct ScoreReport {
  std::map<std::string, ReportCell> cells;  // key "metric/split/column"
  std::optional<double> budget_gpu_hours;
  std::string track;

  // Throws on a conflicting duplicate cell.
  void insert(const std::string& metric, const std::string& split,
              const std::string& column, const ReportCell& cell);

  bool operator==(const ScoreReport&) const = default;
};

bool operator==(const ReportCell& a, const ReportCell& b);

std::string to_json(const ScoreReport& report);
ScoreReport report_from_json(const std::string& json_text);
std::string to_csv(const ScoreReport& report);
ScoreReport report_from_csv(const std::string& csv_text);
std::string render_table(const ScoreReport& report);

// Stable short hash for recording the producing configuration in cells.
std::string config_hash(const std::string& config_text);

inline const char* kEngineVersion = "zrseval-1.0.0";

}  // namespace zrseval

#endif  // ZRSEVAL_REPORT_HPP
