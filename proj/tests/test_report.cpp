#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "zrseval/featio.hpp"
#include "zrseval/fixture.hpp"
#include "zrseval/report.hpp"

using namespace zrseval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("zrseval_report_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SubmissionManifest sample_manifest() {
  SubmissionManifest m;
  m.track = "low_budget";
  m.gpu_count = 3;
  m.wall_hours = 24.0;
  m.train_data.push_back({"librispeech-100", 100.0, 0, 0.0});
  m.description = "baseline run";
  return m;
}

void write_complete_submission(const fs::path& dir) {
  write_manifest(dir / "manifest.txt", sample_manifest());
  AbxFixtureParams ap;
  ap.n_phones = 2;
  ap.n_speakers = 2;
  ap.tokens_per_cell = 2;
  ap.mean_frames = 4;
  ap.dim = 3;
  const AbxFixture abx = make_abx_fixture(ap);
  fs::create_directories(dir / "phonetic" / "features");
  for (const auto& [id, seq] : abx.features)
    write_feature_file(dir / "phonetic" / "features" / (id + ".zrf"), seq,
                       FeatureFormat::kBinary);
  write_item_file(dir / "phonetic" / "dev.item", abx.items);
  write_scored_fixture(dir / "lexical", make_scored_fixture(10, 0.5, false, 1));
  write_scored_fixture(dir / "syntactic",
                       make_scored_fixture(10, 0.5, true, 2));
  SemanticFixtureParams sp;
  sp.subset_sizes = {4};
  write_semantic_fixture(dir / "semantic", make_semantic_fixture(sp));
}

}  // namespace

TEST_CASE("budget arithmetic and track classification") {
  SubmissionManifest m = sample_manifest();
  SUBCASE("3 GPUs x 24 h is the low-budget figure") {
    const BudgetResult r = compute_budget(m);
    CHECK(r.gpu_hours == 72.0);
    CHECK(r.track_advice == "track-A-compatible");
  }
  SUBCASE("0 GPUs is legal") {
    m.gpu_count = 0;
    m.wall_hours = 50.0;
    CHECK(compute_budget(m).gpu_hours == 0.0);
  }
  SUBCASE("5 GPUs x 33 h is the high-budget figure") {
    m.gpu_count = 5;
    m.wall_hours = 33.0;
    const BudgetResult r = compute_budget(m);
    CHECK(r.gpu_hours == 165.0);
    CHECK(r.track_advice == "track-B");
  }
  SUBCASE("product exactness on rationals") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> g(0, 64);
    std::uniform_int_distribution<int> num(0, 1000);
    for (int i = 0; i < 100; ++i) {
      m.gpu_count = g(rng);
      m.wall_hours = num(rng) / 8.0;
      CHECK(compute_budget(m).gpu_hours == m.gpu_count * m.wall_hours);
    }
  }
}

TEST_CASE("manifest round-trip and validation") {
  TempDir tmp;
  const SubmissionManifest m = sample_manifest();
  write_manifest(tmp.path / "m.txt", m);
  const SubmissionManifest back = load_manifest(tmp.path / "m.txt");
  CHECK(back.track == "low_budget");
  CHECK(back.gpu_count == 3);
  CHECK(back.wall_hours == 24.0);
  REQUIRE(back.train_data.size() == 1);
  CHECK(back.train_data[0].name == "librispeech-100");
  CHECK(back.train_data[0].speech_hours == 100.0);

  SubmissionManifest bad = m;
  bad.wall_hours = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
  bad = m;
  bad.train_data.clear();
  CHECK_THROWS_AS(bad.validate(), InvariantError);
}

TEST_CASE("manifest passes AIC/BIC through as metadata") {
  TempDir tmp;
  std::ofstream out(tmp.path / "m.txt");
  out << "gpu_count=1\nwall_hours=2\ntrain_data=ls,1,0,0\naic=123.4\n";
  out.close();
  const SubmissionManifest m = load_manifest(tmp.path / "m.txt");
  CHECK(m.extra.at("aic") == "123.4");
}

TEST_CASE("complete submission validates cleanly") {
  TempDir tmp;
  write_complete_submission(tmp.path);
  const ValidationReport report = validate_submission(tmp.path);
  for (const auto& c : report.checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.ok);
  }
  CHECK(report.all_ok());
}

TEST_CASE("missing semantic inputs are flagged, others pass") {
  TempDir tmp;
  write_complete_submission(tmp.path);
  fs::remove_all(tmp.path / "semantic");
  const ValidationReport report = validate_submission(tmp.path);
  CHECK(!report.all_ok());
  for (const auto& c : report.checks) {
    if (c.name == "semantic_inputs" || c.name == "all_conditions_present")
      CHECK(!c.ok);
    else
      CHECK(c.ok);
  }
}

TEST_CASE("manifest invariant violations are flagged, not thrown") {
  TempDir tmp;
  write_complete_submission(tmp.path);
  SubmissionManifest bad = sample_manifest();
  bad.wall_hours = -5.0;
  write_manifest(tmp.path / "manifest.txt", bad);
  const ValidationReport report = validate_submission(tmp.path);
  bool manifest_flagged = false;
  for (const auto& c : report.checks)
    if (c.name == "manifest_valid" && !c.ok) manifest_flagged = true;
  CHECK(manifest_flagged);
}

TEST_CASE("score report assembly, rendering, and round-trips") {
  ScoreReport report;
  report.budget_gpu_hours = 72.0;
  report.track = "track-A-compatible";
  const ReportCell abx{0.0821, kEngineVersion, config_hash("abx-config")};
  report.insert("phonetic", "dev", "within_clean", abx);
  report.insert("lexical", "dev", "overall",
                {0.61, kEngineVersion, config_hash("lex")});
  report.insert("semantic", "test", "weighted_libri",
                {12.55, kEngineVersion, config_hash("sem")});

  SUBCASE("missing cells render as an em dash") {
    const std::string table = render_table(report);
    CHECK(table.find("—") != std::string::npos);
    CHECK(table.find("0.0821") != std::string::npos);
  }
  SUBCASE("duplicate identical insert is idempotent") {
    report.insert("phonetic", "dev", "within_clean", abx);
    CHECK(report.cells.size() == 3);
  }
  SUBCASE("conflicting duplicate names the cell") {
    CHECK_THROWS_WITH_AS(
        report.insert("phonetic", "dev", "within_clean",
                      {0.5, kEngineVersion, config_hash("abx-config")}),
        doctest::Contains("phonetic/dev/within_clean"), InvariantError);
  }
  SUBCASE("JSON round-trip is identity") {
    CHECK(report_from_json(to_json(report)) == report);
  }
  SUBCASE("CSV round-trip is identity") {
    CHECK(report_from_csv(to_csv(report)) == report);
  }
  SUBCASE("insertion order does not matter") {
    ScoreReport other;
    other.budget_gpu_hours = 72.0;
    other.track = "track-A-compatible";
    other.insert("semantic", "test", "weighted_libri",
                 {12.55, kEngineVersion, config_hash("sem")});
    other.insert("lexical", "dev", "overall",
                 {0.61, kEngineVersion, config_hash("lex")});
    other.insert("phonetic", "dev", "within_clean", abx);
    CHECK(other == report);
  }
}

TEST_CASE("config hash is stable and input-sensitive") {
  CHECK(config_hash("a") == config_hash("a"));
  CHECK(config_hash("a") != config_hash("b"));
  CHECK(config_hash("a").size() == 16);
}
