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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zrseval/abx.hpp"
#include "zrseval/featio.hpp"
#include "zrseval/fixture.hpp"
#include "zrseval/mfcc.hpp"
#include "zrseval/probmetrics.hpp"
#include "zrseval/quantize.hpp"
#include "zrseval/report.hpp"
#include "zrseval/semantic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zrseval;

namespace {

void emit(const json& j, const std::string& report_path) {
  const std::string text = j.dump(2);
  std::cout << text << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw ParseError("cannot write " + report_path);
    out << text << "\n";
  }
}

FeatureFormat parse_format(const std::string& name) {
  if (name == "text") return FeatureFormat::kText;
  if (name == "binary") return FeatureFormat::kBinary;
  throw ParseError("unknown feature format '" + name + "'");
}

FrameDistance parse_metric(const std::string& name) {
  if (name == "cosine") return FrameDistance::kCosine;
  if (name == "angular") return FrameDistance::kAngular;
  if (name == "euclidean") return FrameDistance::kEuclidean;
  throw ParseError("unknown frame metric '" + name + "'");
}

PoolMode parse_pool(const std::string& name) {
  if (name == "max") return PoolMode::kMax;
  if (name == "mean") return PoolMode::kMean;
  if (name == "last") return PoolMode::kLast;
  throw ParseError("unknown pooling mode '" + name + "'");
}

json paired_json(const PairedAccuracy& acc) {
  json j;
  j["overall"] = acc.overall;
  j["n_pairs"] = acc.n_pairs;
  if (!acc.by_paradigm.empty()) j["by_paradigm"] = acc.by_paradigm;
  if (!acc.by_category.empty()) j["by_category"] = acc.by_category;
  return j;
}

double extract_cell_value(const json& j, const std::string& column) {
  if (j.contains("value")) return j["value"].get<double>();
  if (j.contains("error_rate")) return j["error_rate"].get<double>();
  if (j.contains("overall")) return j["overall"].get<double>();
  if (column.rfind("unweighted", 0) == 0 && j.contains("unweighted"))
    return j["unweighted"].get<double>();
  if (column.rfind("weighted", 0) == 0 && j.contains("weighted"))
    return j["weighted"].get<double>();
  throw ParseError("no usable value for column '" + column + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"zrseval - zero-shot spoken language model evaluation engine"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  int threads = 1;
  std::string global_format = "binary";
  app.add_option("--seed", seed, "Global RNG seed");
  app.add_option("--threads", threads, "Worker thread count");
  app.add_option("--format", global_format, "Feature file format: text|binary");

  // --- mfcc ---
  auto* mfcc_cmd = app.add_subcommand("mfcc", "Extract 39-dim MFCC features");
  std::string mfcc_in, mfcc_out;
  double sample_rate = 16000.0, window_ms = 25.0, hop_ms = 10.0;
  bool cmvn = false;
  mfcc_cmd->add_option("--in", mfcc_in, "WAV file or directory of WAV files")
      ->required();
  mfcc_cmd->add_option("--out", mfcc_out, "Output feature file or directory")
      ->required();
  mfcc_cmd->add_option("--sample-rate", sample_rate, "Expected sample rate");
  mfcc_cmd->add_option("--window-ms", window_ms, "Analysis window (ms)");
  mfcc_cmd->add_option("--hop-ms", hop_ms, "Hop (ms)");
  mfcc_cmd->add_flag("--cmvn", cmvn, "Per-utterance mean/variance normalization");

  // --- quantize ---
  auto* quant_cmd = app.add_subcommand("quantize", "K-means codebook + pseudo-text");
  std::string quant_features, quant_codebook_out, quant_codebook_in,
      quant_assign_out;
  int quant_k = 50, quant_max_iter = 300;
  double quant_tol = 1e-4;
  bool quant_dedup = false;
  quant_cmd->add_option("--features", quant_features, "Feature directory")
      ->required();
  quant_cmd->add_option("--k", quant_k, "Number of clusters");
  quant_cmd->add_option("--out", quant_codebook_out, "Codebook output path");
  quant_cmd->add_option("--codebook", quant_codebook_in,
                        "Existing codebook (skip fitting)");
  quant_cmd->add_option("--assign", quant_assign_out,
                        "Pseudo-text output path");
  quant_cmd->add_option("--max-iter", quant_max_iter, "Lloyd iteration cap");
  quant_cmd->add_option("--tol", quant_tol, "Centroid displacement tolerance");
  quant_cmd->add_flag("--dedup", quant_dedup, "Collapse consecutive repeats");

  // --- abx ---
  auto* abx_cmd = app.add_subcommand("abx", "Phonetic ABX discriminability");
  std::string abx_features, abx_items, abx_condition = "within",
              abx_metric = "cosine", abx_probe = "pooled", abx_report;
  abx_cmd->add_option("--features", abx_features, "Feature directory")
      ->required();
  abx_cmd->add_option("--items", abx_items, "Item file")->required();
  abx_cmd->add_option("--condition", abx_condition, "within|across");
  abx_cmd->add_option("--metric", abx_metric, "cosine|angular|euclidean");
  abx_cmd->add_option("--probe", abx_probe, "Across-speaker probe: pooled|sampled");
  abx_cmd->add_option("--report", abx_report, "Report JSON path");

  // --- lexical / syntactic ---
  std::string pm_scores, pm_gold, pm_report;
  std::size_t pm_ci = 0;
  auto add_paired = [&](const char* name, const char* desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--scores", pm_scores, "Scored stimulus file")->required();
    cmd->add_option("--gold", pm_gold, "Gold pair file")->required();
    cmd->add_option("--ci", pm_ci, "Bootstrap resample count (0 = off)");
    cmd->add_option("--report", pm_report, "Report JSON path");
    return cmd;
  };
  auto* lex_cmd = add_paired("lexical", "Spot-the-word accuracy");
  auto* syn_cmd = add_paired("syntactic", "Acceptability accuracy");

  // --- semantic ---
  auto* sem_cmd = app.add_subcommand("semantic", "Semantic similarity score");
  std::string sem_features, sem_gold, sem_pool = "max", sem_report;
  sem_cmd->add_option("--features", sem_features, "Feature directory")
      ->required();
  sem_cmd->add_option("--gold", sem_gold, "Similarity judgement file")
      ->required();
  sem_cmd->add_option("--pool", sem_pool, "max|mean|last");
  sem_cmd->add_option("--report", sem_report, "Report JSON path");

  // --- validate ---
  auto* val_cmd = app.add_subcommand("validate", "Validate a submission directory");
  std::string val_dir;
  val_cmd->add_option("dir", val_dir, "Submission directory")->required();

  // --- report ---
  auto* rep_cmd = app.add_subcommand("report", "Assemble the score report");
  std::string rep_in, rep_manifest, rep_out, rep_csv;
  rep_cmd->add_option("--in", rep_in,
                      "Directory of metric__split__column.json files")
      ->required();
  rep_cmd->add_option("--manifest", rep_manifest, "Submission manifest");
  rep_cmd->add_option("--out", rep_out, "Report JSON path");
  rep_cmd->add_option("--csv", rep_csv, "Report CSV path");

  // --- gen-fixture ---
  auto* gen_cmd = app.add_subcommand("gen-fixture", "Generate synthetic test corpora");
  std::string gen_kind, gen_out = ".", gen_separability = "1.0",
              gen_subsets = "10,20,30";
  int gen_phones = 4, gen_speakers = 4, gen_tokens = 3, gen_frames = 10,
      gen_dim = 39;
  std::size_t gen_pairs = 100, gen_samples = 16000;
  double gen_win_fraction = 0.75, gen_planted_rho = 1.0;
  bool gen_constant = false;
  gen_cmd->add_option("--kind", gen_kind, "abx|lexical|syntactic|semantic|audio")
      ->required();
  gen_cmd->add_option("--out", gen_out, "Output directory");
  gen_cmd->add_option("--separability", gen_separability,
                      "ABX category separability (0, positive, or inf)");
  gen_cmd->add_flag("--constant", gen_constant, "All-constant ABX features");
  gen_cmd->add_option("--phones", gen_phones, "ABX phone categories");
  gen_cmd->add_option("--speakers", gen_speakers, "ABX speakers");
  gen_cmd->add_option("--tokens", gen_tokens, "Tokens per (phone, speaker)");
  gen_cmd->add_option("--frames", gen_frames, "Mean frames per token");
  gen_cmd->add_option("--dim", gen_dim, "Feature dimension");
  gen_cmd->add_option("--pairs", gen_pairs, "Pair count (lexical/syntactic)");
  gen_cmd->add_option("--win-fraction", gen_win_fraction,
                      "Planted win fraction (lexical/syntactic)");
  gen_cmd->add_option("--subsets", gen_subsets,
                      "Comma-separated semantic subset sizes");
  gen_cmd->add_option("--planted-rho", gen_planted_rho,
                      "Planted semantic correlation (1.0 = exact)");
  gen_cmd->add_option("--samples", gen_samples, "Audio sample count");

  // Let global options (--seed, --threads, --format) appear after the
  // subcommand name as well.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  const FeatureFormat format = parse_format(global_format);

  if (mfcc_cmd->parsed()) {
    MfccConfig cfg;
    cfg.sample_rate = sample_rate;
    cfg.window_len = window_ms / 1000.0;
    cfg.hop = hop_ms / 1000.0;
    cfg.mean_var_normalize = cmvn;
    auto process = [&](const fs::path& wav, const fs::path& out_path) {
      const PcmSignal sig = load_wav(wav);
      if (sig.sample_rate != cfg.sample_rate)
        throw InvariantError(wav.string() + ": sample rate " +
                             std::to_string(sig.sample_rate) +
                             " does not match --sample-rate");
      FeatureSequence feats = extract_mfcc(sig, cfg);
      feats.utterance_id = wav.stem().string();
      write_feature_file(out_path, feats, format);
    };
    if (fs::is_directory(mfcc_in)) {
      fs::create_directories(mfcc_out);
      const std::string ext = format == FeatureFormat::kBinary ? ".zrf" : ".txt";
      for (const auto& entry : fs::directory_iterator(mfcc_in))
        if (entry.path().extension() == ".wav")
          process(entry.path(),
                  fs::path(mfcc_out) / (entry.path().stem().string() + ext));
    } else {
      process(mfcc_in, mfcc_out);
    }
    return 0;
  }

  if (quant_cmd->parsed()) {
    const auto features = load_feature_dir(quant_features, format);
    Codebook cb;
    if (!quant_codebook_in.empty()) {
      cb = load_codebook(quant_codebook_in);
    } else {
      Eigen::Index total = 0, dim = 0;
      for (const auto& [id, seq] : features) {
        total += seq.rows();
        dim = seq.cols();
      }
      Eigen::MatrixXd data(total, dim);
      Eigen::Index row = 0;
      for (const auto& [id, seq] : features) {
        data.middleRows(row, seq.rows()) = seq.frames.cast<double>();
        row += seq.rows();
      }
      cb = kmeans_fit(data, quant_k, seed, quant_max_iter, quant_tol, threads);
      if (!quant_codebook_out.empty()) write_codebook(quant_codebook_out, cb);
    }
    if (!quant_assign_out.empty()) {
      std::vector<PseudoText> lines;
      for (const auto& [id, seq] : features)
        lines.push_back(kmeans_assign(cb, seq, quant_dedup));
      write_pseudo_text(quant_assign_out, lines);
    }
    json j;
    j["k"] = cb.k;
    j["iterations"] = cb.iterations_run;
    j["inertia"] = cb.training_inertia;
    j["seed"] = cb.seed;
    emit(j, "");
    return 0;
  }

  if (abx_cmd->parsed()) {
    AbxTask task;
    task.items = load_item_file(abx_items);
    if (abx_condition == "within")
      task.condition = AbxCondition::kWithinSpeaker;
    else if (abx_condition == "across")
      task.condition = AbxCondition::kAcrossSpeaker;
    else
      throw ParseError("unknown condition '" + abx_condition + "'");
    task.frame_distance = parse_metric(abx_metric);
    task.probe_mode = abx_probe == "sampled" ? AcrossProbeMode::kSampledSpeaker
                                             : AcrossProbeMode::kPooled;
    task.seed = seed;
    const auto features = load_feature_dir(abx_features, format);
    const AbxScore score = evaluate_abx(features, task, threads);
    json j;
    j["condition"] = abx_condition;
    j["metric"] = abx_metric;
    j["error_rate"] = score.error_rate;
    j["n_triples"] = score.n_triples;
    j["skipped_cells"] = score.skipped_cells;
    j["probe_mode"] = score.probe_mode;
    j["by_phone_pair"] = score.by_phone_pair;
    emit(j, abx_report);
    return 0;
  }

  if (lex_cmd->parsed() || syn_cmd->parsed()) {
    const auto scores = load_scored_file(pm_scores);
    const auto gold = load_gold_pair_file(pm_gold);
    const PairedAccuracy acc = paired_accuracy(scores, gold);
    json j = paired_json(acc);
    j["metric"] = lex_cmd->parsed() ? "lexical" : "syntactic";
    if (pm_ci > 0) {
      const auto [lo, hi] = bootstrap_ci(scores, gold, pm_ci, seed);
      j["ci95"] = {lo, hi};
    }
    emit(j, pm_report);
    return 0;
  }

  if (sem_cmd->parsed()) {
    const auto features = load_feature_dir(sem_features, format);
    const auto gold = load_similarity_file(sem_gold);
    const SemanticScore score =
        evaluate_semantic(features, gold, parse_pool(sem_pool));
    json j;
    j["unweighted"] = score.unweighted;
    j["weighted"] = score.weighted;
    j["scale"] = score.scale_x100 ? "x100" : "raw";
    j["similarity_convention"] = score.similarity_convention;
    json subsets = json::object();
    for (const auto& [id, s] : score.by_subset)
      subsets[id] = {{"rho", s.rho}, {"n", s.n}};
    j["by_subset"] = subsets;
    j["excluded_subsets"] = score.excluded_subsets;
    emit(j, sem_report);
    return 0;
  }

  if (val_cmd->parsed()) {
    const ValidationReport report = validate_submission(val_dir);
    json j;
    json checks = json::array();
    for (const auto& c : report.checks)
      checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    j["checks"] = checks;
    j["ok"] = report.all_ok();
    emit(j, "");
    return report.all_ok() ? 0 : 1;
  }

  if (rep_cmd->parsed()) {
    ScoreReport report;
    if (!rep_manifest.empty()) {
      const SubmissionManifest manifest = load_manifest(rep_manifest);
      const BudgetResult budget = compute_budget(manifest);
      report.budget_gpu_hours = budget.gpu_hours;
      report.track = budget.track_advice;
    }
    for (const auto& entry : fs::directory_iterator(rep_in)) {
      if (entry.path().extension() != ".json") continue;
      const std::string stem = entry.path().stem().string();
      // Expected naming: metric__split__column.json
      const auto p1 = stem.find("__");
      const auto p2 = stem.find("__", p1 + 2);
      if (p1 == std::string::npos || p2 == std::string::npos) {
        std::cerr << "skipping " << entry.path() << " (unrecognized name)\n";
        continue;
      }
      const std::string metric = stem.substr(0, p1);
      const std::string split = stem.substr(p1 + 2, p2 - p1 - 2);
      const std::string column = stem.substr(p2 + 2);
      std::ifstream in(entry.path());
      json j = json::parse(in);
      ReportCell cell;
      cell.value = extract_cell_value(j, column);
      cell.module_version = kEngineVersion;
      cell.config_hash = config_hash(j.dump());
      report.insert(metric, split, column, cell);
    }
    const std::string text = to_json(report);
    std::cout << text << "\n";
    std::cerr << render_table(report);
    if (!rep_out.empty()) {
      std::ofstream out(rep_out);
      out << text << "\n";
    }
    if (!rep_csv.empty()) {
      std::ofstream out(rep_csv);
      out << to_csv(report);
    }
    return 0;
  }

  if (gen_cmd->parsed()) {
    const fs::path out_dir(gen_out);
    if (gen_kind == "abx") {
      AbxFixtureParams p;
      p.n_phones = gen_phones;
      p.n_speakers = gen_speakers;
      p.tokens_per_cell = gen_tokens;
      p.dim = gen_dim;
      p.mean_frames = gen_frames;
      p.separability = gen_separability == "inf"
                           ? std::numeric_limits<double>::infinity()
                           : std::stod(gen_separability);
      p.constant_features = gen_constant;
      p.seed = seed;
      write_abx_fixture(out_dir, make_abx_fixture(p));
    } else if (gen_kind == "lexical" || gen_kind == "syntactic") {
      write_scored_fixture(out_dir,
                           make_scored_fixture(gen_pairs, gen_win_fraction,
                                               gen_kind == "syntactic", seed));
    } else if (gen_kind == "semantic") {
      SemanticFixtureParams p;
      p.dim = gen_dim;
      p.planted_rho = gen_planted_rho;
      p.seed = seed;
      p.subset_sizes.clear();
      std::istringstream sizes(gen_subsets);
      std::string tok;
      while (std::getline(sizes, tok, ','))
        p.subset_sizes.push_back(std::stoul(tok));
      write_semantic_fixture(out_dir, make_semantic_fixture(p));
    } else if (gen_kind == "audio") {
      fs::create_directories(out_dir);
      PcmSignal sig;
      sig.samples = make_audio_fixture(gen_samples, seed);
      sig.sample_rate = 16000.0;
      write_wav(out_dir / "fixture.wav", sig);
    } else {
      std::cerr << "unknown fixture kind '" << gen_kind << "'\n";
      return 2;
    }
    std::cerr << "fixture written to " << out_dir << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
