// End-to-end checks of the zrseval binary. The binary path arrives as
// argv[1] from ctest.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

static std::string g_bin;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("zrseval_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, std::string* stdout_text = nullptr) {
  const fs::path out = fs::temp_directory_path() /
                       ("zrseval_out_" + std::to_string(std::random_device{}()));
  const std::string cmd = g_bin + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (stdout_text) {
    std::ifstream in(out);
    std::ostringstream ss;
    ss << in.rdbuf();
    *stdout_text = ss.str();
  }
  fs::remove(out);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("unknown subcommand exits 2") {
  CHECK(run_cli("bogus") == 2);
  CHECK(run_cli("") == 2);
}

TEST_CASE("abx fixture with separability 1.0 evaluates to error 0") {
  TempDir tmp;
  REQUIRE(run_cli("gen-fixture --kind abx --separability 1.0 --seed 7 --out " +
                  tmp.path.string()) == 0);
  std::string out;
  REQUIRE(run_cli("abx --features " + (tmp.path / "features").string() +
                      " --items " + (tmp.path / "fixture.item").string() +
                      " --condition within --report " +
                      (tmp.path / "abx.json").string(),
                  &out) == 0);
  const json j = json::parse(out);
  CHECK(j["error_rate"].get<double>() == 0.0);
  CHECK(fs::exists(tmp.path / "abx.json"));
}

TEST_CASE("lexical fixture with planted win fraction") {
  TempDir tmp;
  REQUIRE(run_cli("gen-fixture --kind lexical --pairs 400 --win-fraction 0.75"
                  " --seed 3 --out " + tmp.path.string()) == 0);
  std::string out;
  REQUIRE(run_cli("lexical --scores " + (tmp.path / "scores.txt").string() +
                      " --gold " + (tmp.path / "gold.txt").string() +
                      " --ci 200 --seed 5",
                  &out) == 0);
  const json j = json::parse(out);
  CHECK(j["overall"].get<double>() == 0.75);
  CHECK(j["n_pairs"].get<int>() == 400);
  CHECK(j.contains("ci95"));
}

TEST_CASE("semantic fixture with planted monotone map scores 100") {
  TempDir tmp;
  REQUIRE(run_cli("gen-fixture --kind semantic --subsets 6,9 --seed 11 --out " +
                  tmp.path.string()) == 0);
  std::string out;
  REQUIRE(run_cli("semantic --features " + (tmp.path / "features").string() +
                      " --gold " + (tmp.path / "gold.txt").string() +
                      " --pool max",
                  &out) == 0);
  const json j = json::parse(out);
  CHECK(j["unweighted"].get<double>() == doctest::Approx(100.0));
  CHECK(j["weighted"].get<double>() == doctest::Approx(100.0));
}

TEST_CASE("mfcc subcommand produces 39-dim features from generated audio") {
  TempDir tmp;
  REQUIRE(run_cli("gen-fixture --kind audio --samples 16000 --seed 2 --out " +
                  tmp.path.string()) == 0);
  REQUIRE(run_cli("mfcc --in " + (tmp.path / "fixture.wav").string() +
                  " --out " + (tmp.path / "fixture.txt").string() +
                  " --format text") == 0);
  std::ifstream in(tmp.path / "fixture.txt");
  std::string first_line;
  REQUIRE(std::getline(in, first_line));
  std::istringstream iss(first_line);
  int cols = 0;
  std::string tok;
  while (iss >> tok) ++cols;
  CHECK(cols == 39);
}

TEST_CASE("quantize subcommand fits and assigns deterministically") {
  TempDir tmp;
  REQUIRE(run_cli("gen-fixture --kind abx --separability 0 --phones 2"
                  " --speakers 2 --tokens 3 --dim 8 --seed 5 --out " +
                  tmp.path.string()) == 0);
  std::string a, b;
  const std::string cmd = "--seed 9 quantize --features " +
                          (tmp.path / "features").string() +
                          " --k 4 --assign " + (tmp.path / "pt.txt").string();
  REQUIRE(run_cli(cmd, &a) == 0);
  REQUIRE(run_cli(cmd, &b) == 0);
  CHECK(a == b);
  std::ifstream pt(tmp.path / "pt.txt");
  std::string line;
  REQUIRE(std::getline(pt, line));
  CHECK(line.find("item_") == 0);
}

TEST_CASE("validate exits 1 on an incomplete submission") {
  TempDir tmp;
  CHECK(run_cli("validate " + tmp.path.string()) == 1);
}

TEST_CASE("report subcommand merges metric outputs") {
  TempDir tmp;
  fs::create_directories(tmp.path / "results");
  {
    std::ofstream out(tmp.path / "results" / "phonetic__dev__within_clean.json");
    out << R"({"error_rate": 0.08})";
    std::ofstream lex(tmp.path / "results" / "lexical__dev__overall.json");
    lex << R"({"overall": 0.61})";
  }
  {
    std::ofstream m(tmp.path / "manifest.txt");
    m << "gpu_count=3\nwall_hours=24\ntrain_data=ls,100,0,0\n";
  }
  std::string out;
  REQUIRE(run_cli("report --in " + (tmp.path / "results").string() +
                      " --manifest " + (tmp.path / "manifest.txt").string() +
                      " --csv " + (tmp.path / "r.csv").string(),
                  &out) == 0);
  const json j = json::parse(out);
  CHECK(j["budget_gpu_hours"].get<double>() == 72.0);
  CHECK(j["cells"]["phonetic/dev/within_clean"]["value"].get<double>() == 0.08);
  CHECK(j["cells"]["lexical/dev/overall"]["value"].get<double>() == 0.61);
  CHECK(fs::exists(tmp.path / "r.csv"));
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') {
    g_bin = argv[1];
    --argc;
    ++argv;
  } else {
    g_bin = "./zrseval";
  }
  doctest::Context context(argc, argv);
  return context.run();
}
