#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "zrseval/abx.hpp"
#include "zrseval/fixture.hpp"

using namespace zrseval;

namespace {

FeatureSequence make_seq(const Eigen::MatrixXd& m, const std::string& id = "u") {
  FeatureSequence seq;
  seq.frames = m.cast<float>();
  seq.frame_shift = 0.01;
  seq.utterance_id = id;
  return seq;
}

Eigen::MatrixXd random_frames(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m(i, j) = static_cast<float>(gauss(rng));  // single precision, as stored
  return m;
}

AbxTask task_from(const AbxFixture& fixture, AbxCondition condition,
                  FrameDistance metric = FrameDistance::kCosine) {
  AbxTask task;
  task.items = fixture.items;
  task.condition = condition;
  task.frame_distance = metric;
  return task;
}

std::vector<oracles::OracleItem> oracle_items(const AbxFixture& fixture) {
  std::vector<oracles::OracleItem> out;
  for (const auto& item : fixture.items) {
    oracles::OracleItem oi;
    oi.frames = fixture.features.at(item.file_id).frames.cast<double>();
    oi.phone = item.center_phone;
    oi.context = item.prev_phone + "_" + item.next_phone;
    oi.speaker = item.speaker;
    out.push_back(std::move(oi));
  }
  return out;
}

}  // namespace

TEST_CASE("dtw of a sequence with itself is zero") {
  std::mt19937_64 rng(1);
  for (FrameDistance metric : {FrameDistance::kCosine, FrameDistance::kAngular,
                               FrameDistance::kEuclidean}) {
    const FeatureSequence x = make_seq(random_frames(rng, 6, 5));
    CHECK(dtw_distance(x, x, metric) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("single-frame dtw equals the frame distance") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd u = random_frames(rng, 1, 7);
  const Eigen::MatrixXd v = random_frames(rng, 1, 7);
  for (FrameDistance metric : {FrameDistance::kCosine, FrameDistance::kAngular,
                               FrameDistance::kEuclidean}) {
    const double expected = frame_distance(u.row(0).transpose(),
                                           v.row(0).transpose(), metric);
    CHECK(dtw_distance(make_seq(u), make_seq(v), metric) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dtw matches exhaustive path enumeration on short sequences") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd x = random_frames(rng, len(rng), 4);
    const Eigen::MatrixXd y = random_frames(rng, len(rng), 4);
    for (auto [metric, ometric] :
         {std::pair{FrameDistance::kCosine, oracles::Metric::kCosine},
          std::pair{FrameDistance::kEuclidean, oracles::Metric::kEuclidean}}) {
      const double got = dtw_distance(make_seq(x), make_seq(y), metric);
      const double want = oracles::brute_dtw(x, y, ometric);
      CHECK(std::abs(got - want) < 1e-9);
    }
  }
}

TEST_CASE("dtw rejects dimension mismatch and empty input") {
  std::mt19937_64 rng(4);
  const FeatureSequence x = make_seq(random_frames(rng, 3, 4));
  const FeatureSequence y = make_seq(random_frames(rng, 3, 5));
  CHECK_THROWS_AS(dtw_distance(x, y, FrameDistance::kCosine), InvariantError);
  FeatureSequence empty;
  empty.frames.resize(0, 4);
  empty.frame_shift = 0.01;
  CHECK_THROWS_AS(dtw_distance(empty, x, FrameDistance::kCosine),
                  InvariantError);
}

TEST_CASE("zero-norm frames have cosine distance 1 to anything") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd v(3);
  v << 1, 2, 3;
  CHECK(frame_distance(zero, v, FrameDistance::kCosine) == 1.0);
  CHECK(frame_distance(zero, v, FrameDistance::kAngular) == 1.0);
}

TEST_CASE("score_triple decision rule") {
  std::mt19937_64 rng(5);
  const FeatureSequence x = make_seq(random_frames(rng, 4, 3));
  const FeatureSequence b = make_seq(random_frames(rng, 4, 3));
  SUBCASE("identical a and x wins") {
    CHECK(score_triple(x, b, x, FrameDistance::kCosine) == 0.0);
  }
  SUBCASE("a and b both identical to x ties") {
    CHECK(score_triple(x, x, x, FrameDistance::kCosine) == 0.5);
  }
  SUBCASE("matches independently computed dtw distances") {
    for (int trial = 0; trial < 20; ++trial) {
      const FeatureSequence a2 = make_seq(random_frames(rng, 3, 3));
      const FeatureSequence b2 = make_seq(random_frames(rng, 3, 3));
      const FeatureSequence x2 = make_seq(random_frames(rng, 3, 3));
      const double dax = oracles::brute_dtw(a2.frames.cast<double>(),
                                            x2.frames.cast<double>(),
                                            oracles::Metric::kCosine);
      const double dbx = oracles::brute_dtw(b2.frames.cast<double>(),
                                            x2.frames.cast<double>(),
                                            oracles::Metric::kCosine);
      const double expected = dax < dbx ? 0.0 : (dax > dbx ? 1.0 : 0.5);
      CHECK(score_triple(a2, b2, x2, FrameDistance::kCosine) == expected);
    }
  }
}

TEST_CASE("perfectly separated categories give error 0") {
  AbxFixtureParams p;
  p.separability = std::numeric_limits<double>::infinity();
  p.n_phones = 3;
  p.n_speakers = 2;
  p.tokens_per_cell = 3;
  AbxFixture fixture = make_abx_fixture(p);
  for (auto condition :
       {AbxCondition::kWithinSpeaker, AbxCondition::kAcrossSpeaker}) {
    const AbxScore score =
        evaluate_abx(fixture.features, task_from(fixture, condition));
    CHECK(score.error_rate == 0.0);
  }
}

TEST_CASE("all-constant features tie every triple at 0.5") {
  AbxFixtureParams p;
  p.constant_features = true;
  p.n_phones = 3;
  p.n_speakers = 2;
  p.tokens_per_cell = 3;
  AbxFixture fixture = make_abx_fixture(p);
  const AbxScore score = evaluate_abx(
      fixture.features, task_from(fixture, AbxCondition::kWithinSpeaker));
  CHECK(score.error_rate == 0.5);
}

TEST_CASE("small tasks match the exhaustive triple oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    AbxFixtureParams p;
    p.separability = 0.0;  // pure noise, non-trivial credits
    p.n_phones = 2;
    p.n_speakers = 2;
    p.tokens_per_cell = 2;  // 8 items
    p.mean_frames = 4;
    p.dim = 3;
    p.seed = seed;
    AbxFixture fixture = make_abx_fixture(p);
    const auto oitems = oracle_items(fixture);
    for (auto [condition, across] :
         {std::pair{AbxCondition::kWithinSpeaker, false},
          std::pair{AbxCondition::kAcrossSpeaker, true}}) {
      const AbxScore score =
          evaluate_abx(fixture.features, task_from(fixture, condition));
      const double want =
          oracles::exhaustive_abx(oitems, across, oracles::Metric::kCosine);
      CHECK(std::abs(score.error_rate - want) < 1e-12);
    }
  }
}

TEST_CASE("label swap leaves the error rate unchanged") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 2;
  p.n_speakers = 2;
  p.tokens_per_cell = 3;
  p.mean_frames = 5;
  p.dim = 4;
  p.seed = 11;
  AbxFixture fixture = make_abx_fixture(p);
  const AbxScore before = evaluate_abx(
      fixture.features, task_from(fixture, AbxCondition::kWithinSpeaker));
  for (auto& item : fixture.items) {
    if (item.center_phone == "p0")
      item.center_phone = "p1";
    else if (item.center_phone == "p1")
      item.center_phone = "p0";
  }
  const AbxScore after = evaluate_abx(
      fixture.features, task_from(fixture, AbxCondition::kWithinSpeaker));
  CHECK(before.error_rate == doctest::Approx(after.error_rate).epsilon(1e-12));
}

TEST_CASE("scale invariance under cosine and angular metrics") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 2;
  p.n_speakers = 2;
  p.tokens_per_cell = 3;
  p.mean_frames = 5;
  p.dim = 4;
  p.seed = 13;
  AbxFixture fixture = make_abx_fixture(p);
  AbxFixture scaled = fixture;
  for (auto& [id, seq] : scaled.features) seq.frames *= 3.7f;
  for (auto metric : {FrameDistance::kCosine, FrameDistance::kAngular}) {
    const AbxScore a = evaluate_abx(
        fixture.features, task_from(fixture, AbxCondition::kWithinSpeaker, metric));
    const AbxScore b = evaluate_abx(
        scaled.features, task_from(scaled, AbxCondition::kWithinSpeaker, metric));
    CHECK(a.error_rate == b.error_rate);
  }
}

TEST_CASE("repeating every item line does not change the error rate") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 2;
  p.n_speakers = 1;
  p.tokens_per_cell = 3;
  p.mean_frames = 4;
  p.dim = 3;
  p.seed = 17;
  AbxFixture fixture = make_abx_fixture(p);
  const AbxScore before = evaluate_abx(
      fixture.features, task_from(fixture, AbxCondition::kWithinSpeaker));

  AbxFixture doubled = fixture;
  for (const auto& item : fixture.items) doubled.items.push_back(item);
  const AbxScore after = evaluate_abx(
      doubled.features, task_from(doubled, AbxCondition::kWithinSpeaker));
  CHECK(before.error_rate == after.error_rate);
  CHECK(before.n_triples == after.n_triples);
}

TEST_CASE("distance cache does not change results") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 3;
  p.n_speakers = 2;
  p.tokens_per_cell = 2;
  p.mean_frames = 4;
  p.dim = 3;
  p.seed = 19;
  AbxFixture fixture = make_abx_fixture(p);
  for (auto condition :
       {AbxCondition::kWithinSpeaker, AbxCondition::kAcrossSpeaker}) {
    const AbxTask task = task_from(fixture, condition);
    const AbxScore cached = evaluate_abx(fixture.features, task, 1, true);
    const AbxScore direct = evaluate_abx(fixture.features, task, 1, false);
    CHECK(cached.error_rate == direct.error_rate);
    CHECK(cached.n_triples == direct.n_triples);
  }
}

TEST_CASE("thread count does not change results") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 3;
  p.n_speakers = 3;
  p.tokens_per_cell = 3;
  p.mean_frames = 5;
  p.dim = 6;
  p.seed = 23;
  AbxFixture fixture = make_abx_fixture(p);
  const AbxTask task = task_from(fixture, AbxCondition::kAcrossSpeaker);
  const AbxScore one = evaluate_abx(fixture.features, task, 1);
  const AbxScore eight = evaluate_abx(fixture.features, task, 8);
  CHECK(one.error_rate == eight.error_rate);  // bitwise
  CHECK(one.n_triples == eight.n_triples);
}

TEST_CASE("empty task throws") {
  AbxFixtureParams p;
  p.n_phones = 2;
  p.n_speakers = 1;
  p.tokens_per_cell = 1;  // within needs 2 a-tokens: nothing valid
  p.mean_frames = 4;
  p.dim = 3;
  AbxFixture fixture = make_abx_fixture(p);
  CHECK_THROWS_AS(evaluate_abx(fixture.features,
                               task_from(fixture, AbxCondition::kWithinSpeaker)),
                  InvariantError);
}

TEST_CASE("sampled-speaker probe mode is deterministic for a fixed seed") {
  AbxFixtureParams p;
  p.separability = 0.0;
  p.n_phones = 2;
  p.n_speakers = 4;
  p.tokens_per_cell = 2;
  p.mean_frames = 4;
  p.dim = 3;
  p.seed = 29;
  AbxFixture fixture = make_abx_fixture(p);
  AbxTask task = task_from(fixture, AbxCondition::kAcrossSpeaker);
  task.probe_mode = AcrossProbeMode::kSampledSpeaker;
  task.seed = 101;
  const AbxScore a = evaluate_abx(fixture.features, task);
  const AbxScore b = evaluate_abx(fixture.features, task);
  CHECK(a.error_rate == b.error_rate);
  CHECK(a.probe_mode == "sampled");
}
