#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "ovtrack/association.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/vecmath.hpp"

using namespace ovtrack;

namespace {

Detection make_det(const std::string& video, int frame, BoundingBox box,
                   double score, std::vector<double> appearance,
                   std::vector<double> text = {}) {
  Detection det;
  det.video = video;
  det.frame = frame;
  det.box = box;
  det.score = score;
  det.appearance = std::move(appearance);
  if (!text.empty()) det.text_embed = std::move(text);
  return det;
}

AssociationConfig loose_config() {
  AssociationConfig cfg;
  cfg.beta = 0.2;  // unit-norm embeddings dilute the bi-softmax quickly
  return cfg;
}

}  // namespace

TEST_CASE("cosine basics") {
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0}) ==
        doctest::Approx(1.0));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
        doctest::Approx(0.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(cosine(std::vector<double>{inv_sqrt2, inv_sqrt2},
               std::vector<double>{1, 0}) ==
        doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(
      cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), InputError);
}

TEST_CASE("bisoftmax matches the scalar evaluations") {
  SUBCASE("single pair is exactly one") {
    const auto s = bisoftmax_scores({{0.3, 0.7}}, {{-0.2, 0.5}});
    REQUIRE(s.size() == 1);
    CHECK(s[0][0] == 1.0);
  }
  SUBCASE("two detections, one track") {
    // s(t, q1) = (e/(e+1) + 1)/2, s(t, q2) = (1/(e+1) + 1)/2.
    const auto s = bisoftmax_scores({{1, 0}, {0, 1}}, {{1, 0}});
    REQUIRE(s.size() == 1);
    CHECK(s[0][0] == doctest::Approx(0.8655292893150024).epsilon(1e-12));
    CHECK(s[0][1] == doctest::Approx(0.6344707106849976).epsilon(1e-12));
  }
  SUBCASE("empty inputs give an empty matrix") {
    CHECK(bisoftmax_scores({}, {{1.0}}).empty());
    CHECK(bisoftmax_scores({{1.0}}, {}).empty());
  }
}

TEST_CASE("bisoftmax entries live in (0, 1] and extra detections never help") {
  std::mt19937_64 gen(41);
  for (int round = 0; round < 100; ++round) {
    std::uniform_int_distribution<int> count(1, 6);
    const int n_det = count(gen), n_trk = count(gen);
    std::vector<std::vector<double>> dets, trks;
    for (int i = 0; i < n_det; ++i) dets.push_back(testing::random_unit(gen, 8));
    for (int i = 0; i < n_trk; ++i) trks.push_back(testing::random_unit(gen, 8));

    const auto s = bisoftmax_scores(dets, trks);
    for (const auto& row : s) {
      for (double v : row) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
      }
    }

    auto extended = dets;
    extended.push_back(testing::random_unit(gen, 8));
    const auto s2 = bisoftmax_scores(extended, trks);
    for (int t = 0; t < n_trk; ++t) {
      for (int r = 0; r < n_det; ++r) {
        CHECK(s2[t][r] <= s[t][r] + 1e-12);
      }
    }
  }
}

TEST_CASE("association config validation") {
  AssociationConfig cfg;
  cfg.validate();
  cfg.beta = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.beta = 0.5;
  cfg.memory_frames = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.memory_frames = 10;
  cfg.nms_iou = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("associate_frame track management") {
  const AssociationConfig cfg = loose_config();

  SUBCASE("confident unmatched detection opens track 0") {
    TrackStore store;
    const std::vector<Detection> dets{
        make_det("v", 0, {10, 10, 8, 8}, 0.9, {1.0, 0.0})};
    const auto report = associate_frame(store, dets, 0, cfg);
    REQUIRE(report.assignments.size() == 1);
    CHECK(report.assignments[0].outcome == DetOutcome::kCreated);
    CHECK(report.assignments[0].track_id == 0);
    CHECK(store.active.size() == 1);
  }

  SUBCASE("detection below gamma is discarded") {
    TrackStore store;
    const std::vector<Detection> dets{
        make_det("v", 0, {10, 10, 8, 8}, 1e-5, {1.0, 0.0})};
    const auto report = associate_frame(store, dets, 0, cfg);
    CHECK(report.assignments[0].outcome == DetOutcome::kDiscarded);
    CHECK(store.active.empty());
  }

  SUBCASE("match against an existing track") {
    TrackStore store;
    associate_frame(store, {make_det("v", 0, {10, 10, 8, 8}, 0.9, {1.0, 0.0})},
                    0, cfg);
    AssociationConfig strict = cfg;
    strict.beta = 0.5;
    strict.beta_obj = 0.3;
    const auto report = associate_frame(
        store, {make_det("v", 1, {11, 10, 8, 8}, 0.9, {1.0, 0.0})}, 1, strict);
    CHECK(report.assignments[0].outcome == DetOutcome::kMatched);
    CHECK(report.assignments[0].track_id == 0);
    CHECK(report.assignments[0].match_score == 1.0);
    CHECK(store.active.at(0).states.size() == 2);
  }

  SUBCASE("out-of-order frames are rejected") {
    TrackStore store;
    associate_frame(store, {make_det("v", 3, {10, 10, 8, 8}, 0.9, {1.0, 0.0})},
                    3, cfg);
    CHECK_THROWS_AS(
        associate_frame(store,
                        {make_det("v", 3, {10, 10, 8, 8}, 0.9, {1.0, 0.0})}, 3,
                        cfg),
        InputError);
  }

  SUBCASE("a track absorbs at most one detection per frame") {
    TrackStore store;
    associate_frame(store, {make_det("v", 0, {10, 10, 8, 8}, 0.9, {1.0, 0.0})},
                    0, cfg);
    const std::vector<Detection> twins{
        make_det("v", 1, {10, 10, 8, 8}, 0.9, {1.0, 0.0}),
        make_det("v", 1, {40, 40, 8, 8}, 0.8, {1.0, 0.0})};
    const auto report = associate_frame(store, twins, 1, cfg);
    int matched = 0;
    for (const auto& slot : report.assignments) {
      if (slot.outcome == DetOutcome::kMatched) ++matched;
    }
    CHECK(matched == 1);
    CHECK(report.assignments[0].outcome == DetOutcome::kMatched);
    CHECK(report.assignments[1].outcome == DetOutcome::kCreated);
  }
}

TEST_CASE("temporal_vote tie rules") {
  Track track;
  track.states[0] = {{0, 0, 1, 1}, 0.8, 0};

  SUBCASE("strict majority") {
    track.class_history = {{0, 3, 0.9}, {1, 3, 0.8}, {2, 7, 0.95}};
    CHECK(temporal_vote(track).class_id == 3);
  }
  SUBCASE("count tie falls to mean confidence") {
    track.class_history = {{0, 3, 0.9}, {1, 7, 0.95}};
    CHECK(temporal_vote(track).class_id == 7);
  }
  SUBCASE("full tie falls to the lower class id") {
    track.class_history = {{0, 3, 0.9}, {1, 7, 0.9}};
    CHECK(temporal_vote(track).class_id == 3);
  }
  SUBCASE("confidence is the mean state score") {
    track.states[1] = {{0, 0, 1, 1}, 0.6, 0};
    track.class_history = {{0, 3, 0.9}};
    CHECK(temporal_vote(track).track_confidence == doctest::Approx(0.7));
  }
  SUBCASE("empty history throws") {
    track.class_history.clear();
    CHECK_THROWS_AS(temporal_vote(track), InputError);
  }
}

TEST_CASE("track_video basics") {
  const ClassVocabulary vocab = testing::two_class_vocab();
  const ClassifierConfig cls{0.07};
  const AssociationConfig cfg = loose_config();

  SUBCASE("two well-separated detections give two single-state tracks") {
    const std::vector<std::vector<Detection>> frames{
        {make_det("v", 0, {10, 10, 8, 8}, 0.9, {1, 0, 0}, {0, 1, 0}),
         make_det("v", 0, {60, 60, 8, 8}, 0.8, {0, 1, 0}, {0, 0, 1})}};
    const auto tracks = track_video(frames, vocab, cls, cfg);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].states.size() == 1);
    CHECK(tracks[1].states.size() == 1);
    CHECK(tracks[0].voted_class_id == 0);
    CHECK(tracks[1].voted_class_id == 1);
  }

  SUBCASE("re-identification across a short gap keeps the id") {
    std::vector<std::vector<Detection>> frames;
    for (int t : {0, 1, 2, 5}) {  // absent frames 3 and 4
      frames.push_back(
          {make_det("v", t, {10.0 + t, 10, 8, 8}, 0.9, {1, 0, 0})});
    }
    const auto tracks = track_video(frames, vocab, cls, cfg);
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].states.size() == 4);
  }

  SUBCASE("a gap longer than the memory splits the id") {
    AssociationConfig short_mem = cfg;
    short_mem.memory_frames = 10;
    std::vector<std::vector<Detection>> frames;
    for (int t : {0, 1, 2, 18}) {  // 15 missed frames
      frames.push_back(
          {make_det("v", t, {10.0 + t, 10, 8, 8}, 0.9, {1, 0, 0})});
    }
    const auto tracks = track_video(frames, vocab, cls, short_mem);
    CHECK(tracks.size() == 2);
  }
}

TEST_CASE("track_video is bit-stable under detection permutations") {
  std::mt19937_64 gen(71);
  const ClassVocabulary vocab = testing::two_class_vocab();
  const ClassifierConfig cls{0.07};
  const AssociationConfig cfg = loose_config();

  for (int round = 0; round < 20; ++round) {
    std::vector<std::vector<Detection>> frames;
    double score = 0.95;
    for (int t = 0; t < 5; ++t) {
      std::vector<Detection> dets;
      for (int i = 0; i < 4; ++i) {
        dets.push_back(make_det("v", t,
                                {20.0 + 60.0 * i, 20.0 + 3.0 * t, 10, 10},
                                score, testing::random_unit(gen, 6)));
        score -= 0.001;  // all-distinct scores
      }
      frames.push_back(std::move(dets));
    }

    const auto baseline = track_records(track_video(frames, vocab, cls, cfg), "v");

    auto shuffled = frames;
    for (auto& dets : shuffled) std::shuffle(dets.begin(), dets.end(), gen);
    const auto permuted =
        track_records(track_video(shuffled, vocab, cls, cfg), "v");

    CHECK(baseline == permuted);

    std::set<int> ids;
    for (const auto& rec : baseline) ids.insert(rec.track_id);
    for (int id : ids) CHECK(id < static_cast<int>(baseline.size()));
  }
}
