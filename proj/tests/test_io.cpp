#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <tuple>

#include "helpers.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/io.hpp"

using namespace ovtrack;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ovt_io_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::vector<DetectionFrame> random_detection_frames(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_videos(1, 3), n_frames(1, 4),
      n_dets(0, 4);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::bernoulli_distribution with_text(0.5);

  std::vector<DetectionFrame> frames;
  const int videos = n_videos(gen);
  for (int v = 0; v < videos; ++v) {
    const std::string video = "vid_" + std::to_string(v);
    int frame_no = 0;
    const int count = n_frames(gen);
    for (int f = 0; f < count; ++f) {
      frame_no += 1 + (gen() % 3);
      DetectionFrame frame;
      frame.video = video;
      frame.frame = frame_no;
      const int dets = n_dets(gen);
      for (int d = 0; d < dets; ++d) {
        Detection det;
        det.video = video;
        det.frame = frame_no;
        det.box = testing::random_box(gen);
        det.score = score(gen);
        det.appearance = testing::random_unit(gen, 6);
        if (with_text(gen)) det.text_embed = testing::random_unit(gen, 4);
        frame.detections.push_back(std::move(det));
      }
      frames.push_back(std::move(frame));
    }
  }
  return frames;
}

ClassVocabulary random_vocab(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_classes(1, 5);
  ClassVocabulary vocab;
  vocab.background_embed = testing::random_unit(gen, 5);
  const int count = n_classes(gen);
  for (int c = 0; c < count; ++c) {
    vocab.classes.push_back({c * 3 + 1, "name_" + std::to_string(c),
                             testing::random_unit(gen, 5),
                             c % 2 ? ClassSplit::kNovel : ClassSplit::kBase});
  }
  return vocab;
}

GroundTruthData random_gt(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_annos(0, 12), track(0, 3), frame(0, 5),
      cls(0, 4);
  GroundTruthData gt;
  std::set<std::pair<int, std::pair<std::string, int>>> seen;
  const int count = n_annos(gen);
  for (int i = 0; i < count; ++i) {
    Annotation anno{track(gen), "vid", frame(gen), testing::random_box(gen),
                    cls(gen)};
    if (!seen.insert({anno.track_id, {anno.video, anno.frame}}).second) {
      continue;
    }
    gt.annotations.push_back(std::move(anno));
  }
  for (int c = 0; c < 5; ++c) gt.categories.push_back({c, "c" + std::to_string(c)});
  return gt;
}

std::vector<TrackRecord> random_tracks(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n(0, 15), track(0, 5), frame(0, 6),
      cls(-1, 4);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<TrackRecord> records;
  std::set<std::tuple<std::string, int, int>> seen;
  const int count = n(gen);
  for (int i = 0; i < count; ++i) {
    TrackRecord rec{"vid", frame(gen), track(gen), testing::random_box(gen),
                    score(gen), cls(gen)};
    if (!seen.insert({rec.video, rec.frame, rec.track_id}).second) continue;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

TEST_CASE("file formats round-trip exactly") {
  TempDir dir;
  std::mt19937_64 gen(1234);
  for (int round = 0; round < 25; ++round) {
    const auto frames = random_detection_frames(gen);
    write_detections(dir.file("d.jsonl"), frames);
    CHECK(read_detections(dir.file("d.jsonl")) == frames);

    const auto vocab = random_vocab(gen);
    write_vocabulary(dir.file("v.json"), vocab);
    CHECK(read_vocabulary(dir.file("v.json")) == vocab);

    const auto gt = random_gt(gen);
    write_ground_truth(dir.file("g.json"), gt);
    CHECK(read_ground_truth(dir.file("g.json")) == gt);

    const auto tracks = random_tracks(gen);
    write_tracks(dir.file("t.jsonl"), tracks);
    CHECK(read_tracks(dir.file("t.jsonl")) == tracks);
  }
}

TEST_CASE("reader normalizes embeddings") {
  TempDir dir;
  std::ofstream out(dir.file("d.jsonl"));
  out << R"({"video":"v","frame":0,"detections":[)"
      << R"({"bbox":[10,10,4,4],"score":0.5,"embed":[3.0,4.0]}]})" << "\n";
  out.close();
  const auto frames = read_detections(dir.file("d.jsonl"));
  REQUIRE(frames.size() == 1);
  REQUIRE(frames[0].detections.size() == 1);
  const auto& embed = frames[0].detections[0].appearance;
  CHECK(embed[0] == doctest::Approx(0.6));
  CHECK(embed[1] == doctest::Approx(0.8));
}

TEST_CASE("parse errors carry the line number") {
  TempDir dir;
  std::ofstream out(dir.file("d.jsonl"));
  out << R"({"video":"v","frame":0,"detections":[]})" << "\n";
  out << "{not json\n";
  out.close();
  try {
    read_detections(dir.file("d.jsonl"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("detection stream contract violations") {
  TempDir dir;

  SUBCASE("non-increasing frames") {
    std::ofstream out(dir.file("d.jsonl"));
    out << R"({"video":"v","frame":1,"detections":[]})" << "\n";
    out << R"({"video":"v","frame":1,"detections":[]})" << "\n";
    out.close();
    CHECK_THROWS_AS(read_detections(dir.file("d.jsonl")), InputError);
  }

  SUBCASE("score out of range") {
    std::ofstream out(dir.file("d.jsonl"));
    out << R"({"video":"v","frame":0,"detections":[)"
        << R"({"bbox":[10,10,4,4],"score":1.5,"embed":[1.0]}]})" << "\n";
    out.close();
    CHECK_THROWS_AS(read_detections(dir.file("d.jsonl")), InputError);
  }

  SUBCASE("embedding dimension drift") {
    std::ofstream out(dir.file("d.jsonl"));
    out << R"({"video":"v","frame":0,"detections":[)"
        << R"({"bbox":[10,10,4,4],"score":0.5,"embed":[1.0,0.0]},)"
        << R"({"bbox":[30,30,4,4],"score":0.5,"embed":[1.0,0.0,0.0]}]})"
        << "\n";
    out.close();
    CHECK_THROWS_AS(read_detections(dir.file("d.jsonl")), InputError);
  }

  SUBCASE("duplicate track rows") {
    std::ofstream out(dir.file("t.jsonl"));
    out << R"({"video":"v","frame":0,"track_id":1,"bbox":[1,1,2,2],"score":0.5,"category_id":0})"
        << "\n";
    out << R"({"video":"v","frame":0,"track_id":1,"bbox":[5,5,2,2],"score":0.4,"category_id":0})"
        << "\n";
    out.close();
    CHECK_THROWS_AS(read_tracks(dir.file("t.jsonl")), InputError);
  }
}

TEST_CASE("group_by_video keeps first-appearance order") {
  std::vector<DetectionFrame> frames;
  frames.push_back({"b", 0, {}});
  frames.push_back({"a", 0, {}});
  frames.push_back({"b", 2, {}});
  const auto grouped = group_by_video(frames);
  REQUIRE(grouped.size() == 2);
  CHECK(grouped[0].first == "b");
  CHECK(grouped[0].second.size() == 2);
  CHECK(grouped[1].first == "a");
}

TEST_CASE("raw grids round-trip through OVTG") {
  TempDir dir;
  LatentGrid grid;
  grid.width = 3;
  grid.height = 2;
  grid.channels = 2;
  // Values representable in f32 survive the raw format bit for bit.
  grid.values = {0.5, -0.25, 1.0, 2.0, -3.5, 0.0,
                 0.125, 7.0, -0.875, 4.0, 0.0625, -1.0};
  write_grid(dir.file("g.ovtg"), grid);
  CHECK(read_grid(dir.file("g.ovtg")) == grid);

  SUBCASE("bad magic is a parse error") {
    std::ofstream out(dir.file("bad.ovtg"), std::ios::binary);
    out << "NOPE";
    out.close();
    CHECK_THROWS_AS(read_grid(dir.file("bad.ovtg")), ParseError);
  }
}

TEST_CASE("png grids quantize but round-trip on the 8-bit lattice") {
  TempDir dir;
  LatentGrid grid;
  grid.width = 16;
  grid.height = 16;
  grid.channels = 1;
  grid.values.resize(256);
  for (int i = 0; i < 256; ++i) {
    grid.values[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / 127.5 - 1.0;
  }
  write_grid(dir.file("g.png"), grid);
  const LatentGrid back = read_grid(dir.file("g.png"));
  CHECK(back == grid);

  SUBCASE("rgb grids survive as well") {
    LatentGrid rgb = LatentGrid::filled(4, 4, 3, 0.0);
    for (std::size_t i = 0; i < rgb.values.size(); ++i) {
      rgb.values[i] = static_cast<double>((i * 5) % 256) / 127.5 - 1.0;
    }
    write_grid(dir.file("rgb.png"), rgb);
    CHECK(read_grid(dir.file("rgb.png")) == rgb);
  }
}

TEST_CASE("masks travel as binary png or raw grids") {
  TempDir dir;
  ForegroundMask mask = ForegroundMask::zeros(4, 3);
  mask.at(1, 1) = 1.0;
  mask.at(3, 2) = 1.0;

  write_mask(dir.file("m.png"), mask);
  CHECK(read_mask(dir.file("m.png")) == mask);

  write_mask(dir.file("m.ovtg"), mask);
  CHECK(read_mask(dir.file("m.ovtg")) == mask);
}
