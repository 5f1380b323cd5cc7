#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ovt_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator()(const std::string& name) const {
    return (path / name).string();
  }
};

int run(const std::string& args, const std::string& capture = "") {
  std::string cmd = std::string(OVTRACK_CLI_PATH) + " " + args;
  if (!capture.empty()) cmd += " >" + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_bytes(const std::string& a, const std::string& b) {
  return slurp(a) == slurp(b);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const std::string kTinyVocab = R"({
  "background_embed": [1.0, 0.0, 0.0],
  "classes": [
    {"id": 0, "name": "a", "embed": [0.0, 1.0, 0.0], "split": "base"},
    {"id": 1, "name": "b", "embed": [0.0, 0.0, 1.0], "split": "novel"}
  ]
})";

}  // namespace

TEST_CASE("track handles an empty detection stream") {
  TempDir dir;
  write_text(dir("empty.jsonl"), "");
  write_text(dir("vocab.json"), kTinyVocab);
  CHECK(run("track --detections " + dir("empty.jsonl") + " --vocab " +
            dir("vocab.json") + " --out " + dir("tracks.jsonl")) == 0);
  CHECK(slurp(dir("tracks.jsonl")).empty());
}

TEST_CASE("track reports malformed lines with their number") {
  TempDir dir;
  write_text(dir("bad.jsonl"),
             "{\"video\":\"v\",\"frame\":0,\"detections\":[]}\nnot json\n");
  write_text(dir("vocab.json"), kTinyVocab);
  const int code = run("track --detections " + dir("bad.jsonl") + " --vocab " +
                           dir("vocab.json") + " --out " + dir("t.jsonl"),
                       dir("log.txt"));
  CHECK(code == 2);
  CHECK(slurp(dir("log.txt")).find("line 2") != std::string::npos);
}

TEST_CASE("track rejects text embeddings that do not fit the vocabulary") {
  TempDir dir;
  write_text(dir("d.jsonl"),
             R"({"video":"v","frame":0,"detections":[{"bbox":[10,10,4,4],)"
             R"("score":0.9,"embed":[1.0,0.0],"text_embed":[1.0,0.0]}]})"
             "\n");
  write_text(dir("vocab.json"), kTinyVocab);
  const int code = run("track --detections " + dir("d.jsonl") + " --vocab " +
                           dir("vocab.json") + " --out " + dir("t.jsonl"),
                       dir("log.txt"));
  CHECK(code == 3);
}

TEST_CASE("eval rejects unknown categories") {
  TempDir dir;
  write_text(dir("t.jsonl"),
             R"({"video":"v","frame":0,"track_id":0,"bbox":[10,10,4,4],)"
             R"("score":0.9,"category_id":9})"
             "\n");
  write_text(dir("gt.json"), R"({
    "annotations": [{"track_id":0,"video":"v","frame":0,
                     "bbox":[10,10,4,4],"category_id":0}],
    "categories": [{"id":0,"name":"a"}]})");
  write_text(dir("vocab.json"), kTinyVocab);
  const int code = run("eval --tracks " + dir("t.jsonl") + " --gt " +
                           dir("gt.json") + " --vocab " + dir("vocab.json"),
                       dir("log.txt"));
  CHECK(code == 3);
}

TEST_CASE("simulate, track and eval compose into a perfect run") {
  TempDir dir;
  REQUIRE(run("simulate --out-dir " + dir("sim") +
              " --seed 11 --videos 2 --frames 10 --identities 4",
              dir("log.txt")) == 0);
  REQUIRE(run("track --detections " + dir("sim") + "/detections.jsonl" +
              " --vocab " + dir("sim") + "/vocab.json" + " --out " +
              dir("tracks.jsonl") + " --beta 0.2",
              dir("log.txt")) == 0);
  REQUIRE(run("eval --tracks " + dir("tracks.jsonl") + " --gt " + dir("sim") +
              "/gt.json" + " --vocab " + dir("sim") + "/vocab.json" +
              " --report " + dir("report.json"),
              dir("log.txt")) == 0);

  const auto report = nlohmann::json::parse(slurp(dir("report.json")));
  CHECK(report["teta"]["all"]["teta"].get<double>() == doctest::Approx(1.0));
  CHECK(report["track_map"]["all"]["map"].get<double>() == doctest::Approx(1.0));

  // One emitted identity per simulated one.
  std::set<std::pair<std::string, int>> track_ids;
  std::istringstream rows(slurp(dir("tracks.jsonl")));
  std::string line;
  while (std::getline(rows, line)) {
    if (line.empty()) continue;
    const auto row = nlohmann::json::parse(line);
    track_ids.insert({row["video"].get<std::string>(),
                      row["track_id"].get<int>()});
  }
  CHECK(track_ids.size() == 2 * 4);

  SUBCASE("split selection trims the report") {
    REQUIRE(run("eval --tracks " + dir("tracks.jsonl") + " --gt " + dir("sim") +
                "/gt.json" + " --vocab " + dir("sim") + "/vocab.json" +
                " --split novel --metric teta --report " + dir("novel.json"),
                dir("log.txt")) == 0);
    const auto novel = nlohmann::json::parse(slurp(dir("novel.json")));
    CHECK_FALSE(novel["teta"].contains("all"));
    CHECK(novel["teta"].contains("novel"));
  }
}

TEST_CASE("eval marks empty splits instead of dividing by zero") {
  TempDir dir;
  write_text(dir("t.jsonl"), "");
  // Ground truth only contains the base class 0.
  write_text(dir("gt.json"), R"({
    "annotations": [{"track_id":0,"video":"v","frame":0,
                     "bbox":[10,10,4,4],"category_id":0}],
    "categories": [{"id":0,"name":"a"}]})");
  write_text(dir("vocab.json"), kTinyVocab);
  REQUIRE(run("eval --tracks " + dir("t.jsonl") + " --gt " + dir("gt.json") +
              " --vocab " + dir("vocab.json") + " --report " +
              dir("report.json"),
              dir("log.txt")) == 0);
  const auto report = nlohmann::json::parse(slurp(dir("report.json")));
  CHECK(report["teta"]["novel"]["empty_gt"].get<bool>());
  CHECK(report["teta"]["all"]["teta"].get<double>() == 0.0);
}

TEST_CASE("gradient check reports errors below the gate") {
  TempDir dir;
  REQUIRE(run("gradcheck --loss track --seed 7 --report " + dir("g.json"),
              dir("log.txt")) == 0);
  const auto report = nlohmann::json::parse(slurp(dir("g.json")));
  CHECK(report["track"]["max_rel_err"].get<double>() < 1e-4);
}

TEST_CASE("commands are byte-deterministic under a fixed seed") {
  TempDir dir;
  for (const char* tag : {"a", "b"}) {
    REQUIRE(run(std::string("simulate --out-dir ") + dir(tag) +
                " --seed 5 --videos 1 --frames 8 --identities 3 --fn 0.2 "
                "--fp 0.2 --noise 0.3 --jitter 1.0",
                dir("log.txt")) == 0);
  }
  for (const char* name : {"detections.jsonl", "gt.json", "vocab.json"}) {
    CHECK(same_bytes(dir("a") + "/" + name, dir("b") + "/" + name));
  }

  for (const char* tag : {"t1.jsonl", "t2.jsonl"}) {
    REQUIRE(run("track --detections " + dir("a") + "/detections.jsonl" +
                " --vocab " + dir("a") + "/vocab.json --out " + dir(tag) +
                " --beta 0.2",
                dir("log.txt")) == 0);
  }
  CHECK(same_bytes(dir("t1.jsonl"), dir("t2.jsonl")));

  SUBCASE("worker count does not change the bytes") {
    const std::string cmd =
        std::string("OVTRACK_THREADS=3 ") + OVTRACK_CLI_PATH +
        " track --detections " + dir("a") + "/detections.jsonl --vocab " +
        dir("a") + "/vocab.json --out " + dir("t3.jsonl") +
        " --beta 0.2 >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(same_bytes(dir("t1.jsonl"), dir("t3.jsonl")));
  }

  for (const char* tag : {"r1.json", "r2.json"}) {
    REQUIRE(run("eval --tracks " + dir("t1.jsonl") + " --gt " + dir("a") +
                "/gt.json --vocab " + dir("a") + "/vocab.json --report " +
                dir(tag),
                dir("log.txt")) == 0);
  }
  CHECK(same_bytes(dir("r1.json"), dir("r2.json")));
}

TEST_CASE("hallucinate converges to the input under an empty mask") {
  TempDir dir;
  {
    std::ofstream out(dir("in.ovtg"), std::ios::binary);
    out.write("OVTG", 4);
    auto put = [&out](std::uint32_t v) {
      char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff),
                   static_cast<char>(v >> 16 & 0xff),
                   static_cast<char>(v >> 24 & 0xff)};
      out.write(b, 4);
    };
    put(4);
    put(4);
    put(1);
    for (int i = 0; i < 16; ++i) {
      const float f = 0.1f * static_cast<float>(i % 7) - 0.3f;
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put(bits);
    }
  }
  REQUIRE(run("hallucinate --input " + dir("in.ovtg") + " --out " +
              dir("out1.ovtg") + " --deterministic --seed 9",
              dir("log.txt")) == 0);
  REQUIRE(run("hallucinate --input " + dir("in.ovtg") + " --out " +
              dir("out2.ovtg") + " --deterministic --seed 9",
              dir("log.txt")) == 0);
  CHECK(same_bytes(dir("out1.ovtg"), dir("out2.ovtg")));

  const std::string in_bytes = slurp(dir("in.ovtg"));
  const std::string out_bytes = slurp(dir("out1.ovtg"));
  REQUIRE(in_bytes.size() == out_bytes.size());
  for (std::size_t i = 16; i + 4 <= in_bytes.size(); i += 4) {
    float a, b;
    std::memcpy(&a, in_bytes.data() + i, 4);
    std::memcpy(&b, out_bytes.data() + i, 4);
    CHECK(std::abs(a - b) < 1e-2);
  }
}

TEST_CASE("unknown flags exit with the parse code") {
  TempDir dir;
  CHECK(run("track --nonsense", dir("log.txt")) == 2);
  CHECK(run("simulate --out-dir " + dir("x") + " --fn 1.5",
            dir("log.txt")) == 3);
}
