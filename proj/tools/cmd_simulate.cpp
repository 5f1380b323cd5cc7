#include <cstdio>
#include <filesystem>
#include <string>

#include "commands.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/io.hpp"
#include "ovtrack/simulate.hpp"

namespace ovtrack::cli {

namespace {

OcclusionWindow parse_occlusion(const std::string& text) {
  OcclusionWindow window;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ParseError("occlusion must look like identity:start:length, got '" +
                     text + "'");
  }
  try {
    window.identity = std::stoi(text.substr(0, first));
    window.start = std::stoi(text.substr(first + 1, second - first - 1));
    window.length = std::stoi(text.substr(second + 1));
  } catch (const std::exception&) {
    throw ParseError("occlusion must look like identity:start:length, got '" +
                     text + "'");
  }
  return window;
}

}  // namespace

int run_simulate(const SimulateOptions& opt) {
  ScenarioConfig cfg;
  cfg.videos = opt.videos;
  cfg.frames_per_video = opt.frames;
  cfg.identities_per_video = opt.identities;
  cfg.embed_dim = opt.embed_dim;
  cfg.classes = opt.classes;
  cfg.embed_noise = opt.noise;
  cfg.fn_rate = opt.fn;
  cfg.fp_rate = opt.fp;
  cfg.box_jitter = opt.jitter;
  cfg.seed = opt.seed;
  for (const auto& text : opt.occlusions) {
    cfg.occlusions.push_back(parse_occlusion(text));
  }

  const Scenario scenario = generate_scenario(cfg);

  std::filesystem::create_directories(opt.out_dir);
  const auto dir = std::filesystem::path(opt.out_dir);

  std::vector<DetectionFrame> frames;
  for (const auto& video : scenario.detections) {
    for (std::size_t t = 0; t < video.frames.size(); ++t) {
      DetectionFrame frame;
      frame.video = video.video;
      frame.frame = static_cast<int>(t);
      frame.detections = video.frames[t];
      frames.push_back(std::move(frame));
    }
  }
  write_detections((dir / "detections.jsonl").string(), frames);

  GroundTruthData gt;
  gt.annotations = scenario.ground_truth;
  for (const auto& entry : scenario.vocab.classes) {
    gt.categories.push_back({entry.class_id, entry.name});
  }
  write_ground_truth((dir / "gt.json").string(), gt);
  write_vocabulary((dir / "vocab.json").string(), scenario.vocab);

  std::printf("wrote %s {detections.jsonl, gt.json, vocab.json}: "
              "%d video(s), %zu gt states\n",
              opt.out_dir.c_str(), cfg.videos, scenario.ground_truth.size());
  return 0;
}

}  // namespace ovtrack::cli
