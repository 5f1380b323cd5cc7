#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ovtrack::cli {

struct TrackOptions {
  std::string detections;
  std::string vocab;
  std::string out;
  double beta = 0.5;
  double gamma = 1e-4;
  double beta_obj = 0.3;
  int memory = 10;
  double cosine_gate = 0.3;
  double nms = 0.5;
  std::string nms_mode = "agnostic";  // agnostic | class
  double lambda = 0.07;
};

struct EvalOptions {
  std::string tracks;
  std::string gt;
  std::string vocab;
  std::string metric = "both";  // teta | trackmap | both
  std::string split = "all";    // all | base | novel
  std::string report;
  double loc_iou = 0.5;
  std::string assoc_counts = "hota";  // hota | tpl
  std::vector<double> thresholds = {0.5, 0.75};
};

struct SimulateOptions {
  std::string out_dir;
  std::uint64_t seed = 0;
  int videos = 1;
  int frames = 20;
  int identities = 4;
  int embed_dim = 32;
  int classes = 4;
  double noise = 0.0;
  double fn = 0.0;
  double fp = 0.0;
  double jitter = 0.0;
  std::vector<std::string> occlusions;  // "identity:start:length"
};

struct GradcheckOptions {
  std::string loss = "all";  // track | aux | all
  std::uint64_t seed = 7;
  int instances = 100;
  int dim = 8;
  double step = 1e-4;
  std::string report;
};

struct HallucinateOptions {
  std::string input;
  std::string mask;
  std::string out;
  double delta0 = 0.75;
  int steps = 50;
  double eta = 0.02;
  std::uint64_t seed = 0;
  bool deterministic = false;
  std::string caption;
};

int run_track(const TrackOptions& opt);
int run_eval(const EvalOptions& opt);
int run_simulate(const SimulateOptions& opt);
int run_gradcheck(const GradcheckOptions& opt);
int run_hallucinate(const HallucinateOptions& opt);

/// Worker cap for per-video parallelism, from OVTRACK_THREADS.
int worker_threads(std::size_t jobs);

}  // namespace ovtrack::cli
