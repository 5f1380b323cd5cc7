#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ovtrack/association.hpp"
#include "ovtrack/metrics.hpp"
#include "ovtrack/types.hpp"
#include "ovtrack/vocabulary.hpp"

namespace ovtrack {

/// Detector blackout for one identity: frames [start, start + length) are
/// removed from both the ground truth and the detections.
struct OcclusionWindow {
  int identity = 0;
  int start = 0;
  int length = 0;
};

struct ScenarioConfig {
  int videos = 1;
  int frames_per_video = 20;
  int identities_per_video = 4;
  int embed_dim = 32;
  int classes = 4;
  double embed_noise = 0.0;  // appearance corruption stdev
  double fn_rate = 0.0;      // per-state detection drop probability
  double fp_rate = 0.0;      // per-identity-slot clutter probability
  double box_jitter = 0.0;   // uniform +- jitter on box coordinates, px
  std::vector<OcclusionWindow> occlusions;
  std::uint64_t seed = 0;

  void validate() const;
};

struct VideoDetections {
  std::string video;
  std::vector<std::vector<Detection>> frames;
};

/// A synthesized evaluation problem: ground truth, corrupted detections,
/// the vocabulary used for the text embeddings, and the clean per-identity
/// appearance latents.
struct Scenario {
  std::vector<Annotation> ground_truth;
  std::vector<VideoDetections> detections;
  ClassVocabulary vocab;
  std::map<int, std::vector<double>> identity_latents;
};

/// Identities move on linear, non-overlapping trajectories; appearance
/// latents are mutually near-orthogonal unit vectors per video; observed
/// embeddings add Gaussian noise before renormalization. False negatives,
/// clutter and box jitter are applied per config. Deterministic given the
/// seed.
Scenario generate_scenario(const ScenarioConfig& cfg);

struct EndToEndResult {
  TetaReport teta;
  TrackMapReport track_map;
  std::vector<TrackRecord> records;
};

/// generate_scenario -> track_video per video -> evaluation against the
/// scenario's own ground truth.
EndToEndResult run_end_to_end(const ScenarioConfig& cfg,
                              const AssociationConfig& assoc_cfg,
                              const ClassifierConfig& cls_cfg,
                              const TetaConfig& teta_cfg);

}  // namespace ovtrack
