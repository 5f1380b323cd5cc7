#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ovtrack/diffusion.hpp"
#include "ovtrack/types.hpp"
#include "ovtrack/vocabulary.hpp"

namespace ovtrack {

/// Detections of one frame of one video; the on-disk form is JSONL with
/// one such object per line. Frames of a video must appear in strictly
/// increasing order.
struct DetectionFrame {
  std::string video;
  int frame = 0;
  std::vector<Detection> detections;

  bool operator==(const DetectionFrame&) const = default;
};

struct Category {
  int id = 0;
  std::string name;

  bool operator==(const Category&) const = default;
};

/// Ground-truth annotations plus the category table, stored as one JSON
/// document.
struct GroundTruthData {
  std::vector<Annotation> annotations;
  std::vector<Category> categories;

  bool operator==(const GroundTruthData&) const = default;
};

// Detection stream (JSONL). Embeddings are L2-normalized while reading.
std::vector<DetectionFrame> read_detections(const std::string& path);
void write_detections(const std::string& path,
                      const std::vector<DetectionFrame>& frames);

// Vocabulary (JSON). Embeddings are L2-normalized while reading.
ClassVocabulary read_vocabulary(const std::string& path);
void write_vocabulary(const std::string& path, const ClassVocabulary& vocab);

// Ground truth (JSON).
GroundTruthData read_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path, const GroundTruthData& gt);

// Track output (JSONL, one row per track state).
std::vector<TrackRecord> read_tracks(const std::string& path);
void write_tracks(const std::string& path,
                  const std::vector<TrackRecord>& records);

/// Groups a detection stream by video, preserving first-appearance order
/// of the videos and validating the strictly-increasing frame invariant.
std::vector<std::pair<std::string, std::vector<std::vector<Detection>>>>
group_by_video(const std::vector<DetectionFrame>& frames);

// Value grids. ".png" paths use 8-bit PNG (1 or 3 channels, values mapped
// to [-1, 1]); anything else uses the raw "OVTG" format: a 16-byte header
// of magic "OVTG" plus little-endian u32 width/height/channels, followed
// by row-major little-endian f32 samples.
LatentGrid read_grid(const std::string& path);
void write_grid(const std::string& path, const LatentGrid& grid);

/// Masks travel as single-channel grids; values are clamped to [0, 1].
ForegroundMask read_mask(const std::string& path);
void write_mask(const std::string& path, const ForegroundMask& mask);

// 8-bit PNG shim used by read_grid/write_grid for ".png" paths.
LatentGrid read_png_grid(const std::string& path);
void write_png_grid(const std::string& path, const LatentGrid& grid);

}  // namespace ovtrack
