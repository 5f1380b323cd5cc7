#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovtrack/box.hpp"

namespace ovtrack {

/// Class id reserved for "none of the vocabulary classes".
inline constexpr int kBackgroundClassId = -1;

/// One localized object candidate in a frame. The appearance embedding is
/// unit-norm (enforced at ingest); the text-head embedding is optional and
/// also unit-norm when present.
struct Detection {
  BoundingBox box;
  double score = 0.0;  // confidence in [0, 1]
  std::vector<double> appearance;
  std::optional<std::vector<double>> text_embed;
  int frame = 0;
  std::string video;

  bool operator==(const Detection&) const = default;
};

/// Per-frame state of a track: box, confidence and frame-level class.
struct TrackState {
  BoundingBox box;
  double score = 0.0;
  int class_id = kBackgroundClassId;

  bool operator==(const TrackState&) const = default;
};

struct MemoryEntry {
  int frame = 0;
  std::vector<double> embed;
};

struct ClassObservation {
  int frame = 0;
  int class_id = kBackgroundClassId;
  double confidence = 0.0;
};

/// An identity over time. `memory` is a bounded FIFO of recent appearance
/// embeddings; `class_history` collects the frame-level classification
/// results that temporal voting resolves into `voted_class_id`.
struct Track {
  int id = 0;
  std::map<int, TrackState> states;  // frame -> state, keys increasing
  std::deque<MemoryEntry> memory;
  std::vector<ClassObservation> class_history;
  int last_seen = -1;
  int voted_class_id = kBackgroundClassId;
  double confidence = 0.0;  // mean per-frame score after voting
};

/// Ground-truth state of one identity in one frame.
struct Annotation {
  int track_id = 0;
  std::string video;
  int frame = 0;
  BoundingBox box;
  int class_id = 0;

  bool operator==(const Annotation&) const = default;
};

/// One output row of the tracker: a track state bound to (video, frame).
struct TrackRecord {
  std::string video;
  int frame = 0;
  int track_id = 0;
  BoundingBox box;
  double score = 0.0;
  int class_id = kBackgroundClassId;

  bool operator==(const TrackRecord&) const = default;
};

}  // namespace ovtrack
