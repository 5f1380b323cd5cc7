#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ovtrack/classify.hpp"
#include "ovtrack/types.hpp"
#include "ovtrack/vocabulary.hpp"

namespace ovtrack {

struct AssociationConfig {
  double beta = 0.5;        // match-score threshold on the bi-softmax
  double beta_obj = 0.3;    // detection score gate for stealing a track
  double gamma = 1e-4;      // confidence threshold for new tracks
  int memory_frames = 10;   // how long an unseen track stays matchable
  double cosine_gate = 0.3; // conjunctive raw-cosine filter on matches
  double nms_iou = 0.5;     // duplicate-removal IoU threshold
  bool nms_class_agnostic = true;

  /// Throws InputError when a threshold is outside its range.
  void validate() const;
};

/// Frame-level classification result attached to a detection.
struct ClassDecision {
  int class_id = kBackgroundClassId;
  double confidence = 0.0;
};

struct TrackStore {
  std::map<int, Track> active;  // id -> track; ids are never reused
  int next_id = 0;
  int last_frame = -1;  // most recent frame processed
};

enum class DetOutcome { kMatched, kCreated, kDiscarded, kSuppressed };

struct DetAssignment {
  int det_index = -1;  // index into the input detection list
  DetOutcome outcome = DetOutcome::kDiscarded;
  int track_id = -1;
  double match_score = 0.0;  // bi-softmax score of an accepted match
};

struct FrameReport {
  int frame = -1;
  std::vector<DetAssignment> assignments;
};

/// Bi-directional softmax matching scores. Result is indexed
/// [track][detection]; each entry averages a softmax of the raw embedding
/// dot products over detections (track fixed) with one over tracks
/// (detection fixed), so every entry lies in (0, 1]. Either list empty
/// yields an empty matrix.
std::vector<std::vector<double>> bisoftmax_scores(
    const std::vector<std::vector<double>>& det_embeds,
    const std::vector<std::vector<double>>& track_embeds);

/// Processes one frame of detections against the store: class-agnostic (or
/// per-class) duplicate removal, then greedy matching in descending score
/// order against each live track's most recent memory embedding. A match
/// requires the bi-softmax score to clear `beta`, the raw cosine to clear
/// `cosine_gate` and the detection score to clear `beta_obj`; each track
/// accepts at most one detection per frame. Unmatched detections above
/// `gamma` open new tracks. Tracks unseen for more than `memory_frames`
/// frames no longer take part in matching.
///
/// `classes` optionally carries one frame-level class decision per
/// detection (parallel to `dets`).
FrameReport associate_frame(TrackStore& store,
                            const std::vector<Detection>& dets, int frame,
                            const AssociationConfig& cfg,
                            std::span<const ClassDecision> classes = {});

struct VoteResult {
  int class_id = kBackgroundClassId;
  double track_confidence = 0.0;
};

/// Majority class over the track's per-frame classifications. Ties go to
/// the class with the higher mean confidence, then to the lower class id.
/// The returned confidence is the mean per-frame state score.
VoteResult temporal_vote(const Track& track);

/// Full single-video pipeline: per frame, classify detections that carry a
/// text embedding, then associate; afterwards fix each track's class by
/// temporal voting. `frames` must be in temporal order.
std::vector<Track> track_video(
    const std::vector<std::vector<Detection>>& frames,
    const ClassVocabulary& vocab, const ClassifierConfig& cls_cfg,
    const AssociationConfig& assoc_cfg);

/// Flattens tracks into output rows for one video, using the voted class.
std::vector<TrackRecord> track_records(const std::vector<Track>& tracks,
                                       const std::string& video);

}  // namespace ovtrack
