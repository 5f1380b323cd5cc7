#include "ovtrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ovtrack/error.hpp"
#include "ovtrack/nms.hpp"
#include "ovtrack/vecmath.hpp"

namespace ovtrack {

void AssociationConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(beta)) throw InputError("association: beta must be in [0, 1]");
  if (!in_unit(beta_obj)) throw InputError("association: beta_obj must be in [0, 1]");
  if (!in_unit(gamma)) throw InputError("association: gamma must be in [0, 1]");
  if (memory_frames <= 0) throw InputError("association: memory_frames must be > 0");
  if (cosine_gate < -1.0 || cosine_gate > 1.0) {
    throw InputError("association: cosine_gate must be in [-1, 1]");
  }
  if (!(nms_iou > 0.0) || nms_iou > 1.0) {
    throw InputError("association: nms_iou must be in (0, 1]");
  }
}

std::vector<std::vector<double>> bisoftmax_scores(
    const std::vector<std::vector<double>>& det_embeds,
    const std::vector<std::vector<double>>& track_embeds) {
  const std::size_t n_det = det_embeds.size();
  const std::size_t n_trk = track_embeds.size();
  if (n_det == 0 || n_trk == 0) return {};

  std::vector<std::vector<double>> dots(n_trk, std::vector<double>(n_det));
  for (std::size_t t = 0; t < n_trk; ++t) {
    for (std::size_t r = 0; r < n_det; ++r) {
      dots[t][r] = dot(track_embeds[t], det_embeds[r]);
    }
  }

  // Softmax over detections for a fixed track, shifted for stability.
  std::vector<std::vector<double>> over_dets(n_trk, std::vector<double>(n_det));
  for (std::size_t t = 0; t < n_trk; ++t) {
    const double m = *std::max_element(dots[t].begin(), dots[t].end());
    double sum = 0.0;
    for (std::size_t r = 0; r < n_det; ++r) {
      over_dets[t][r] = std::exp(dots[t][r] - m);
      sum += over_dets[t][r];
    }
    for (std::size_t r = 0; r < n_det; ++r) over_dets[t][r] /= sum;
  }

  // Softmax over tracks for a fixed detection.
  std::vector<std::vector<double>> over_trks(n_trk, std::vector<double>(n_det));
  for (std::size_t r = 0; r < n_det; ++r) {
    double m = dots[0][r];
    for (std::size_t t = 1; t < n_trk; ++t) m = std::max(m, dots[t][r]);
    double sum = 0.0;
    for (std::size_t t = 0; t < n_trk; ++t) {
      over_trks[t][r] = std::exp(dots[t][r] - m);
      sum += over_trks[t][r];
    }
    for (std::size_t t = 0; t < n_trk; ++t) over_trks[t][r] /= sum;
  }

  std::vector<std::vector<double>> scores(n_trk, std::vector<double>(n_det));
  for (std::size_t t = 0; t < n_trk; ++t) {
    for (std::size_t r = 0; r < n_det; ++r) {
      scores[t][r] = 0.5 * (over_dets[t][r] + over_trks[t][r]);
    }
  }
  return scores;
}

namespace {

void append_state(Track& track, const Detection& det, int frame,
                  const ClassDecision* decision, int memory_frames) {
  TrackState state;
  state.box = det.box;
  state.score = det.score;
  state.class_id = decision ? decision->class_id : kBackgroundClassId;
  track.states[frame] = state;
  track.last_seen = frame;
  track.memory.push_back({frame, det.appearance});
  while (static_cast<int>(track.memory.size()) > memory_frames) {
    track.memory.pop_front();
  }
  if (decision) {
    track.class_history.push_back({frame, decision->class_id,
                                   decision->confidence});
  }
}

}  // namespace

FrameReport associate_frame(TrackStore& store,
                            const std::vector<Detection>& dets, int frame,
                            const AssociationConfig& cfg,
                            std::span<const ClassDecision> classes) {
  cfg.validate();
  if (frame <= store.last_frame) {
    throw InputError("associate_frame: frame " + std::to_string(frame) +
                     " is not past the last processed frame " +
                     std::to_string(store.last_frame));
  }
  if (!classes.empty() && classes.size() != dets.size()) {
    throw InputError("associate_frame: one class decision per detection required");
  }

  FrameReport report;
  report.frame = frame;
  report.assignments.resize(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    report.assignments[i].det_index = static_cast<int>(i);
    report.assignments[i].outcome = DetOutcome::kSuppressed;
  }

  std::vector<int> class_ids;
  if (!cfg.nms_class_agnostic) {
    class_ids.reserve(dets.size());
    for (const auto& cls : classes) class_ids.push_back(cls.class_id);
  }
  const std::vector<int> kept =
      nms_keep(dets, cfg.nms_iou, cfg.nms_class_agnostic, class_ids);

  // Tracks stay matchable until they have missed more than memory_frames
  // consecutive frames.
  std::vector<int> live_ids;
  for (const auto& [id, track] : store.active) {
    if (frame - track.last_seen - 1 <= cfg.memory_frames) live_ids.push_back(id);
  }

  std::vector<std::vector<double>> det_embeds;
  det_embeds.reserve(kept.size());
  for (int idx : kept) det_embeds.push_back(dets[static_cast<std::size_t>(idx)].appearance);
  std::vector<std::vector<double>> track_embeds;
  track_embeds.reserve(live_ids.size());
  for (int id : live_ids) track_embeds.push_back(store.active[id].memory.back().embed);

  const auto scores = bisoftmax_scores(det_embeds, track_embeds);

  std::vector<char> consumed(live_ids.size(), 0);
  for (std::size_t pos = 0; pos < kept.size(); ++pos) {
    const int det_idx = kept[pos];
    const Detection& det = dets[static_cast<std::size_t>(det_idx)];
    DetAssignment& slot = report.assignments[static_cast<std::size_t>(det_idx)];
    const ClassDecision* decision =
        classes.empty() ? nullptr : &classes[static_cast<std::size_t>(det_idx)];

    int best_track = -1;
    double best_score = 0.0;
    for (std::size_t t = 0; t < live_ids.size(); ++t) {
      if (consumed[t]) continue;
      if (best_track < 0 || scores[t][pos] > best_score) {
        best_track = static_cast<int>(t);
        best_score = scores[t][pos];
      }
    }

    bool matched = false;
    if (best_track >= 0 && best_score > cfg.beta && det.score > cfg.beta_obj) {
      Track& track = store.active[live_ids[static_cast<std::size_t>(best_track)]];
      if (cosine(det.appearance, track.memory.back().embed) > cfg.cosine_gate) {
        append_state(track, det, frame, decision, cfg.memory_frames);
        consumed[static_cast<std::size_t>(best_track)] = 1;
        slot.outcome = DetOutcome::kMatched;
        slot.track_id = track.id;
        slot.match_score = best_score;
        matched = true;
      }
    }
    if (!matched) {
      if (det.score > cfg.gamma) {
        Track track;
        track.id = store.next_id++;
        append_state(track, det, frame, decision, cfg.memory_frames);
        slot.outcome = DetOutcome::kCreated;
        slot.track_id = track.id;
        store.active.emplace(track.id, std::move(track));
      } else {
        slot.outcome = DetOutcome::kDiscarded;
      }
    }
  }

  store.last_frame = frame;
  return report;
}

VoteResult temporal_vote(const Track& track) {
  if (track.class_history.empty()) {
    throw InputError("temporal_vote: empty class history");
  }
  // Votes, then mean confidence, then the lower class id.
  std::map<int, std::pair<int, double>> tally;  // class -> (count, conf sum)
  for (const auto& obs : track.class_history) {
    auto& entry = tally[obs.class_id];
    entry.first += 1;
    entry.second += obs.confidence;
  }
  int best_class = tally.begin()->first;
  int best_count = 0;
  double best_mean = 0.0;
  for (const auto& [class_id, entry] : tally) {
    const double mean_conf = entry.second / entry.first;
    const bool wins = entry.first > best_count ||
                      (entry.first == best_count && mean_conf > best_mean);
    if (wins) {
      best_class = class_id;
      best_count = entry.first;
      best_mean = mean_conf;
    }
  }

  double score_sum = 0.0;
  for (const auto& [frame, state] : track.states) score_sum += state.score;
  return {best_class, score_sum / static_cast<double>(track.states.size())};
}

std::vector<Track> track_video(
    const std::vector<std::vector<Detection>>& frames,
    const ClassVocabulary& vocab, const ClassifierConfig& cls_cfg,
    const AssociationConfig& assoc_cfg) {
  TrackStore store;
  for (const auto& dets : frames) {
    if (dets.empty()) continue;
    const int frame = dets.front().frame;
    for (const auto& det : dets) {
      if (det.frame != frame) {
        throw InputError("track_video: mixed frame indices within one group");
      }
    }

    std::vector<ClassDecision> decisions(dets.size());
    bool any_text = false;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].text_embed) {
        const ClassifyResult res = classify(*dets[i].text_embed, vocab, cls_cfg);
        decisions[i] = {res.class_id, res.confidence()};
        any_text = true;
      }
    }
    // Class-aware duplicate removal still works without text embeddings:
    // everything shares the background class then.
    const bool pass_classes = any_text || !assoc_cfg.nms_class_agnostic;
    associate_frame(store, dets, frame, assoc_cfg,
                    pass_classes ? std::span<const ClassDecision>(decisions)
                                 : std::span<const ClassDecision>());
  }

  std::vector<Track> tracks;
  tracks.reserve(store.active.size());
  for (auto& [id, track] : store.active) {
    if (track.states.empty()) continue;
    if (track.class_history.empty()) {
      double score_sum = 0.0;
      for (const auto& [frame, state] : track.states) score_sum += state.score;
      track.voted_class_id = kBackgroundClassId;
      track.confidence = score_sum / static_cast<double>(track.states.size());
    } else {
      const VoteResult vote = temporal_vote(track);
      track.voted_class_id = vote.class_id;
      track.confidence = vote.track_confidence;
    }
    for (auto& [frame, state] : track.states) state.class_id = track.voted_class_id;
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<TrackRecord> track_records(const std::vector<Track>& tracks,
                                       const std::string& video) {
  std::vector<TrackRecord> records;
  for (const auto& track : tracks) {
    for (const auto& [frame, state] : track.states) {
      records.push_back({video, frame, track.id, state.box, state.score,
                         state.class_id});
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.track_id < b.track_id;
  });
  return records;
}

}  // namespace ovtrack
