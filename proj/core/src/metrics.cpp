#include "ovtrack/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "ovtrack/assignment.hpp"
#include "ovtrack/error.hpp"

namespace ovtrack {

namespace {

using TrackKey = std::pair<std::string, int>;  // (video, track id)

// Canonical in-frame orderings. Matching ties break on list positions, so
// both sides are sorted by geometry first; this keeps scores invariant
// under record shuffling and track-id relabeling.
bool pred_before(const TrackRecord& a, const TrackRecord& b) {
  return std::tie(a.box.x, a.box.y, a.box.w, a.box.h, a.score, a.class_id,
                  a.track_id) < std::tie(b.box.x, b.box.y, b.box.w, b.box.h,
                                         b.score, b.class_id, b.track_id);
}

bool gt_before(const Annotation& a, const Annotation& b) {
  return std::tie(a.box.x, a.box.y, a.box.w, a.box.h, a.class_id, a.track_id) <
         std::tie(b.box.x, b.box.y, b.box.w, b.box.h, b.class_id, b.track_id);
}

struct TplEntry {
  TrackKey pred;
  TrackKey gt;
  int pred_class = kBackgroundClassId;
  int gt_class = 0;
};

void check_video_sets(const std::vector<TrackRecord>& preds,
                      const std::vector<Annotation>& gts) {
  if (gts.empty()) return;
  std::set<std::string> gt_videos;
  for (const auto& gt : gts) gt_videos.insert(gt.video);
  for (const auto& pred : preds) {
    if (!gt_videos.count(pred.video)) {
      throw InputError("teta: predictions reference video '" + pred.video +
                       "' absent from the ground truth");
    }
  }
}

double safe_ratio(long long num, long long denom) {
  return denom > 0 ? static_cast<double>(num) / static_cast<double>(denom) : 0.0;
}

}  // namespace

std::vector<std::pair<int, int>> match_frame(
    const std::vector<BoundingBox>& preds, const std::vector<BoundingBox>& gts,
    double thr) {
  if (preds.empty() || gts.empty()) return {};
  std::vector<std::vector<double>> weights(
      preds.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double iou = iou_2d(preds[i], gts[j]);
      if (iou >= thr) weights[i][j] = iou;
    }
  }
  const std::vector<int> assign = lexicographic_max_assignment(weights);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] >= 0) pairs.emplace_back(static_cast<int>(i), assign[i]);
  }
  return pairs;
}

TetaScores teta_scores(const std::vector<TrackRecord>& preds,
                       const std::vector<Annotation>& gts,
                       const TetaConfig& cfg,
                       const std::optional<std::set<int>>& class_filter) {
  if (!(cfg.loc_iou_thr > 0.0) || cfg.loc_iou_thr > 1.0) {
    throw InputError("teta: localization threshold must be in (0, 1]");
  }
  check_video_sets(preds, gts);

  std::vector<TrackRecord> p;
  std::vector<Annotation> g;
  for (const auto& r : preds) {
    if (!class_filter || class_filter->count(r.class_id)) p.push_back(r);
  }
  for (const auto& a : gts) {
    if (!class_filter || class_filter->count(a.class_id)) g.push_back(a);
  }

  TetaScores scores;
  scores.empty_gt = g.empty();

  // (video, frame) -> in-frame lists, canonically ordered.
  std::map<std::pair<std::string, int>, std::vector<TrackRecord>> pred_frames;
  std::map<std::pair<std::string, int>, std::vector<Annotation>> gt_frames;
  for (const auto& r : p) pred_frames[{r.video, r.frame}].push_back(r);
  for (const auto& a : g) gt_frames[{a.video, a.frame}].push_back(a);
  for (auto& [key, list] : pred_frames) {
    std::sort(list.begin(), list.end(), pred_before);
  }
  for (auto& [key, list] : gt_frames) {
    std::sort(list.begin(), list.end(), gt_before);
  }

  std::set<std::pair<std::string, int>> frames;
  for (const auto& [key, list] : pred_frames) frames.insert(key);
  for (const auto& [key, list] : gt_frames) frames.insert(key);

  std::vector<TplEntry> tpls;
  std::map<TrackKey, long long> pred_unmatched, gt_unmatched;
  std::map<TrackKey, long long> pred_tpl_count, gt_tpl_count;
  std::map<std::pair<TrackKey, TrackKey>, long long> pair_count;

  for (const auto& frame_key : frames) {
    static const std::vector<TrackRecord> no_preds;
    static const std::vector<Annotation> no_gts;
    const auto pit = pred_frames.find(frame_key);
    const auto git = gt_frames.find(frame_key);
    const auto& fp = pit == pred_frames.end() ? no_preds : pit->second;
    const auto& fg = git == gt_frames.end() ? no_gts : git->second;

    std::vector<BoundingBox> pred_boxes, gt_boxes;
    pred_boxes.reserve(fp.size());
    gt_boxes.reserve(fg.size());
    for (const auto& r : fp) pred_boxes.push_back(r.box);
    for (const auto& a : fg) gt_boxes.push_back(a.box);

    const auto pairs = match_frame(pred_boxes, gt_boxes, cfg.loc_iou_thr);
    std::vector<char> pred_used(fp.size(), 0), gt_used(fg.size(), 0);
    for (const auto& [pi, gi] : pairs) {
      pred_used[static_cast<std::size_t>(pi)] = 1;
      gt_used[static_cast<std::size_t>(gi)] = 1;
      const auto& pr = fp[static_cast<std::size_t>(pi)];
      const auto& ga = fg[static_cast<std::size_t>(gi)];
      TplEntry tpl;
      tpl.pred = {pr.video, pr.track_id};
      tpl.gt = {ga.video, ga.track_id};
      tpl.pred_class = pr.class_id;
      tpl.gt_class = ga.class_id;
      tpls.push_back(tpl);
      pred_tpl_count[tpl.pred]++;
      gt_tpl_count[tpl.gt]++;
      pair_count[{tpl.pred, tpl.gt}]++;
    }
    for (std::size_t i = 0; i < fp.size(); ++i) {
      if (!pred_used[i]) {
        scores.fpl++;
        pred_unmatched[{fp[i].video, fp[i].track_id}]++;
      }
    }
    for (std::size_t i = 0; i < fg.size(); ++i) {
      if (!gt_used[i]) {
        scores.fnl++;
        gt_unmatched[{fg[i].video, fg[i].track_id}]++;
      }
    }
  }

  scores.tpl = static_cast<long long>(tpls.size());
  const bool hota = cfg.assoc_counts == TetaConfig::AssocCounts::kHotaStyle;
  double assoc_sum = 0.0;
  for (const auto& tpl : tpls) {
    if (tpl.pred_class == tpl.gt_class) {
      scores.tpc++;
    } else {
      // A wrong class is charged once against the predicted class and
      // once against the annotated one.
      scores.fpc++;
      scores.fnc++;
    }
    const long long tpa = pair_count[{tpl.pred, tpl.gt}];
    long long fpa = pred_tpl_count[tpl.pred] - tpa;
    long long fna = gt_tpl_count[tpl.gt] - tpa;
    if (hota) {
      fpa += pred_unmatched.count(tpl.pred) ? pred_unmatched[tpl.pred] : 0;
      fna += gt_unmatched.count(tpl.gt) ? gt_unmatched[tpl.gt] : 0;
    }
    scores.tpa += tpa;
    scores.fpa += fpa;
    scores.fna += fna;
    const double term =
        static_cast<double>(tpa) / static_cast<double>(tpa + fpa + fna);
    scores.assoc_terms.push_back(term);
    assoc_sum += term;
  }

  scores.loc_a = safe_ratio(scores.tpl, scores.tpl + scores.fpl + scores.fnl);
  scores.cls_a = safe_ratio(scores.tpc, scores.tpc + scores.fpc + scores.fnc);
  scores.assoc_a =
      scores.tpl > 0 ? assoc_sum / static_cast<double>(scores.tpl) : 0.0;
  scores.teta = (scores.loc_a + scores.assoc_a + scores.cls_a) / 3.0;
  return scores;
}

std::set<int> split_classes(const ClassVocabulary& vocab, ClassSplit split) {
  std::set<int> ids;
  for (const auto& entry : vocab.classes) {
    if (entry.split == split) ids.insert(entry.class_id);
  }
  return ids;
}

TetaReport teta(const std::vector<TrackRecord>& preds,
                const std::vector<Annotation>& gts,
                const ClassVocabulary& vocab, const TetaConfig& cfg) {
  TetaReport report;
  report.all = teta_scores(preds, gts, cfg);
  report.base = teta_scores(preds, gts, cfg,
                            split_classes(vocab, ClassSplit::kBase));
  report.novel = teta_scores(preds, gts, cfg,
                             split_classes(vocab, ClassSplit::kNovel));
  return report;
}

double iou_3d(const std::map<int, BoundingBox>& a,
              const std::map<int, BoundingBox>& b) {
  double inter_sum = 0.0;
  double union_sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      union_sum += ia->second.area();
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      union_sum += ib->second.area();
      ++ib;
    } else {
      const double inter = intersection_area(ia->second, ib->second);
      inter_sum += inter;
      union_sum += ia->second.area() + ib->second.area() - inter;
      ++ia;
      ++ib;
    }
  }
  return union_sum > 0.0 ? inter_sum / union_sum : 0.0;
}

namespace {

struct EvalTrack {
  std::string video;
  int track_id = 0;
  int class_id = 0;
  double confidence = 0.0;
  std::map<int, BoundingBox> boxes;
};

std::vector<EvalTrack> collect_pred_tracks(const std::vector<TrackRecord>& recs) {
  std::map<TrackKey, EvalTrack> by_key;
  std::map<TrackKey, std::map<int, int>> class_votes;
  std::map<TrackKey, double> score_sum;
  for (const auto& r : recs) {
    const TrackKey key{r.video, r.track_id};
    auto& track = by_key[key];
    track.video = r.video;
    track.track_id = r.track_id;
    track.boxes[r.frame] = r.box;
    class_votes[key][r.class_id]++;
    score_sum[key] += r.score;
  }
  std::vector<EvalTrack> tracks;
  for (auto& [key, track] : by_key) {
    int best_class = 0, best_votes = -1;
    for (const auto& [cls, votes] : class_votes[key]) {
      if (votes > best_votes) {
        best_votes = votes;
        best_class = cls;
      }
    }
    track.class_id = best_class;
    track.confidence = score_sum[key] / static_cast<double>(track.boxes.size());
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<EvalTrack> collect_gt_tracks(const std::vector<Annotation>& annos) {
  std::map<TrackKey, EvalTrack> by_key;
  for (const auto& a : annos) {
    const TrackKey key{a.video, a.track_id};
    auto& track = by_key[key];
    if (track.boxes.empty()) {
      track.video = a.video;
      track.track_id = a.track_id;
      track.class_id = a.class_id;
    }
    track.boxes[a.frame] = a.box;
  }
  std::vector<EvalTrack> tracks;
  for (auto& [key, track] : by_key) tracks.push_back(std::move(track));
  return tracks;
}

// All-point interpolated AP: area under the precision envelope.
double average_precision(const std::vector<char>& is_tp, long long n_gt) {
  if (n_gt <= 0) return 0.0;
  std::vector<double> precision(is_tp.size()), recall(is_tp.size());
  long long tp = 0, fp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp; else ++fp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
    precision[static_cast<std::size_t>(i)] =
        std::max(precision[static_cast<std::size_t>(i)],
                 precision[static_cast<std::size_t>(i) + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace

TrackMapScores track_map_scores(
    const std::vector<TrackRecord>& preds, const std::vector<Annotation>& gts,
    const std::vector<double>& thresholds,
    const std::optional<std::set<int>>& class_filter) {
  if (thresholds.empty()) throw InputError("track_map: empty threshold set");
  check_video_sets(preds, gts);

  std::vector<TrackRecord> p;
  std::vector<Annotation> g;
  for (const auto& r : preds) {
    if (!class_filter || class_filter->count(r.class_id)) p.push_back(r);
  }
  for (const auto& a : gts) {
    if (!class_filter || class_filter->count(a.class_id)) g.push_back(a);
  }

  TrackMapScores scores;
  scores.empty_gt = g.empty();

  std::vector<EvalTrack> pred_tracks = collect_pred_tracks(p);
  std::vector<EvalTrack> gt_tracks = collect_gt_tracks(g);

  std::set<int> classes;
  for (const auto& t : gt_tracks) classes.insert(t.class_id);

  // Stable rank: confidence, then (video, id) for reproducibility.
  std::sort(pred_tracks.begin(), pred_tracks.end(),
            [](const EvalTrack& a, const EvalTrack& b) {
              return std::tie(b.confidence, b.video, b.track_id) <
                     std::tie(a.confidence, a.video, a.track_id);
            });
  std::sort(gt_tracks.begin(), gt_tracks.end(),
            [](const EvalTrack& a, const EvalTrack& b) {
              return std::tie(a.video, a.track_id) < std::tie(b.video, b.track_id);
            });

  double map_sum = 0.0;
  for (double thr : thresholds) {
    double class_ap_sum = 0.0;
    for (int cls : classes) {
      std::vector<const EvalTrack*> class_gts;
      for (const auto& t : gt_tracks) {
        if (t.class_id == cls) class_gts.push_back(&t);
      }
      std::vector<char> gt_taken(class_gts.size(), 0);
      std::vector<char> is_tp;
      for (const auto& pt : pred_tracks) {
        if (pt.class_id != cls) continue;
        int best = -1;
        double best_iou = 0.0;
        for (std::size_t i = 0; i < class_gts.size(); ++i) {
          if (gt_taken[i] || class_gts[i]->video != pt.video) continue;
          const double iou = iou_3d(pt.boxes, class_gts[i]->boxes);
          if (iou > best_iou) {
            best_iou = iou;
            best = static_cast<int>(i);
          }
        }
        if (best >= 0 && best_iou >= thr) {
          gt_taken[static_cast<std::size_t>(best)] = 1;
          is_tp.push_back(1);
        } else {
          is_tp.push_back(0);
        }
      }
      const double ap =
          average_precision(is_tp, static_cast<long long>(class_gts.size()));
      scores.ap[thr][cls] = ap;
      class_ap_sum += ap;
    }
    const double map_thr =
        classes.empty() ? 0.0 : class_ap_sum / static_cast<double>(classes.size());
    if (thr == 0.5) scores.map50 = map_thr;
    if (thr == 0.75) scores.map75 = map_thr;
    map_sum += map_thr;
  }
  scores.map = map_sum / static_cast<double>(thresholds.size());
  return scores;
}

TrackMapReport track_map(const std::vector<TrackRecord>& preds,
                         const std::vector<Annotation>& gts,
                         const ClassVocabulary& vocab,
                         const std::vector<double>& thresholds) {
  TrackMapReport report;
  report.all = track_map_scores(preds, gts, thresholds);
  report.base = track_map_scores(preds, gts, thresholds,
                                 split_classes(vocab, ClassSplit::kBase));
  report.novel = track_map_scores(preds, gts, thresholds,
                                  split_classes(vocab, ClassSplit::kNovel));
  return report;
}

}  // namespace ovtrack
