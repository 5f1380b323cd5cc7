#include "ovtrack/metrics_reference.hpp"

#include <algorithm>
#include <tuple>

#include "ovtrack/error.hpp"

namespace ovtrack {

namespace {

// Exhaustive maximum-total matching: a full depth-first search over all
// injective pred -> gt assignments restricted to admissible pairs. The
// first pass finds the exact optimal total; the second walks candidates in
// lexicographic order (columns ascending, then unmatched) and returns the
// first complete assignment within `tol` of that optimum.
struct ExhaustiveSearch {
  const std::vector<std::vector<double>>& w;
  int rows, cols;
  double tol;

  std::vector<int> current;
  std::vector<char> used;
  double best_total = 0.0;

  std::vector<int> result;
  bool found = false;

  explicit ExhaustiveSearch(const std::vector<std::vector<double>>& weights,
                            double tolerance)
      : w(weights),
        rows(static_cast<int>(weights.size())),
        cols(rows == 0 ? 0 : static_cast<int>(weights.front().size())),
        tol(tolerance),
        current(static_cast<std::size_t>(rows), -1),
        used(static_cast<std::size_t>(cols), 0) {}

  void find_best(int row, double total) {
    if (row == rows) {
      best_total = std::max(best_total, total);
      return;
    }
    for (int j = 0; j < cols; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (used[jj] || w[static_cast<std::size_t>(row)][jj] <= 0.0) continue;
      used[jj] = 1;
      find_best(row + 1, total + w[static_cast<std::size_t>(row)][jj]);
      used[jj] = 0;
    }
    find_best(row + 1, total);
  }

  void find_first(int row, double total) {
    if (found) return;
    if (row == rows) {
      if (total >= best_total - tol) {
        result = current;
        found = true;
      }
      return;
    }
    for (int j = 0; j < cols && !found; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (used[jj] || w[static_cast<std::size_t>(row)][jj] <= 0.0) continue;
      used[jj] = 1;
      current[static_cast<std::size_t>(row)] = j;
      find_first(row + 1, total + w[static_cast<std::size_t>(row)][jj]);
      used[jj] = 0;
      current[static_cast<std::size_t>(row)] = -1;
    }
    if (!found) find_first(row + 1, total);
  }

  std::vector<int> run() {
    if (rows == 0 || cols == 0) return current;
    find_best(0, 0.0);
    find_first(0, 0.0);
    return result;
  }
};

struct RefTpl {
  std::string video;
  int pred_id = 0;
  int gt_id = 0;
  int pred_class = kBackgroundClassId;
  int gt_class = 0;
};

struct RefMiss {
  std::string video;
  int track_id = 0;
};

}  // namespace

TetaScores brute_force_teta_scores(
    const std::vector<TrackRecord>& preds, const std::vector<Annotation>& gts,
    const TetaConfig& cfg,
    const std::optional<std::set<int>>& class_filter) {
  if (gts.size() > 0) {
    std::set<std::string> gt_videos;
    for (const auto& gt : gts) gt_videos.insert(gt.video);
    for (const auto& pred : preds) {
      if (!gt_videos.count(pred.video)) {
        throw InputError("brute_force_teta: predictions reference video '" +
                         pred.video + "' absent from the ground truth");
      }
    }
  }

  std::vector<TrackRecord> p;
  std::vector<Annotation> g;
  for (const auto& r : preds) {
    if (!class_filter || class_filter->count(r.class_id)) p.push_back(r);
  }
  for (const auto& a : gts) {
    if (!class_filter || class_filter->count(a.class_id)) g.push_back(a);
  }

  // Size guard: this path is meant for instances small enough to enumerate.
  {
    std::set<std::pair<std::string, int>> pred_tracks, gt_tracks, frames;
    for (const auto& r : preds) {
      pred_tracks.insert({r.video, r.track_id});
      frames.insert({r.video, r.frame});
    }
    for (const auto& a : gts) {
      gt_tracks.insert({a.video, a.track_id});
      frames.insert({a.video, a.frame});
    }
    if (pred_tracks.size() > 4 || gt_tracks.size() > 4 || frames.size() > 6) {
      throw InputError("brute_force_teta: instance too large to enumerate");
    }
  }

  std::map<std::pair<std::string, int>, std::vector<TrackRecord>> pred_frames;
  std::map<std::pair<std::string, int>, std::vector<Annotation>> gt_frames;
  for (const auto& r : p) pred_frames[{r.video, r.frame}].push_back(r);
  for (const auto& a : g) gt_frames[{a.video, a.frame}].push_back(a);
  for (auto& [key, list] : pred_frames) {
    std::sort(list.begin(), list.end(),
              [](const TrackRecord& a, const TrackRecord& b) {
                return std::tie(a.box.x, a.box.y, a.box.w, a.box.h, a.score,
                                a.class_id, a.track_id) <
                       std::tie(b.box.x, b.box.y, b.box.w, b.box.h, b.score,
                                b.class_id, b.track_id);
              });
  }
  for (auto& [key, list] : gt_frames) {
    std::sort(list.begin(), list.end(),
              [](const Annotation& a, const Annotation& b) {
                return std::tie(a.box.x, a.box.y, a.box.w, a.box.h, a.class_id,
                                a.track_id) <
                       std::tie(b.box.x, b.box.y, b.box.w, b.box.h, b.class_id,
                                b.track_id);
              });
  }

  std::set<std::pair<std::string, int>> frames;
  for (const auto& [key, list] : pred_frames) frames.insert(key);
  for (const auto& [key, list] : gt_frames) frames.insert(key);

  std::vector<RefTpl> tpls;
  std::vector<RefMiss> pred_misses, gt_misses;

  for (const auto& frame_key : frames) {
    std::vector<TrackRecord> fp;
    std::vector<Annotation> fg;
    if (auto it = pred_frames.find(frame_key); it != pred_frames.end()) fp = it->second;
    if (auto it = gt_frames.find(frame_key); it != gt_frames.end()) fg = it->second;

    std::vector<std::vector<double>> w(fp.size(),
                                       std::vector<double>(fg.size(), 0.0));
    for (std::size_t i = 0; i < fp.size(); ++i) {
      for (std::size_t j = 0; j < fg.size(); ++j) {
        const double iou = iou_2d(fp[i].box, fg[j].box);
        if (iou >= cfg.loc_iou_thr) w[i][j] = iou;
      }
    }
    ExhaustiveSearch search(w, 1e-9);
    const std::vector<int> assign = search.run();

    std::vector<char> gt_used(fg.size(), 0);
    for (std::size_t i = 0; i < fp.size(); ++i) {
      const int j = i < assign.size() ? assign[i] : -1;
      if (j >= 0) {
        gt_used[static_cast<std::size_t>(j)] = 1;
        tpls.push_back({fp[i].video, fp[i].track_id,
                        fg[static_cast<std::size_t>(j)].track_id,
                        fp[i].class_id,
                        fg[static_cast<std::size_t>(j)].class_id});
      } else {
        pred_misses.push_back({fp[i].video, fp[i].track_id});
      }
    }
    for (std::size_t j = 0; j < fg.size(); ++j) {
      if (!gt_used[j]) gt_misses.push_back({fg[j].video, fg[j].track_id});
    }
  }

  TetaScores scores;
  scores.empty_gt = g.empty();
  scores.tpl = static_cast<long long>(tpls.size());
  scores.fpl = static_cast<long long>(pred_misses.size());
  scores.fnl = static_cast<long long>(gt_misses.size());

  const bool hota = cfg.assoc_counts == TetaConfig::AssocCounts::kHotaStyle;
  double assoc_sum = 0.0;
  for (const auto& b : tpls) {
    if (b.pred_class == b.gt_class) {
      scores.tpc++;
    } else {
      scores.fpc++;
      scores.fnc++;
    }

    long long tpa = 0, fpa = 0, fna = 0;
    for (const auto& other : tpls) {
      const bool same_pred =
          other.video == b.video && other.pred_id == b.pred_id;
      const bool same_gt = other.video == b.video && other.gt_id == b.gt_id;
      if (same_pred && same_gt) {
        tpa++;
      } else if (same_pred) {
        fpa++;
      } else if (same_gt) {
        fna++;
      }
    }
    if (hota) {
      for (const auto& miss : pred_misses) {
        if (miss.video == b.video && miss.track_id == b.pred_id) fpa++;
      }
      for (const auto& miss : gt_misses) {
        if (miss.video == b.video && miss.track_id == b.gt_id) fna++;
      }
    }
    scores.tpa += tpa;
    scores.fpa += fpa;
    scores.fna += fna;
    const double term =
        static_cast<double>(tpa) / static_cast<double>(tpa + fpa + fna);
    scores.assoc_terms.push_back(term);
    assoc_sum += term;
  }

  const long long loc_denom = scores.tpl + scores.fpl + scores.fnl;
  const long long cls_denom = scores.tpc + scores.fpc + scores.fnc;
  scores.loc_a = loc_denom > 0 ? static_cast<double>(scores.tpl) /
                                     static_cast<double>(loc_denom)
                               : 0.0;
  scores.cls_a = cls_denom > 0 ? static_cast<double>(scores.tpc) /
                                     static_cast<double>(cls_denom)
                               : 0.0;
  scores.assoc_a =
      scores.tpl > 0 ? assoc_sum / static_cast<double>(scores.tpl) : 0.0;
  scores.teta = (scores.loc_a + scores.assoc_a + scores.cls_a) / 3.0;
  return scores;
}

TetaReport brute_force_teta(const std::vector<TrackRecord>& preds,
                            const std::vector<Annotation>& gts,
                            const ClassVocabulary& vocab,
                            const TetaConfig& cfg) {
  TetaReport report;
  report.all = brute_force_teta_scores(preds, gts, cfg);
  report.base = brute_force_teta_scores(
      preds, gts, cfg, split_classes(vocab, ClassSplit::kBase));
  report.novel = brute_force_teta_scores(
      preds, gts, cfg, split_classes(vocab, ClassSplit::kNovel));
  return report;
}

}  // namespace ovtrack
