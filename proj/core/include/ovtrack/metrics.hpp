#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ovtrack/types.hpp"
#include "ovtrack/vocabulary.hpp"

namespace ovtrack {

struct TetaConfig {
  double loc_iou_thr = 0.5;  // localization match threshold, in (0, 1]

  // How association errors are counted per matched pair: kHotaStyle also
  // charges the unmatched detections/annotations of the two tracks
  // involved, kTplOnly charges only conflicting matched pairs.
  enum class AssocCounts { kHotaStyle, kTplOnly };
  AssocCounts assoc_counts = AssocCounts::kHotaStyle;
};

struct TetaScores {
  double loc_a = 0.0;
  double assoc_a = 0.0;
  double cls_a = 0.0;
  double teta = 0.0;  // arithmetic mean of the three

  long long tpl = 0, fpl = 0, fnl = 0;
  long long tpc = 0, fpc = 0, fnc = 0;
  long long tpa = 0, fpa = 0, fna = 0;  // summed over matched pairs
  std::vector<double> assoc_terms;      // per matched pair, canonical order

  bool empty_gt = false;  // no ground truth after class filtering

  bool operator==(const TetaScores&) const = default;
};

struct TetaReport {
  TetaScores all;
  TetaScores base;
  TetaScores novel;

  bool operator==(const TetaReport&) const = default;
};

/// Maximum-total-IoU one-to-one matching between two box lists, restricted
/// to pairs with IoU >= thr. Among equal-total matchings the one that is
/// lexicographically smallest in (pred index, gt index) wins. Returns
/// (pred index, gt index) pairs sorted by pred index.
std::vector<std::pair<int, int>> match_frame(
    const std::vector<BoundingBox>& preds, const std::vector<BoundingBox>& gts,
    double thr);

/// Tracking-every-thing accuracy for one class filter. Per frame,
/// class-agnostic optimal matching splits boxes into matched pairs and
/// localization errors; classification compares per-pair classes;
/// association scores identity consistency per matched pair.
TetaScores teta_scores(const std::vector<TrackRecord>& preds,
                       const std::vector<Annotation>& gts,
                       const TetaConfig& cfg,
                       const std::optional<std::set<int>>& class_filter = {});

/// Full report: unfiltered plus base- and novel-split sections. Split
/// sections restrict ground truth to the split's classes and predictions
/// to those predicted as a split class.
TetaReport teta(const std::vector<TrackRecord>& preds,
                const std::vector<Annotation>& gts,
                const ClassVocabulary& vocab, const TetaConfig& cfg);

/// Spatio-temporal IoU of two tracks given as frame -> box maps: the sum
/// of per-frame intersections over the sum of per-frame unions, where
/// frames covered by only one side contribute that box's area to the
/// union.
double iou_3d(const std::map<int, BoundingBox>& a,
              const std::map<int, BoundingBox>& b);

struct TrackMapScores {
  // threshold -> class id -> average precision
  std::map<double, std::map<int, double>> ap;
  double map50 = 0.0;
  double map75 = 0.0;
  double map = 0.0;  // mean over the threshold set
  bool empty_gt = false;
};

struct TrackMapReport {
  TrackMapScores all;
  TrackMapScores base;
  TrackMapScores novel;
};

/// Track-level average precision: per class and IoU threshold, predictions
/// sorted by track confidence greedily claim unmatched ground-truth tracks
/// of the same class; AP integrates the all-point precision envelope; mAP
/// averages over the classes present in the ground truth.
TrackMapScores track_map_scores(
    const std::vector<TrackRecord>& preds, const std::vector<Annotation>& gts,
    const std::vector<double>& thresholds,
    const std::optional<std::set<int>>& class_filter = {});

TrackMapReport track_map(const std::vector<TrackRecord>& preds,
                         const std::vector<Annotation>& gts,
                         const ClassVocabulary& vocab,
                         const std::vector<double>& thresholds = {0.5, 0.75});

/// Class-id sets for the two splits of a vocabulary.
std::set<int> split_classes(const ClassVocabulary& vocab, ClassSplit split);

}  // namespace ovtrack
