#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "commands.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/io.hpp"
#include "ovtrack/metrics.hpp"

namespace ovtrack::cli {

namespace {

using nlohmann::json;

json teta_section(const TetaScores& s) {
  return json{{"teta", s.teta},
              {"loc_a", s.loc_a},
              {"assoc_a", s.assoc_a},
              {"cls_a", s.cls_a},
              {"empty_gt", s.empty_gt},
              {"counts",
               {{"tpl", s.tpl},
                {"fpl", s.fpl},
                {"fnl", s.fnl},
                {"tpc", s.tpc},
                {"fpc", s.fpc},
                {"fnc", s.fnc},
                {"tpa", s.tpa},
                {"fpa", s.fpa},
                {"fna", s.fna}}}};
}

json track_map_section(const TrackMapScores& s) {
  json per_class = json::object();
  for (const auto& [thr, by_class] : s.ap) {
    json entry = json::object();
    for (const auto& [cls, ap] : by_class) {
      entry[std::to_string(cls)] = ap;
    }
    char key[32];
    std::snprintf(key, sizeof(key), "%.2f", thr);
    per_class[key] = std::move(entry);
  }
  return json{{"map", s.map},
              {"map50", s.map50},
              {"map75", s.map75},
              {"empty_gt", s.empty_gt},
              {"ap", std::move(per_class)}};
}

void print_teta_row(const char* name, const TetaScores& s) {
  if (s.empty_gt) {
    std::printf("  %-6s (empty split)\n", name);
    return;
  }
  std::printf("  %-6s TETA %.4f  LocA %.4f  AssocA %.4f  ClsA %.4f  "
              "(TPL %lld FPL %lld FNL %lld)\n",
              name, s.teta, s.loc_a, s.assoc_a, s.cls_a, s.tpl, s.fpl, s.fnl);
}

void print_map_row(const char* name, const TrackMapScores& s) {
  if (s.empty_gt) {
    std::printf("  %-6s (empty split)\n", name);
    return;
  }
  std::printf("  %-6s mAP %.4f  mAP50 %.4f  mAP75 %.4f\n", name, s.map,
              s.map50, s.map75);
}

}  // namespace

int run_eval(const EvalOptions& opt) {
  const auto records = read_tracks(opt.tracks);
  const GroundTruthData gt = read_ground_truth(opt.gt);
  const ClassVocabulary vocab = read_vocabulary(opt.vocab);

  for (const auto& anno : gt.annotations) {
    if (!vocab.contains(anno.class_id)) {
      throw InputError("eval: ground-truth category " +
                       std::to_string(anno.class_id) +
                       " is not in the vocabulary");
    }
  }
  for (const auto& rec : records) {
    if (rec.class_id != kBackgroundClassId && !vocab.contains(rec.class_id)) {
      throw InputError("eval: track category " + std::to_string(rec.class_id) +
                       " is not in the vocabulary");
    }
  }

  TetaConfig teta_cfg;
  teta_cfg.loc_iou_thr = opt.loc_iou;
  teta_cfg.assoc_counts = opt.assoc_counts == "tpl"
                              ? TetaConfig::AssocCounts::kTplOnly
                              : TetaConfig::AssocCounts::kHotaStyle;

  const bool want_teta = opt.metric == "teta" || opt.metric == "both";
  const bool want_map = opt.metric == "trackmap" || opt.metric == "both";
  const bool want_all = opt.split == "all";
  const bool want_base = opt.split == "all" || opt.split == "base";
  const bool want_novel = opt.split == "all" || opt.split == "novel";

  json report;
  report["config"] = {{"metric", opt.metric},
                      {"split", opt.split},
                      {"loc_iou", opt.loc_iou},
                      {"assoc_counts", opt.assoc_counts},
                      {"thresholds", opt.thresholds}};

  if (want_teta) {
    const TetaReport scores = teta(records, gt.annotations, vocab, teta_cfg);
    json section = json::object();
    if (want_all) section["all"] = teta_section(scores.all);
    if (want_base) section["base"] = teta_section(scores.base);
    if (want_novel) section["novel"] = teta_section(scores.novel);
    report["teta"] = std::move(section);

    std::printf("TETA (loc IoU %.2f)\n", opt.loc_iou);
    if (want_all) print_teta_row("all", scores.all);
    if (want_base) print_teta_row("base", scores.base);
    if (want_novel) print_teta_row("novel", scores.novel);
  }

  if (want_map) {
    const TrackMapReport scores =
        track_map(records, gt.annotations, vocab, opt.thresholds);
    json section = json::object();
    if (want_all) section["all"] = track_map_section(scores.all);
    if (want_base) section["base"] = track_map_section(scores.base);
    if (want_novel) section["novel"] = track_map_section(scores.novel);
    report["track_map"] = std::move(section);

    std::printf("Track mAP\n");
    if (want_all) print_map_row("all", scores.all);
    if (want_base) print_map_row("base", scores.base);
    if (want_novel) print_map_row("novel", scores.novel);
  }

  if (!opt.report.empty()) {
    std::ofstream out(opt.report, std::ios::trunc);
    if (!out) throw ParseError("cannot open " + opt.report + " for writing");
    out << report.dump(2) << '\n';
  }
  return 0;
}

}  // namespace ovtrack::cli
