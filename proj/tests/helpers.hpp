#pragma once

#include <random>
#include <string>
#include <vector>

#include "ovtrack/types.hpp"
#include "ovtrack/vocabulary.hpp"

namespace ovtrack::testing {

inline BoundingBox random_box(std::mt19937_64& gen, double span = 100.0) {
  std::uniform_real_distribution<double> pos(0.0, span);
  std::uniform_real_distribution<double> size(4.0, 30.0);
  return {pos(gen), pos(gen), size(gen), size(gen)};
}

inline std::vector<double> random_unit(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(gen);
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

/// Tiny random evaluation instances on a coarse integer grid; spacing keeps
/// near-ties either exact or far apart, which the exhaustive reference and
/// the assignment solver resolve identically.
struct TinyInstance {
  std::vector<TrackRecord> preds;
  std::vector<Annotation> gts;
};

inline TinyInstance random_tiny_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_tracks(0, 4);
  std::uniform_int_distribution<int> n_frames(1, 4);
  std::uniform_int_distribution<int> coord(0, 5);
  std::uniform_int_distribution<int> size(1, 3);
  std::uniform_int_distribution<int> cls(0, 1);
  std::uniform_int_distribution<int> shift(-1, 2);
  std::uniform_int_distribution<int> score_step(1, 9);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(0.2);

  TinyInstance inst;
  const int frames = n_frames(gen);
  const int gts = n_tracks(gen);
  for (int id = 0; id < gts; ++id) {
    const int cls_id = cls(gen);
    for (int t = 0; t < frames; ++t) {
      if (rare(gen)) continue;  // holes in the ground truth
      BoundingBox box{6.0 * coord(gen), 6.0 * coord(gen), 8.0 * size(gen),
                      8.0 * size(gen)};
      inst.gts.push_back({id, "v", t, box, cls_id});
    }
  }

  const int preds = n_tracks(gen);
  for (int id = 0; id < preds; ++id) {
    const int cls_id = cls(gen);
    for (int t = 0; t < frames; ++t) {
      if (rare(gen)) continue;
      BoundingBox box;
      if (!inst.gts.empty() && coin(gen)) {
        // Perturbed copy of some annotation: overlap-heavy pairs.
        const auto& base =
            inst.gts[std::uniform_int_distribution<std::size_t>(
                0, inst.gts.size() - 1)(gen)];
        box = base.box;
        box.x += 2.0 * shift(gen);
        box.y += 2.0 * shift(gen);
      } else {
        box = {6.0 * coord(gen), 6.0 * coord(gen), 8.0 * size(gen),
               8.0 * size(gen)};
      }
      inst.preds.push_back(
          {"v", t, id, box, 0.1 * score_step(gen), cls_id});
    }
  }
  // Instances must have ground truth for every referenced video.
  if (inst.gts.empty() && !inst.preds.empty()) {
    inst.gts.push_back({0, "v", 0, {90.0, 90.0, 4.0, 4.0}, 0});
  }
  return inst;
}

inline ClassVocabulary two_class_vocab() {
  ClassVocabulary vocab;
  vocab.background_embed = {1.0, 0.0, 0.0};
  vocab.classes.push_back({0, "zero", {0.0, 1.0, 0.0}, ClassSplit::kBase});
  vocab.classes.push_back({1, "one", {0.0, 0.0, 1.0}, ClassSplit::kNovel});
  return vocab;
}

}  // namespace ovtrack::testing
