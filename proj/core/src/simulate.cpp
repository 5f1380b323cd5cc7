#include "ovtrack/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ovtrack/error.hpp"
#include "ovtrack/rng.hpp"
#include "ovtrack/vecmath.hpp"

namespace ovtrack {

namespace {

constexpr double kPlaneSize = 1000.0;
constexpr double kCellSize = 140.0;
constexpr double kMaxMutualCos = 0.3;

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

// Unit vectors whose pairwise |cos| stays below the bound; per-vector
// rejection sampling, which gets infeasible when count >> dim.
std::vector<std::vector<double>> near_orthogonal_set(int count, int dim,
                                                     Rng& rng) {
  std::vector<std::vector<double>> vecs;
  vecs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      std::vector<double> v = rng.unit_vector(dim);
      bool ok = true;
      for (const auto& other : vecs) {
        if (std::abs(dot(v, other)) > kMaxMutualCos) {
          ok = false;
          break;
        }
      }
      if (ok) {
        vecs.push_back(std::move(v));
        placed = true;
      }
    }
    if (!placed) {
      throw InputError(
          "generate_scenario: cannot place near-orthogonal embeddings; "
          "raise embed_dim or lower the identity/class count");
    }
  }
  return vecs;
}

std::vector<double> noisy_direction(const std::vector<double>& base,
                                    double stdev, Rng& rng) {
  if (stdev <= 0.0) return base;
  std::vector<double> v = base;
  for (double& x : v) x += rng.normal(0.0, stdev);
  if (l2_norm(v) <= 1e-9) return base;
  return normalized(v);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(videos > 0, "scenario: videos must be > 0");
  require(frames_per_video > 0, "scenario: frames_per_video must be > 0");
  require(identities_per_video > 0, "scenario: identities_per_video must be > 0");
  require(embed_dim > 0, "scenario: embed_dim must be > 0");
  require(classes > 0, "scenario: classes must be > 0");
  require(embed_noise >= 0.0, "scenario: embed_noise must be >= 0");
  require(fn_rate >= 0.0 && fn_rate <= 1.0, "scenario: fn_rate must be in [0, 1]");
  require(fp_rate >= 0.0 && fp_rate <= 1.0, "scenario: fp_rate must be in [0, 1]");
  require(box_jitter >= 0.0, "scenario: box_jitter must be >= 0");
  for (const auto& occ : occlusions) {
    require(occ.length >= 0, "scenario: occlusion length must be >= 0");
  }
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);

  Scenario scenario;

  // Vocabulary: near-orthogonal class embeddings plus a background vector,
  // split alternating base/novel.
  {
    const auto embeds = near_orthogonal_set(cfg.classes + 1, cfg.embed_dim, master);
    scenario.vocab.background_embed = embeds.back();
    for (int c = 0; c < cfg.classes; ++c) {
      VocabEntry entry;
      entry.class_id = c;
      entry.name = "class_" + std::to_string(c);
      entry.embed = embeds[static_cast<std::size_t>(c)];
      entry.split = (c % 2 == 0) ? ClassSplit::kBase : ClassSplit::kNovel;
      scenario.vocab.classes.push_back(std::move(entry));
    }
    scenario.vocab.validate();
  }

  const int grid_cols = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(cfg.identities_per_video))));

  for (int v = 0; v < cfg.videos; ++v) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(v)));
    VideoDetections video;
    video.video = "video_" + std::to_string(v);
    video.frames.resize(static_cast<std::size_t>(cfg.frames_per_video));

    const auto latents =
        near_orthogonal_set(cfg.identities_per_video, cfg.embed_dim, rng);

    struct IdentityState {
      int id;
      int class_id;
      double x, y, vx, vy, w, h;
    };
    std::vector<IdentityState> identities;
    for (int j = 0; j < cfg.identities_per_video; ++j) {
      IdentityState ident;
      ident.id = v * cfg.identities_per_video + j;
      ident.class_id = ident.id % cfg.classes;
      // Grid layout with bounded drift keeps boxes disjoint in every frame.
      ident.x = 80.0 + kCellSize * (j % grid_cols);
      ident.y = 80.0 + kCellSize * (j / grid_cols);
      ident.vx = rng.uniform(-2.0, 2.0);
      ident.vy = rng.uniform(-2.0, 2.0);
      ident.w = rng.uniform(24.0, 48.0);
      ident.h = rng.uniform(24.0, 48.0);
      identities.push_back(ident);
      scenario.identity_latents[ident.id] = latents[static_cast<std::size_t>(j)];
    }

    for (int t = 0; t < cfg.frames_per_video; ++t) {
      auto& frame_dets = video.frames[static_cast<std::size_t>(t)];
      for (int j = 0; j < cfg.identities_per_video; ++j) {
        const IdentityState& ident = identities[static_cast<std::size_t>(j)];

        bool occluded = false;
        for (const auto& occ : cfg.occlusions) {
          if (occ.identity == ident.id && t >= occ.start &&
              t < occ.start + occ.length) {
            occluded = true;
            break;
          }
        }
        if (occluded) continue;

        BoundingBox box{ident.x + ident.vx * t, ident.y + ident.vy * t,
                        ident.w, ident.h};
        scenario.ground_truth.push_back(
            {ident.id, video.video, t, box, ident.class_id});

        if (cfg.fn_rate > 0.0 && rng.bernoulli(cfg.fn_rate)) continue;

        Detection det;
        det.video = video.video;
        det.frame = t;
        det.box = box;
        if (cfg.box_jitter > 0.0) {
          det.box.x += rng.uniform(-cfg.box_jitter, cfg.box_jitter);
          det.box.y += rng.uniform(-cfg.box_jitter, cfg.box_jitter);
          det.box.w = std::max(2.0, det.box.w + rng.uniform(-cfg.box_jitter,
                                                            cfg.box_jitter));
          det.box.h = std::max(2.0, det.box.h + rng.uniform(-cfg.box_jitter,
                                                            cfg.box_jitter));
        }
        det.score = rng.uniform(0.7, 1.0);
        det.appearance = noisy_direction(scenario.identity_latents[ident.id],
                                         cfg.embed_noise, rng);
        det.text_embed = noisy_direction(
            scenario.vocab.classes[static_cast<std::size_t>(ident.class_id)].embed,
            0.25 * cfg.embed_noise, rng);
        frame_dets.push_back(std::move(det));
      }

      // Clutter detections with random appearance, one roll per identity slot.
      if (cfg.fp_rate > 0.0) {
        for (int j = 0; j < cfg.identities_per_video; ++j) {
          if (!rng.bernoulli(cfg.fp_rate)) continue;
          Detection det;
          det.video = video.video;
          det.frame = t;
          det.box = {rng.uniform(60.0, kPlaneSize - 60.0),
                     rng.uniform(60.0, kPlaneSize - 60.0),
                     rng.uniform(24.0, 48.0), rng.uniform(24.0, 48.0)};
          det.score = rng.uniform(0.0001, 1.0);
          det.appearance = rng.unit_vector(cfg.embed_dim);
          det.text_embed = rng.unit_vector(cfg.embed_dim);
          frame_dets.push_back(std::move(det));
        }
      }
    }
    scenario.detections.push_back(std::move(video));
  }
  return scenario;
}

EndToEndResult run_end_to_end(const ScenarioConfig& cfg,
                              const AssociationConfig& assoc_cfg,
                              const ClassifierConfig& cls_cfg,
                              const TetaConfig& teta_cfg) {
  const Scenario scenario = generate_scenario(cfg);

  EndToEndResult result;
  for (const auto& video : scenario.detections) {
    const std::vector<Track> tracks =
        track_video(video.frames, scenario.vocab, cls_cfg, assoc_cfg);
    const std::vector<TrackRecord> records = track_records(tracks, video.video);
    result.records.insert(result.records.end(), records.begin(), records.end());
  }
  result.teta = teta(result.records, scenario.ground_truth, scenario.vocab,
                     teta_cfg);
  result.track_map = track_map(result.records, scenario.ground_truth,
                               scenario.vocab);
  return result;
}

}  // namespace ovtrack
