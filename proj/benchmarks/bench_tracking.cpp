#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ovtrack/association.hpp"
#include "ovtrack/diffusion.hpp"
#include "ovtrack/metrics.hpp"
#include "ovtrack/nms.hpp"
#include "ovtrack/rng.hpp"
#include "ovtrack/simulate.hpp"

namespace {

using namespace ovtrack;

std::vector<Detection> random_dets(int count, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> pos(0.0, 800.0);
  std::uniform_real_distribution<double> size(10.0, 60.0);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<Detection> dets(static_cast<std::size_t>(count));
  for (auto& det : dets) {
    det.box = {pos(gen), pos(gen), size(gen), size(gen)};
    det.score = score(gen);
    det.appearance = {1.0};
  }
  return dets;
}

void BM_Nms(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const auto dets = random_dets(static_cast<int>(state.range(0)), gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nms_keep(dets, 0.5, true));
  }
}
BENCHMARK(BM_Nms)->Arg(50)->Arg(200);

void BM_BisoftmaxScores(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  std::vector<std::vector<double>> dets, trks;
  for (int i = 0; i < n; ++i) {
    dets.push_back(rng.unit_vector(64));
    trks.push_back(rng.unit_vector(64));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(bisoftmax_scores(dets, trks));
  }
}
BENCHMARK(BM_BisoftmaxScores)->Arg(16)->Arg(64);

void BM_MatchFrame(benchmark::State& state) {
  std::mt19937_64 gen(3);
  const int n = static_cast<int>(state.range(0));
  const auto preds = random_dets(n, gen);
  const auto gts = random_dets(n, gen);
  std::vector<BoundingBox> pred_boxes, gt_boxes;
  for (const auto& d : preds) pred_boxes.push_back(d.box);
  for (const auto& d : gts) gt_boxes.push_back(d.box);
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_frame(pred_boxes, gt_boxes, 0.5));
  }
}
BENCHMARK(BM_MatchFrame)->Arg(8)->Arg(32)->Arg(96);

void BM_TrackVideo(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.videos = 1;
  cfg.frames_per_video = 50;
  cfg.identities_per_video = static_cast<int>(state.range(0));
  cfg.embed_dim = 32;
  cfg.classes = 4;
  cfg.seed = 5;
  const Scenario scenario = generate_scenario(cfg);
  AssociationConfig assoc;
  assoc.beta = 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        track_video(scenario.detections[0].frames, scenario.vocab, {0.07},
                    assoc));
  }
}
BENCHMARK(BM_TrackVideo)->Arg(4)->Arg(8);

void BM_Teta(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.videos = 2;
  cfg.frames_per_video = 50;
  cfg.identities_per_video = 8;
  cfg.embed_dim = 32;
  cfg.classes = 4;
  cfg.seed = 6;
  const Scenario scenario = generate_scenario(cfg);
  AssociationConfig assoc;
  assoc.beta = 0.2;
  std::vector<TrackRecord> records;
  for (const auto& video : scenario.detections) {
    const auto tracks =
        track_video(video.frames, scenario.vocab, {0.07}, assoc);
    const auto recs = track_records(tracks, video.video);
    records.insert(records.end(), recs.begin(), recs.end());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        teta_scores(records, scenario.ground_truth, {}));
  }
}
BENCHMARK(BM_Teta);

void BM_MaskedDenoise(benchmark::State& state) {
  LatentGrid ref = LatentGrid::filled(32, 32, 1, 0.0);
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    ref.values[i] = 0.01 * static_cast<double>(i % 100) - 0.5;
  }
  ForegroundMask mask = ForegroundMask::zeros(32, 32);
  for (int y = 8; y < 24; ++y) {
    for (int x = 8; x < 24; ++x) mask.at(x, y) = 1.0;
  }
  HallucConfig cfg;
  const NoiseSchedule sched = make_schedule(cfg);
  const ToyDenoiser denoiser(ref);
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(
        masked_denoise(ref, mask, denoiser, sched, cfg, rng));
  }
}
BENCHMARK(BM_MaskedDenoise);

}  // namespace

BENCHMARK_MAIN();
