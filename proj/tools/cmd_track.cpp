#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "ovtrack/association.hpp"
#include "ovtrack/io.hpp"

namespace ovtrack::cli {

int worker_threads(std::size_t jobs) {
  unsigned cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("OVTRACK_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested > 0) cap = static_cast<unsigned>(requested);
  }
  return static_cast<int>(std::min<std::size_t>(cap, std::max<std::size_t>(jobs, 1)));
}

int run_track(const TrackOptions& opt) {
  const auto frames = read_detections(opt.detections);
  const ClassVocabulary vocab = read_vocabulary(opt.vocab);
  const auto videos = group_by_video(frames);

  AssociationConfig assoc;
  assoc.beta = opt.beta;
  assoc.gamma = opt.gamma;
  assoc.beta_obj = opt.beta_obj;
  assoc.memory_frames = opt.memory;
  assoc.cosine_gate = opt.cosine_gate;
  assoc.nms_iou = opt.nms;
  assoc.nms_class_agnostic = opt.nms_mode == "agnostic";
  assoc.validate();
  ClassifierConfig cls;
  cls.temperature = opt.lambda;

  std::vector<std::vector<TrackRecord>> per_video(videos.size());
  const int n_workers = worker_threads(videos.size());

  std::atomic<std::size_t> cursor{0};
  std::vector<std::exception_ptr> errors(
      static_cast<std::size_t>(n_workers), nullptr);
  std::vector<std::thread> workers;
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= videos.size()) break;
          const auto tracks = track_video(videos[i].second, vocab, cls, assoc);
          per_video[i] = track_records(tracks, videos[i].first);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<TrackRecord> records;
  for (const auto& chunk : per_video) {
    records.insert(records.end(), chunk.begin(), chunk.end());
  }
  write_tracks(opt.out, records);
  return 0;
}

}  // namespace ovtrack::cli
