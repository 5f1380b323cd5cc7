#include "ovtrack/nms.hpp"

#include <algorithm>
#include <numeric>

#include "ovtrack/error.hpp"

namespace ovtrack {

std::vector<int> nms_keep(const std::vector<Detection>& dets, double iou_thr,
                          bool class_agnostic, std::span<const int> classes) {
  if (!class_agnostic && classes.size() != dets.size()) {
    throw InputError("nms: class-aware mode needs one class per detection");
  }
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[static_cast<std::size_t>(a)].score >
           dets[static_cast<std::size_t>(b)].score;
  });

  std::vector<int> kept;
  kept.reserve(dets.size());
  for (int idx : order) {
    const auto& cand = dets[static_cast<std::size_t>(idx)];
    bool keep = true;
    for (int k : kept) {
      if (!class_agnostic &&
          classes[static_cast<std::size_t>(k)] !=
              classes[static_cast<std::size_t>(idx)]) {
        continue;
      }
      if (iou_2d(cand.box, dets[static_cast<std::size_t>(k)].box) > iou_thr) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(idx);
  }
  return kept;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr,
                           bool class_agnostic, std::span<const int> classes) {
  std::vector<Detection> out;
  for (int idx : nms_keep(dets, iou_thr, class_agnostic, classes)) {
    out.push_back(dets[static_cast<std::size_t>(idx)]);
  }
  return out;
}

}  // namespace ovtrack
