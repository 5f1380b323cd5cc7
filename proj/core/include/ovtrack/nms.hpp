#pragma once

#include <span>
#include <vector>

#include "ovtrack/types.hpp"

namespace ovtrack {

/// Greedy non-maximum suppression. Detections are visited in descending
/// score order (ties broken by lower input index); a detection is dropped
/// when its IoU with an already kept one exceeds `iou_thr`. When
/// `class_agnostic` is false, suppression only applies between detections
/// of the same class and `classes` must supply one class id per detection.
///
/// Returns the kept input indices in visit order.
std::vector<int> nms_keep(const std::vector<Detection>& dets, double iou_thr,
                          bool class_agnostic,
                          std::span<const int> classes = {});

/// Same as nms_keep but returns the surviving detections themselves.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr,
                           bool class_agnostic,
                           std::span<const int> classes = {});

}  // namespace ovtrack
