#pragma once

#include <cmath>

namespace ovtrack {

/// Axis-aligned box. (x, y) is the center in pixel coordinates and (w, h)
/// are the full width and height; both extents must be positive.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double left() const { return x - 0.5 * w; }
  double right() const { return x + 0.5 * w; }
  double top() const { return y - 0.5 * h; }
  double bottom() const { return y + 0.5 * h; }

  bool valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(w) && std::isfinite(h);
  }

  bool operator==(const BoundingBox&) const = default;
};

/// Overlap area of two boxes; 0 when disjoint.
double intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union in [0, 1]. Symmetric, 0 for disjoint boxes.
double iou_2d(const BoundingBox& a, const BoundingBox& b);

}  // namespace ovtrack
