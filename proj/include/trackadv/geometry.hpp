#pragma once

#include <cmath>

namespace trackadv {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in center-size form, sub-pixel coordinates.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x0() const { return cx - 0.5 * w; }
  double y0() const { return cy - 0.5 * h; }
  double x1() const { return cx + 0.5 * w; }
  double y1() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  bool valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(cx) && std::isfinite(cy) &&
           std::isfinite(w) && std::isfinite(h);
  }

  static BBox from_corners(double x0, double y0, double x1, double y1) {
    return BBox{0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0};
  }
};

Point center(const BBox& b);

/// Intersection over union. Boxes that merely touch (zero-area overlap)
/// count as disjoint and return 0.
double iou(const BBox& a, const BBox& b);

/// Center location error: Euclidean distance between box centers.
double cle(const BBox& a, const BBox& b);

double distance(const Point& a, const Point& b);

}  // namespace trackadv
