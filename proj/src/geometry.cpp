#include "trackadv/geometry.hpp"

#include <algorithm>

namespace trackadv {

Point center(const BBox& b) { return Point{b.cx, b.cy}; }

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
  const double iy = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

double cle(const BBox& a, const BBox& b) {
  return distance(center(a), center(b));
}

double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace trackadv
