#include "trackadv/grid.hpp"

#include <algorithm>
#include <cmath>

#include "trackadv/errors.hpp"

namespace trackadv {

namespace {

double clip255(double v) { return std::clamp(v, 0.0, 255.0); }

void require_same_shape(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatchError(std::string(what) + ": shapes differ");
  }
}

}  // namespace

IntRect round_rect(const BBox& b) {
  IntRect r;
  r.w = static_cast<int>(std::lround(b.w));
  r.h = static_cast<int>(std::lround(b.h));
  r.x0 = static_cast<int>(std::lround(b.cx - 0.5 * b.w));
  r.y0 = static_cast<int>(std::lround(b.cy - 0.5 * b.h));
  return r;
}

std::vector<double> channel_means(const Grid& g) {
  std::vector<double> means(static_cast<std::size_t>(g.c), 0.0);
  if (g.empty()) return means;
  const std::size_t pixels = static_cast<std::size_t>(g.h) * g.w;
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int ch = 0; ch < g.c; ++ch) {
      means[ch] += g.data[p * g.c + ch];
    }
  }
  for (int ch = 0; ch < g.c; ++ch) means[ch] /= static_cast<double>(pixels);
  return means;
}

Grid crop(const Grid& src, const IntRect& rect, PadMode pad) {
  if (rect.w < 1 || rect.h < 1) {
    throw EmptyRegionError("crop: rounded region has no area");
  }
  std::vector<double> fill(static_cast<std::size_t>(src.c), 0.0);
  if (pad == PadMode::mean) fill = channel_means(src);

  Grid out(rect.h, rect.w, src.c);
  for (int y = 0; y < rect.h; ++y) {
    const int sy = rect.y0 + y;
    for (int x = 0; x < rect.w; ++x) {
      const int sx = rect.x0 + x;
      const bool inside = sy >= 0 && sy < src.h && sx >= 0 && sx < src.w;
      for (int ch = 0; ch < src.c; ++ch) {
        out.at(y, x, ch) = inside ? src.at(sy, sx, ch) : fill[ch];
      }
    }
  }
  return out;
}

Grid crop(const Grid& src, const BBox& region, PadMode pad) {
  return crop(src, round_rect(region), pad);
}

Grid embed(int h, int w, int c, const IntRect& rect, const Grid& patch) {
  if (patch.h != rect.h || patch.w != rect.w || patch.c != c) {
    throw ShapeMismatchError("embed: patch shape does not match region");
  }
  Grid out(h, w, c);
  for (int y = 0; y < rect.h; ++y) {
    const int dy = rect.y0 + y;
    if (dy < 0 || dy >= h) continue;
    for (int x = 0; x < rect.w; ++x) {
      const int dx = rect.x0 + x;
      if (dx < 0 || dx >= w) continue;
      for (int ch = 0; ch < c; ++ch) {
        out.at(dy, dx, ch) = patch.at(y, x, ch);
      }
    }
  }
  return out;
}

Grid embed(int h, int w, int c, const BBox& region, const Grid& patch) {
  return embed(h, w, c, round_rect(region), patch);
}

Frame apply(const Frame& frame, const Perturbation& pert) {
  require_same_shape(frame, pert, "apply");
  Frame out = frame;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = clip255(out.data[i] + pert.data[i]);
  }
  return out;
}

Frame visualize_perturbation(const Perturbation& pert, double gain) {
  Frame out = pert;
  for (double& v : out.data) v = clip255(std::abs(v) * gain);
  return out;
}

double mean_abs(const Grid& g) {
  if (g.empty()) return 0.0;
  double acc = 0.0;
  for (double v : g.data) acc += std::abs(v);
  return acc / static_cast<double>(g.data.size());
}

double max_abs(const Grid& g) {
  double m = 0.0;
  for (double v : g.data) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Grid& g) {
  for (double v : g.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Grid add(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "add");
  Grid out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Grid sub(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "sub");
  Grid out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

void add_in_place(Grid& a, const Grid& b) {
  require_same_shape(a, b, "add_in_place");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

}  // namespace trackadv
