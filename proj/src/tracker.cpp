#include "trackadv/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trackadv/errors.hpp"

namespace trackadv {

namespace {

// Relative variance floor below which a patch counts as constant.
constexpr double kZeroVarianceRel = 1e-12;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

Grid box_blur(const Grid& in, int k) {
  const int r = k / 2;
  const double inv = 1.0 / (k * k);
  Grid out(in.h, in.w, in.c);
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      for (int ch = 0; ch < in.c; ++ch) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          const int sy = clampi(y + dy, 0, in.h - 1);
          for (int dx = -r; dx <= r; ++dx) {
            const int sx = clampi(x + dx, 0, in.w - 1);
            acc += in.at(sy, sx, ch);
          }
        }
        out.at(y, x, ch) = acc * inv;
      }
    }
  }
  return out;
}

// Transpose of box_blur with clamp-to-edge reads: gradients scatter back
// into the clamped source pixels.
Grid box_blur_adjoint(const Grid& g, int k) {
  const int r = k / 2;
  const double inv = 1.0 / (k * k);
  Grid out(g.h, g.w, g.c);
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      for (int ch = 0; ch < g.c; ++ch) {
        const double v = g.at(y, x, ch) * inv;
        if (v == 0.0) continue;
        for (int dy = -r; dy <= r; ++dy) {
          const int sy = clampi(y + dy, 0, g.h - 1);
          for (int dx = -r; dx <= r; ++dx) {
            const int sx = clampi(x + dx, 0, g.w - 1);
            out.at(sy, sx, ch) += v;
          }
        }
      }
    }
  }
  return out;
}

// Summed-area tables over channel-summed values and their squares; one extra
// row/column of zeros so rectangle sums are four lookups.
struct IntegralPair {
  int h = 0, w = 0;
  std::vector<double> s1;
  std::vector<double> s2;

  explicit IntegralPair(const Grid& g) : h(g.h), w(g.w) {
    s1.assign(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
    s2.assign(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
    for (int y = 0; y < h; ++y) {
      double row1 = 0.0, row2 = 0.0;
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < g.c; ++ch) {
          const double v = g.at(y, x, ch);
          row1 += v;
          row2 += v * v;
        }
        const std::size_t idx = static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1);
        const std::size_t up = static_cast<std::size_t>(y) * (w + 1) + (x + 1);
        s1[idx] = s1[up] + row1;
        s2[idx] = s2[up] + row2;
      }
    }
  }

  // Sum over rows [y0, y0+bh) and cols [x0, x0+bw).
  void rect(int y0, int x0, int bh, int bw, double& sum1, double& sum2) const {
    const std::size_t a = static_cast<std::size_t>(y0) * (w + 1) + x0;
    const std::size_t b = static_cast<std::size_t>(y0) * (w + 1) + (x0 + bw);
    const std::size_t c = static_cast<std::size_t>(y0 + bh) * (w + 1) + x0;
    const std::size_t d =
        static_cast<std::size_t>(y0 + bh) * (w + 1) + (x0 + bw);
    sum1 = s1[d] - s1[b] - s1[c] + s1[a];
    sum2 = s2[d] - s2[b] - s2[c] + s2[a];
  }
};

struct PatchStats {
  double denom = 0.0;  // ||patch - mean(patch)||
  bool zero_variance = true;
};

PatchStats patch_stats(const IntegralPair& ii, int r, int c, int th, int tw,
                       int n) {
  double sum1 = 0.0, sum2 = 0.0;
  ii.rect(r, c, th, tw, sum1, sum2);
  const double var_energy = sum2 - sum1 * sum1 / n;
  PatchStats st;
  if (var_energy > kZeroVarianceRel * std::max(sum2, 1.0)) {
    st.denom = std::sqrt(var_energy);
    st.zero_variance = false;
  }
  return st;
}

}  // namespace

Grid FeatureKernel::apply(const Grid& pixels) const {
  switch (kind) {
    case KernelKind::identity:
      return pixels;
    case KernelKind::box_blur_3:
      return box_blur(pixels, 3);
    case KernelKind::box_blur_5:
      return box_blur(pixels, 5);
    case KernelKind::center_surround:
      return sub(pixels, box_blur(pixels, 3));
  }
  return pixels;
}

Grid FeatureKernel::adjoint(const Grid& grad_features) const {
  switch (kind) {
    case KernelKind::identity:
      return grad_features;
    case KernelKind::box_blur_3:
      return box_blur_adjoint(grad_features, 3);
    case KernelKind::box_blur_5:
      return box_blur_adjoint(grad_features, 5);
    case KernelKind::center_surround:
      return sub(grad_features, box_blur_adjoint(grad_features, 3));
  }
  return grad_features;
}

std::string FeatureKernel::name() const {
  switch (kind) {
    case KernelKind::identity: return "identity";
    case KernelKind::box_blur_3: return "box_blur_3";
    case KernelKind::box_blur_5: return "box_blur_5";
    case KernelKind::center_surround: return "center_surround";
  }
  return "identity";
}

FeatureKernel FeatureKernel::from_name(const std::string& name) {
  if (name == "identity") return {KernelKind::identity};
  if (name == "box_blur_3") return {KernelKind::box_blur_3};
  if (name == "box_blur_5") return {KernelKind::box_blur_5};
  if (name == "center_surround") return {KernelKind::center_surround};
  throw ConfigError("unknown feature kernel: " + name);
}

TrackerState init_tracker(const Frame& frame0, const BBox& gt0,
                          const FeatureKernel& kernel, double context_factor) {
  TrackerState state;
  state.kernel = kernel;
  state.template_box = gt0;
  state.prev_box = gt0;
  state.context_factor = context_factor;

  const Grid patch = crop(frame0, gt0, PadMode::mean);
  Grid feat = kernel.apply(patch);

  double mean = 0.0;
  for (double v : feat.data) mean += v;
  mean /= static_cast<double>(feat.data.size());
  double norm2 = 0.0;
  for (double& v : feat.data) {
    v -= mean;
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0)) {
    throw ConfigError("init_tracker: template has zero variance");
  }
  for (double& v : feat.data) v /= norm;

  state.template_hat = std::move(feat);
  state.template_norm = norm;
  state.template_h = patch.h;
  state.template_w = patch.w;
  return state;
}

SearchRegion search_region_at(const TrackerState& state, const Frame& frame,
                              const BBox& center_box, double context) {
  const double ctx = context > 0.0 ? context : state.context_factor;
  const int side = static_cast<int>(std::lround(
      ctx * std::max(state.template_w, state.template_h)));
  const Point c = center(center_box);
  IntRect rect;
  rect.w = side;
  rect.h = side;
  rect.x0 = static_cast<int>(std::lround(c.x - 0.5 * side));
  rect.y0 = static_cast<int>(std::lround(c.y - 0.5 * side));

  SearchRegion region;
  region.pixels = crop(frame, rect, PadMode::mean);
  region.origin = Point{static_cast<double>(rect.x0),
                        static_cast<double>(rect.y0)};
  region.rect = rect;
  return region;
}

SearchRegion search_region(const TrackerState& state, const Frame& frame) {
  return search_region_at(state, frame, state.prev_box, 0.0);
}

ResponseMap respond(const TrackerState& state, const Frame& region,
                    Point region_origin) {
  const int th = state.template_h;
  const int tw = state.template_w;
  if (region.h < th || region.w < tw || region.c != state.template_hat.c) {
    throw RegionTooSmallError("respond: region smaller than template");
  }

  const Grid feat = state.kernel.apply(region);
  const IntegralPair ii(feat);

  ResponseMap map;
  map.rows = region.h - th + 1;
  map.cols = region.w - tw + 1;
  map.activations.assign(static_cast<std::size_t>(map.rows) * map.cols, 0.0);
  map.region_origin = region_origin;
  map.box_w = tw;
  map.box_h = th;

  const int c = feat.c;
  const int n = th * tw * c;
  const int row_len = tw * c;
  const double* tmpl = state.template_hat.data.data();
  const double* fdat = feat.data.data();

  for (int r = 0; r < map.rows; ++r) {
    for (int col = 0; col < map.cols; ++col) {
      const PatchStats st = patch_stats(ii, r, col, th, tw, n);
      if (st.zero_variance) continue;
      // The template is zero-mean, so the patch-mean term of the NCC
      // numerator vanishes and a plain dot product suffices.
      double num = 0.0;
      for (int ty = 0; ty < th; ++ty) {
        const double* trow = tmpl + static_cast<std::size_t>(ty) * row_len;
        const double* frow =
            fdat + (static_cast<std::size_t>(r + ty) * feat.w + col) * c;
        for (int k = 0; k < row_len; ++k) num += trow[k] * frow[k];
      }
      map.activations[static_cast<std::size_t>(map.index(r, col))] =
          num / st.denom;
    }
  }
  return map;
}

Prediction predict(const ResponseMap& response) {
  Prediction best;
  best.index = 0;
  best.activation = response.activations.empty()
                        ? 0.0
                        : response.activations.front();
  for (int i = 1; i < response.count(); ++i) {
    const double a = response.activations[static_cast<std::size_t>(i)];
    if (a > best.activation) {
      best.activation = a;
      best.index = i;
    }
  }
  best.box = response.candidate(best.index);
  return best;
}

Grid grad_activations(const TrackerState& state, const Frame& region,
                      const std::vector<double>& weights) {
  const int th = state.template_h;
  const int tw = state.template_w;
  if (region.h < th || region.w < tw || region.c != state.template_hat.c) {
    throw RegionTooSmallError("grad_activations: region smaller than template");
  }
  const int rows = region.h - th + 1;
  const int cols = region.w - tw + 1;
  if (static_cast<int>(weights.size()) != rows * cols) {
    throw LengthMismatchError("grad_activations: weights length != candidates");
  }

  const Grid feat = state.kernel.apply(region);
  const IntegralPair ii(feat);
  Grid gfeat(feat.h, feat.w, feat.c);

  const int c = feat.c;
  const int n = th * tw * c;
  const int row_len = tw * c;
  const double* tmpl = state.template_hat.data.data();
  const double* fdat = feat.data.data();

  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      const double wgt = weights[static_cast<std::size_t>(r * cols + col)];
      if (wgt == 0.0) continue;
      const PatchStats st = patch_stats(ii, r, col, th, tw, n);
      if (st.zero_variance) continue;

      double sum1 = 0.0, sum2 = 0.0;
      ii.rect(r, col, th, tw, sum1, sum2);
      const double mean = sum1 / n;

      double num = 0.0;
      for (int ty = 0; ty < th; ++ty) {
        const double* trow = tmpl + static_cast<std::size_t>(ty) * row_len;
        const double* frow =
            fdat + (static_cast<std::size_t>(r + ty) * feat.w + col) * c;
        for (int k = 0; k < row_len; ++k) num += trow[k] * frow[k];
      }
      const double y = num / st.denom;

      // d y / d patch = (T_hat - y * P_hat) / ||patch - mean||, with
      // P_hat = (patch - mean) / ||patch - mean||. The mean-subtraction
      // projection is a no-op because both terms are already zero-mean.
      const double scale = wgt / st.denom;
      const double ynorm = y / st.denom;
      for (int ty = 0; ty < th; ++ty) {
        const double* trow = tmpl + static_cast<std::size_t>(ty) * row_len;
        const double* frow =
            fdat + (static_cast<std::size_t>(r + ty) * feat.w + col) * c;
        double* grow =
            gfeat.data.data() +
            (static_cast<std::size_t>(r + ty) * feat.w + col) * c;
        for (int k = 0; k < row_len; ++k) {
          grow[k] += scale * (trow[k] - ynorm * (frow[k] - mean));
        }
      }
    }
  }
  return state.kernel.adjoint(gfeat);
}

BBox detect_center_object(const Frame& frame, int obj_w, int obj_h) {
  if (frame.h < obj_h || frame.w < obj_w) {
    throw RegionTooSmallError("detect_center_object: frame smaller than window");
  }
  const IntegralPair ii(frame);
  const int n = obj_h * obj_w * frame.c;
  const int stride = 2;

  double max_var = 0.0;
  for (int y = 0; y + obj_h <= frame.h; y += stride) {
    for (int x = 0; x + obj_w <= frame.w; x += stride) {
      double s1 = 0.0, s2 = 0.0;
      ii.rect(y, x, obj_h, obj_w, s1, s2);
      max_var = std::max(max_var, s2 - s1 * s1 / n);
    }
  }

  // Windows at >= half the peak variance count as object hypotheses; the one
  // closest to the frame center wins.
  const Point frame_center{0.5 * frame.w, 0.5 * frame.h};
  BBox best{frame_center.x, frame_center.y, static_cast<double>(obj_w),
            static_cast<double>(obj_h)};
  double best_dist = std::numeric_limits<double>::infinity();
  for (int y = 0; y + obj_h <= frame.h; y += stride) {
    for (int x = 0; x + obj_w <= frame.w; x += stride) {
      double s1 = 0.0, s2 = 0.0;
      ii.rect(y, x, obj_h, obj_w, s1, s2);
      const double var = s2 - s1 * s1 / n;
      if (var < 0.5 * max_var) continue;
      const BBox cand{x + 0.5 * obj_w, y + 0.5 * obj_h,
                      static_cast<double>(obj_w), static_cast<double>(obj_h)};
      const double dist = distance(center(cand), frame_center);
      if (dist < best_dist) {
        best_dist = dist;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace trackadv
