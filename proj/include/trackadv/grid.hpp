#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "trackadv/geometry.hpp"

namespace trackadv {

/// Dense H x W x C grid of doubles, row-major with interleaved channels.
/// Frames hold pixel values on the 0-255 scale; perturbations hold signed
/// deltas on the same scale.
struct Grid {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(int h_, int w_, int c_, double fill = 0.0)
      : h(h_), w(w_), c(c_), data(static_cast<std::size_t>(h_) * w_ * c_, fill) {}

  double& at(int y, int x, int ch) {
    return data[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }
  double at(int y, int x, int ch) const {
    return data[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool same_shape(const Grid& o) const {
    return h == o.h && w == o.w && c == o.c;
  }
};

using Frame = Grid;
using Perturbation = Grid;

/// Integer pixel rectangle; x0/y0 inclusive top-left, w/h in pixels.
struct IntRect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
};

/// Rounds a real-valued box to the integer rectangle used for cropping.
IntRect round_rect(const BBox& b);

enum class PadMode { mean, zero };

/// Per-channel mean values of a grid.
std::vector<double> channel_means(const Grid& g);

/// Extracts a sub-grid; pixels outside the source are padded with the
/// source's channel means (PadMode::mean) or zeros (PadMode::zero).
Grid crop(const Grid& src, const IntRect& rect, PadMode pad = PadMode::mean);
Grid crop(const Grid& src, const BBox& region, PadMode pad = PadMode::mean);

/// Scatters a patch back into a zero grid of shape (h, w, c); the inverse of
/// crop on the region interior. Patch parts outside the destination bounds
/// are dropped.
Grid embed(int h, int w, int c, const IntRect& rect, const Grid& patch);
Grid embed(int h, int w, int c, const BBox& region, const Grid& patch);

/// Elementwise sum clipped to the valid pixel range [0, 255].
Frame apply(const Frame& frame, const Perturbation& pert);

/// |pert| * gain clipped to [0, 255], for heatmap export.
Frame visualize_perturbation(const Perturbation& pert, double gain = 255.0);

double mean_abs(const Grid& g);
double max_abs(const Grid& g);
bool all_finite(const Grid& g);

/// Elementwise helpers used by the attack loops.
Grid add(const Grid& a, const Grid& b);
Grid sub(const Grid& a, const Grid& b);
void add_in_place(Grid& a, const Grid& b);

// --- file I/O ---------------------------------------------------------
// Frames: binary PPM, maxval 255 (P6 for 3 channels, P5 for 1); values are
// rounded to the nearest integer on export only.
// Real-valued grids: raw little-endian container with an 8-value header
// (magic, version, H, W, C, scale, reserved, reserved) followed by H*W*C
// float64 payload values.

void save_ppm(const Frame& frame, const std::filesystem::path& path);
Frame load_ppm(const std::filesystem::path& path);

void save_grid(const Grid& grid, const std::filesystem::path& path);
Grid load_grid(const std::filesystem::path& path);

}  // namespace trackadv
