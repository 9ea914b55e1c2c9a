#pragma once

#include <string>
#include <vector>

#include "trackadv/geometry.hpp"
#include "trackadv/grid.hpp"

namespace trackadv {

enum class KernelKind { identity, box_blur_3, box_blur_5, center_surround };

/// Fixed linear per-channel feature map. Different kernels stand in for
/// differently parameterized trackers in transfer experiments; none of them
/// is learned.
struct FeatureKernel {
  KernelKind kind = KernelKind::identity;

  /// Forward feature map (clamp-to-edge boundary handling).
  Grid apply(const Grid& pixels) const;

  /// Exact transpose of `apply`, used to push activation gradients back to
  /// pixel space.
  Grid adjoint(const Grid& grad_features) const;

  std::string name() const;
  static FeatureKernel from_name(const std::string& name);
};

/// Template-matching tracker state. The template is cached in feature space,
/// zero-mean and unit-norm, so candidate scores are normalized
/// cross-correlations in [-1, 1].
struct TrackerState {
  FeatureKernel kernel;
  BBox template_box;
  BBox prev_box;
  double context_factor = 2.0;

  Grid template_hat;           // zero-mean, unit-norm feature template
  double template_norm = 0.0;  // cached ||feature(template) - mean||
  int template_h = 0;
  int template_w = 0;
};

/// Candidate activations over translation offsets. Candidate (r, c) is the
/// template-sized box whose top-left pixel sits at region_origin + (c, r).
struct ResponseMap {
  int rows = 0;
  int cols = 0;
  std::vector<double> activations;
  Point region_origin;
  int box_w = 0;
  int box_h = 0;

  int count() const { return rows * cols; }
  int index(int r, int c) const { return r * cols + c; }
  double activation(int r, int c) const { return activations[index(r, c)]; }
  BBox candidate(int r, int c) const {
    return BBox{region_origin.x + c + 0.5 * box_w,
                region_origin.y + r + 0.5 * box_h, static_cast<double>(box_w),
                static_cast<double>(box_h)};
  }
  BBox candidate(int idx) const { return candidate(idx / cols, idx % cols); }
};

struct SearchRegion {
  Frame pixels;
  Point origin;
  IntRect rect;
};

struct Prediction {
  BBox box;
  double activation = 0.0;
  int index = 0;
};

/// Initializes tracking from the first frame: the template is the feature
/// map of the ground-truth crop and prev_box starts at gt0.
TrackerState init_tracker(const Frame& frame0, const BBox& gt0,
                          const FeatureKernel& kernel,
                          double context_factor = 2.0);

/// Square search region of side context * max(template size), centered at
/// `center_box` (mean-padded where it leaves the frame). `context` falls
/// back to the state's context_factor when <= 0.
SearchRegion search_region_at(const TrackerState& state, const Frame& frame,
                              const BBox& center_box, double context = 0.0);
SearchRegion search_region(const TrackerState& state, const Frame& frame);

/// Normalized cross-correlation response of the template over every
/// translation offset of the region. Constant (zero-variance) patches score
/// exactly 0.
ResponseMap respond(const TrackerState& state, const Frame& region,
                    Point region_origin = Point{0.0, 0.0});

/// Argmax candidate; ties break to the smallest row-major offset.
Prediction predict(const ResponseMap& response);

/// Exact gradient of sum_i weights[i] * y_i with respect to the region
/// pixels. `weights` is dense over candidates (row-major); zero entries are
/// skipped. Zero-variance patches contribute no gradient.
Grid grad_activations(const TrackerState& state, const Frame& region,
                      const std::vector<double>& weights);

/// Detector stand-in for template selection without ground truth: slides an
/// object-sized window (stride 2) over the frame, treats high-variance
/// windows as object hypotheses and returns the one nearest to the frame
/// center.
BBox detect_center_object(const Frame& frame, int obj_w, int obj_h);

}  // namespace trackadv
