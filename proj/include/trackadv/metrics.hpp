#pragma once

#include <vector>

#include "trackadv/attack_types.hpp"
#include "trackadv/geometry.hpp"
#include "trackadv/grid.hpp"

namespace trackadv {

/// Fraction of frames whose center location error against the annotation is
/// below `threshold` pixels.
double precision(const std::vector<BBox>& preds,
                 const std::vector<BBox>& annotations,
                 double threshold = 20.0);

/// Fraction of frames whose predicted center lies within `threshold` pixels
/// of the targeted position.
double succ_rate(const std::vector<BBox>& preds,
                 const std::vector<Point>& targets, double threshold = 20.0);

/// Mean absolute perturbation over a suite: per frame the mean of |E| over
/// pixels and channels, averaged over frames, then averaged over videos.
/// Values are on the 0-255 scale.
double map_suite(const std::vector<std::vector<Perturbation>>& runs);

/// Per-run aggregation of an attacked video.
struct RunMetrics {
  double precision_clean = 0.0;
  double precision_attacked = 0.0;
  double prec_drop = 0.0;
  double succ_rate = 0.0;
  double map = 0.0;
  double mean_iterations = 0.0;
};

RunMetrics compute_run_metrics(const AttackRun& run,
                               const std::vector<BBox>& annotations,
                               const std::vector<Point>& targets,
                               double threshold = 20.0);

}  // namespace trackadv
