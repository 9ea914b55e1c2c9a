#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trackadv/geometry.hpp"
#include "trackadv/grid.hpp"
#include "trackadv/objectives.hpp"

namespace trackadv {

/// One objective evaluation at a perturbed search region: margin value and
/// its gradient with respect to the region pixels.
struct ObjectiveSample {
  ObjectiveStatus status = ObjectiveStatus::ok;
  double value = 0.0;
  Grid grad;
};

/// Callable bound to one frame's response machinery; receives the perturbed
/// region pixels.
using RegionObjective = std::function<ObjectiveSample(const Grid& region)>;

/// Outcome of attacking a single frame. The perturbation is search-region
/// shaped and already respects the L-inf budget and pixel range.
struct FrameAttackResult {
  Perturbation perturbation;
  int iterations = 0;
  double final_objective = 0.0;
  bool succeeded = false;
  /// Set when the frame could not be attacked (non-finite gradient,
  /// no disjoint candidate after enlargement, target outside region).
  bool flagged = false;
  std::vector<double> loss_curve;  // objective value after each step
};

/// Per-frame record of an online attacked run.
struct FrameRecord {
  int frame = 0;
  bool attacked = false;
  bool flagged = false;
  int iterations = 0;
  double objective = 0.0;
  bool attack_success = false;   // margin went negative
  double cle_gt = 0.0;           // victim prediction vs annotation
  double cle_clean = 0.0;        // victim prediction vs clean-run prediction
  double dist_target = 0.0;      // victim prediction center vs p_tr
  double mean_abs_pert = 0.0;    // mean |E_t| over region pixels and channels
  BBox pred;
  // Incremental-attack bookkeeping (zero for single-frame attacks).
  int buffer_len = 0;
  double buffer_sum_err = 0.0;   // max |sum(buffer) - E_t|
  double increment_mean_abs = 0.0;
  bool anchor = false;
  std::vector<double> loss_curve;  // objective value per optimization step
};

struct AttackRun {
  std::string attack_name;
  ObjectiveKind objective = ObjectiveKind::ta;
  std::string attacker_kernel;
  std::string victim_kernel;
  std::uint64_t seed = 0;
  std::vector<FrameRecord> frames;
  std::vector<BBox> preds;        // victim predictions, frames 1..T-1
  std::vector<BBox> clean_preds;  // clean-run predictions, frames 1..T-1
  /// Frame-shaped per-frame perturbations, kept only when requested.
  std::vector<Perturbation> pert_dumps;
};

}  // namespace trackadv
