#pragma once

#include <vector>

#include "trackadv/geometry.hpp"
#include "trackadv/grid.hpp"
#include "trackadv/tracker.hpp"

namespace trackadv {

enum class ObjectiveKind { ua, ta };

std::string to_string(ObjectiveKind k);
ObjectiveKind objective_from_string(const std::string& s);

enum class ObjectiveStatus {
  ok,
  /// Every candidate overlaps the reference box; the search region is too
  /// small for an untargeted margin and the caller should enlarge it.
  no_disjoint_candidate,
  /// The targeted position is farther than half the template diagonal from
  /// any candidate center; the frame counts as a targeted-attack failure.
  target_outside_region,
};

/// Margin evaluation: value = y_ref - y_adversary. The attack succeeds at a
/// frame exactly when the value goes negative. Gradient weights are +1 at
/// the reference candidate and -1 at the adversary candidate.
struct ObjectiveEval {
  ObjectiveStatus status = ObjectiveStatus::ok;
  double value = 0.0;
  int gt_index = -1;
  int adversary_index = -1;

  bool ok() const { return status == ObjectiveStatus::ok; }

  /// Dense per-candidate weight vector for grad_activations.
  std::vector<double> grad_weights(int candidate_count) const;
};

/// Untargeted margin: activation at the candidate nearest to the clean-run
/// prediction minus the best activation among candidates disjoint from it
/// (IoU exactly 0).
ObjectiveEval f_ua(const ResponseMap& response, const BBox& gt_box);

/// Targeted margin: activation at the clean-prediction candidate minus the
/// activation of the candidate whose center is nearest to the targeted
/// position.
ObjectiveEval f_ta(const ResponseMap& response, const Point& p_tr,
                   const BBox& gt_box);

/// Tracker replica advanced on unperturbed frames only; supplies the
/// clean-run prediction the margins reference. Advance exactly once per
/// frame.
struct CleanReference {
  TrackerState state;
  BBox clean_box;
  int clean_peak_index = 0;

  explicit CleanReference(TrackerState s)
      : state(std::move(s)), clean_box(state.prev_box) {}

  void advance(const Frame& clean_frame);
};

}  // namespace trackadv
