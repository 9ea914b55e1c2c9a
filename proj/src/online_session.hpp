#pragma once

// Internal driver for online attacked runs. One session owns the victim
// tracker, the attacker's response machinery and the clean-frame reference
// trackers, and enforces the online ordering: the clean reference advances
// first, the attack perturbs the current frame, then the victim predicts on
// the perturbed frame.

#include <optional>
#include <utility>

#include "trackadv/attack_types.hpp"
#include "trackadv/attacks_basic.hpp"
#include "trackadv/objectives.hpp"
#include "trackadv/scene.hpp"
#include "trackadv/tracker.hpp"

namespace trackadv::detail {

/// Where the attack-side search region is centered. Single-frame attacks
/// follow the study protocol and crop at the annotation, so the object sits
/// at the region center every frame; the incremental attack crops at the
/// victim's previous prediction (or the attacker's own when the victim's
/// predictions are not available to it).
enum class RegionCenter { victim_prev, attacker_prev, ground_truth };

struct SessionOptions {
  ObjectiveKind objective = ObjectiveKind::ta;
  RegionCenter region_center = RegionCenter::victim_prev;
  bool template_from_detector = false;  // template via detect_center_object
  bool record_perturbations = false;    // keep frame-shaped E_t copies
  double victim_context = 2.0;
};

/// True when the candidate grid of `rect` (template tw x th) contains at
/// least one box disjoint from gt_box.
bool disjoint_candidate_exists(const IntRect& rect, int tw, int th,
                               const BBox& gt_box);

class OnlineSession {
 public:
  OnlineSession(const Video& video, const std::vector<Point>& trajectory,
                const FeatureKernel& attacker_kernel,
                const FeatureKernel& victim_kernel,
                const SessionOptions& options);

  int predicted_frames() const {
    return static_cast<int>(video_.frames.size()) - 1;
  }
  const Video& video() const { return video_; }
  const TrackerState& attacker_state() const { return attacker_; }
  const SessionOptions& options() const { return options_; }

  struct FrameSetup {
    int t = 0;
    const Frame* clean_frame = nullptr;
    BBox clean_box;      // attacker-side clean reference prediction
    Point target;
    bool attackable = true;
    SearchRegion region;
    RegionObjective objective;
  };

  /// Advances the clean references and prepares the attack-side region for
  /// predicted frame t (1-based). For untargeted runs the region context is
  /// enlarged stepwise until a disjoint candidate exists.
  FrameSetup begin_frame(int t);

  /// Applies the frame-shaped perturbation, advances the victim, and
  /// records the outcome.
  void finish_frame(const FrameSetup& setup, const Grid& pert_frame,
                    double region_mean_abs_pert,
                    const FrameAttackResult& result);

  /// Mutable record of the frame just finished (for attack-specific extras).
  FrameRecord& last_record() { return run_.frames.back(); }

  AttackRun take_run(std::string attack_name, std::uint64_t seed);

 private:
  const Video& video_;
  const std::vector<Point>& trajectory_;
  SessionOptions options_;
  TrackerState attacker_;
  TrackerState victim_;
  CleanReference clean_attacker_;
  std::optional<CleanReference> clean_victim_;  // absent when kernels match
  AttackRun run_;
};

/// The attack-side objective closure for a fixed region geometry.
RegionObjective make_region_objective(const TrackerState& attacker,
                                      Point region_origin,
                                      ObjectiveKind objective,
                                      const BBox& clean_box,
                                      const Point& target);

}  // namespace trackadv::detail
