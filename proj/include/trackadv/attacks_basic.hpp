#pragma once

#include <cstdint>
#include <string>

#include "trackadv/attack_types.hpp"
#include "trackadv/scene.hpp"
#include "trackadv/tracker.hpp"

namespace trackadv {

enum class AttackMethod { fgsm, bim, mifgsm, cw };
enum class ScheduleKind { ba_e, ba_r1, ba_r2 };

/// Where single-frame attacks center their region. The study protocol crops
/// at the annotation so the object sits at the region center every frame;
/// the online protocol crops at the victim's previous prediction like the
/// tracker itself does.
enum class BasicRegionPolicy { annotation, prediction };

std::string to_string(AttackMethod m);
std::string to_string(ScheduleKind s);
std::string to_string(BasicRegionPolicy p);
AttackMethod attack_method_from_string(const std::string& s);
ScheduleKind schedule_from_string(const std::string& s);
BasicRegionPolicy region_policy_from_string(const std::string& s);

/// Single-frame attack configuration plus its scheduling protocol.
/// ba_e attacks every frame (iters_anchor at frames 1, 31, 61, ...;
/// iters_between otherwise). ba_r1 attacks each frame independently with
/// probability attack_prob; ba_r2 attacks every attack_interval frames.
/// Both BA-R protocols reuse the last computed perturbation on frames they
/// do not attack.
struct BasicAttackConfig {
  AttackMethod method = AttackMethod::bim;
  double step = 0.3;            // per-iteration step (fgsm default is 1.0)
  int iters_anchor = 10;
  int iters_between = 2;
  double momentum_decay = 1.0;  // mifgsm velocity decay
  double cw_penalty = 1e-2;     // weight of the L2 distortion penalty
  ScheduleKind schedule = ScheduleKind::ba_e;
  double attack_prob = 0.1;     // ba_r1
  int attack_interval = 10;     // ba_r2
  int anchor_period = 30;       // ba_e anchor cadence
  double epsilon_budget = 16.0;
  BasicRegionPolicy region = BasicRegionPolicy::annotation;
  std::uint64_t seed = 0;

  static BasicAttackConfig for_method(AttackMethod m) {
    BasicAttackConfig c;
    c.method = m;
    if (m == AttackMethod::fgsm) c.step = 1.0;
    return c;
  }
};

/// One signed-gradient step: -step * sign(grad), clipped to the budget and
/// to the valid pixel range of `region`.
Perturbation fgsm_step(const Frame& region, const Grid& objective_grad,
                       double step, double epsilon_budget);

/// Iterative single-frame attack (bim / mifgsm / cw; fgsm takes exactly one
/// step). Stops as soon as the margin goes negative. `max_iters` overrides
/// the config's iteration budget when >= 0.
FrameAttackResult iterative_attack(const Frame& region,
                                   const RegionObjective& objective,
                                   const BasicAttackConfig& config,
                                   int max_iters = -1);

/// Runs the configured schedule over a whole video against the victim
/// tracker; white-box when both kernels match. The trajectory supplies
/// targeted positions for ObjectiveKind::ta.
AttackRun schedule_attack(const Video& video,
                          const std::vector<Point>& trajectory,
                          const FeatureKernel& attacker_kernel,
                          const FeatureKernel& victim_kernel,
                          ObjectiveKind objective,
                          const BasicAttackConfig& config,
                          bool record_perturbations = false);

/// Frames (1-based prediction indices) the schedule attacks, given the
/// number of predicted frames. Deterministic in config.seed for ba_r1.
std::vector<int> schedule_attack_frames(const BasicAttackConfig& config,
                                        int predicted_frames);

}  // namespace trackadv
