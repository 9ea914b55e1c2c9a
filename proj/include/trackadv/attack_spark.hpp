#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trackadv/attack_types.hpp"
#include "trackadv/scene.hpp"
#include "trackadv/tracker.hpp"

namespace trackadv {

enum class SparkVariant { standard, no_template, no_victim_box };

std::string to_string(SparkVariant v);
SparkVariant spark_variant_from_string(const std::string& s);

/// Online incremental attack configuration. Rounds reset every
/// reset_interval frames: the round-opening frame gets iters_anchor
/// sign-gradient iterations from a cleared perturbation, every other frame
/// refines an incremental perturbation with iters_between iterations.
struct SparkConfig {
  double step = 0.3;
  double lambda = 1e-5;          // group-sparsity regularization weight
  int reset_interval = 30;
  int iters_anchor = 10;
  int iters_between = 2;
  double epsilon_budget = 16.0;
  SparkVariant variant = SparkVariant::standard;
};

/// Ordered store of the current round's incremental perturbations, kept in
/// frame coordinates. The running total is maintained by the same additions
/// as a fresh sum over the stored increments, so sum(increments) == total()
/// bitwise.
class IncrementBuffer {
 public:
  IncrementBuffer() = default;
  IncrementBuffer(int h, int w, int c) : total_(h, w, c) {}

  void reset(int anchor_frame, int h, int w, int c);
  void push(Perturbation increment);

  const Grid& total() const { return total_; }
  const std::vector<Perturbation>& increments() const { return increments_; }
  int anchor_frame() const { return anchor_frame_; }
  std::size_t size() const { return increments_.size(); }

  /// Fresh elementwise sum of the stored increments.
  Grid recomputed_total() const;

 private:
  std::vector<Perturbation> increments_;
  Grid total_;
  int anchor_frame_ = 0;
};

/// L2,1 norm of the increment matrix: rows are pixel-channel positions,
/// columns are time steps; returns the sum of row L2 norms. Grouping pixels
/// across time drives whole pixel-time groups to zero.
double l21_norm(const std::vector<const Grid*>& columns);
double l21_norm(const IncrementBuffer& buffer);

/// Subgradient of the L2,1 norm with respect to the newest column: per
/// position, eps(i) / ||row i||, and 0 at the kink (row norm ~ 0).
Grid l21_subgradient(const std::vector<const Grid*>& columns);
Grid l21_subgradient(const IncrementBuffer& buffer);

/// Attacks one frame: optimizes the incremental perturbation on the given
/// search region against `objective`, clips the running total to the budget
/// and pixel range, and pushes the post-clip delta into the buffer. Frame
/// numbers are 1-based; round anchors clear the buffer first. On objective
/// errors the buffer is left unchanged (except the anchor reset) and the
/// result is flagged.
FrameAttackResult spark_frame(const Frame& region_clean, const IntRect& rect,
                              int frame_h, int frame_w, int frame_number,
                              const RegionObjective& objective,
                              IncrementBuffer& buffer,
                              const SparkConfig& config);

/// Full online run over a video. The attacker optimizes on its own kernel
/// (white-box when it matches the victim's); the victim tracks the perturbed
/// frames.
AttackRun run_spark(const Video& video, const std::vector<Point>& trajectory,
                    const FeatureKernel& attacker_kernel,
                    const FeatureKernel& victim_kernel,
                    ObjectiveKind objective, const SparkConfig& config,
                    bool record_perturbations = false);

}  // namespace trackadv
