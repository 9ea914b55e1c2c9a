#include "trackadv/attacks_basic.hpp"

#include <algorithm>
#include <cmath>

#include "online_session.hpp"
#include "trackadv/errors.hpp"
#include "trackadv/rng.hpp"

namespace trackadv {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Clips the perturbation to the L-inf budget and so that region + pert stays
// in the valid pixel range.
void clip_perturbation(Grid& pert, const Frame& region, double budget) {
  for (std::size_t i = 0; i < pert.data.size(); ++i) {
    const double px = region.data[i];
    const double lo = std::max(-budget, -px);
    const double hi = std::min(budget, 255.0 - px);
    pert.data[i] = std::clamp(pert.data[i], lo, hi);
  }
}

double l1_norm(const Grid& g) {
  double acc = 0.0;
  for (double v : g.data) acc += std::abs(v);
  return acc;
}

}  // namespace

std::string to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::fgsm: return "fgsm";
    case AttackMethod::bim: return "bim";
    case AttackMethod::mifgsm: return "mifgsm";
    case AttackMethod::cw: return "cw";
  }
  return "bim";
}

std::string to_string(ScheduleKind s) {
  switch (s) {
    case ScheduleKind::ba_e: return "ba_e";
    case ScheduleKind::ba_r1: return "ba_r1";
    case ScheduleKind::ba_r2: return "ba_r2";
  }
  return "ba_e";
}

AttackMethod attack_method_from_string(const std::string& s) {
  if (s == "fgsm") return AttackMethod::fgsm;
  if (s == "bim") return AttackMethod::bim;
  if (s == "mifgsm") return AttackMethod::mifgsm;
  if (s == "cw") return AttackMethod::cw;
  throw ConfigError("unknown attack method: " + s);
}

ScheduleKind schedule_from_string(const std::string& s) {
  if (s == "ba_e") return ScheduleKind::ba_e;
  if (s == "ba_r1") return ScheduleKind::ba_r1;
  if (s == "ba_r2") return ScheduleKind::ba_r2;
  throw ConfigError("unknown schedule: " + s);
}

std::string to_string(BasicRegionPolicy p) {
  return p == BasicRegionPolicy::annotation ? "annotation" : "prediction";
}

BasicRegionPolicy region_policy_from_string(const std::string& s) {
  if (s == "annotation") return BasicRegionPolicy::annotation;
  if (s == "prediction") return BasicRegionPolicy::prediction;
  throw ConfigError("unknown region policy: " + s);
}

Perturbation fgsm_step(const Frame& region, const Grid& objective_grad,
                       double step, double epsilon_budget) {
  if (!region.same_shape(objective_grad)) {
    throw ShapeMismatchError("fgsm_step: gradient shape mismatch");
  }
  Perturbation pert(region.h, region.w, region.c);
  for (std::size_t i = 0; i < pert.data.size(); ++i) {
    pert.data[i] = -step * sign_of(objective_grad.data[i]);
  }
  clip_perturbation(pert, region, epsilon_budget);
  return pert;
}

FrameAttackResult iterative_attack(const Frame& region,
                                   const RegionObjective& objective,
                                   const BasicAttackConfig& config,
                                   int max_iters) {
  FrameAttackResult out;
  out.perturbation = Grid(region.h, region.w, region.c);

  int budget = max_iters >= 0 ? max_iters : config.iters_anchor;
  if (config.method == AttackMethod::fgsm) budget = std::min(budget, 1);

  ObjectiveSample s = objective(region);
  if (s.status != ObjectiveStatus::ok) {
    out.flagged = true;
    out.final_objective = s.value;
    return out;
  }

  Grid pert(region.h, region.w, region.c);
  Grid velocity;
  if (config.method == AttackMethod::mifgsm) {
    velocity = Grid(region.h, region.w, region.c);
  }

  int used = 0;
  while (used < budget && s.status == ObjectiveStatus::ok && s.value >= 0.0) {
    if (!all_finite(s.grad)) {
      out.flagged = true;
      out.perturbation = Grid(region.h, region.w, region.c);
      out.iterations = used;
      out.final_objective = s.value;
      return out;
    }
    switch (config.method) {
      case AttackMethod::fgsm:
      case AttackMethod::bim:
        for (std::size_t i = 0; i < pert.data.size(); ++i) {
          pert.data[i] -= config.step * sign_of(s.grad.data[i]);
        }
        break;
      case AttackMethod::mifgsm: {
        const double l1 = l1_norm(s.grad);
        const double inv = l1 > 0.0 ? 1.0 / l1 : 0.0;
        for (std::size_t i = 0; i < pert.data.size(); ++i) {
          velocity.data[i] = config.momentum_decay * velocity.data[i] +
                             s.grad.data[i] * inv;
          pert.data[i] -= config.step * sign_of(velocity.data[i]);
        }
        break;
      }
      case AttackMethod::cw:
        // Plain gradient descent on margin + cw_penalty * ||E||_2^2.
        for (std::size_t i = 0; i < pert.data.size(); ++i) {
          pert.data[i] -= config.step * (s.grad.data[i] +
                                         2.0 * config.cw_penalty * pert.data[i]);
        }
        break;
    }
    clip_perturbation(pert, region, config.epsilon_budget);
    ++used;
    s = objective(add(region, pert));
    out.loss_curve.push_back(s.value);
  }

  out.perturbation = std::move(pert);
  out.iterations = used;
  out.final_objective = s.value;
  out.succeeded = s.status == ObjectiveStatus::ok && s.value < 0.0;
  out.flagged = s.status != ObjectiveStatus::ok;
  return out;
}

std::vector<int> schedule_attack_frames(const BasicAttackConfig& config,
                                        int predicted_frames) {
  std::vector<int> frames;
  SplitMix64 rng(config.seed);
  for (int t = 1; t <= predicted_frames; ++t) {
    switch (config.schedule) {
      case ScheduleKind::ba_e:
        frames.push_back(t);
        break;
      case ScheduleKind::ba_r1:
        if (rng.bernoulli(config.attack_prob)) frames.push_back(t);
        break;
      case ScheduleKind::ba_r2:
        if ((t - 1) % config.attack_interval == 0) frames.push_back(t);
        break;
    }
  }
  return frames;
}

AttackRun schedule_attack(const Video& video,
                          const std::vector<Point>& trajectory,
                          const FeatureKernel& attacker_kernel,
                          const FeatureKernel& victim_kernel,
                          ObjectiveKind objective,
                          const BasicAttackConfig& config,
                          bool record_perturbations) {
  detail::SessionOptions options;
  options.objective = objective;
  options.region_center = config.region == BasicRegionPolicy::annotation
                              ? detail::RegionCenter::ground_truth
                              : detail::RegionCenter::victim_prev;
  options.record_perturbations = record_perturbations;
  detail::OnlineSession session(video, trajectory, attacker_kernel,
                                victim_kernel, options);

  const int predicted = session.predicted_frames();
  const std::vector<int> planned = schedule_attack_frames(config, predicted);
  std::size_t next_planned = 0;

  const int frame_h = video.frames.front().h;
  const int frame_w = video.frames.front().w;
  const int channels = video.frames.front().c;

  // Last computed perturbation, reused by the BA-R protocols on frames they
  // skip, in region-relative coordinates.
  Grid stored;
  IntRect stored_rect{};

  for (int t = 1; t <= predicted; ++t) {
    auto setup = session.begin_frame(t);

    bool attack_now = false;
    if (next_planned < planned.size() && planned[next_planned] == t) {
      attack_now = true;
      ++next_planned;
    }

    FrameAttackResult result;
    Grid region_pert(setup.region.pixels.h, setup.region.pixels.w, channels);

    if (attack_now && setup.attackable) {
      int iters = config.iters_anchor;
      if (config.schedule == ScheduleKind::ba_e) {
        const bool anchor = (t - 1) % config.anchor_period == 0;
        iters = anchor ? config.iters_anchor : config.iters_between;
      }
      result = iterative_attack(setup.region.pixels, setup.objective, config,
                                iters);
      region_pert = result.perturbation;
      if (!result.flagged &&
          (config.schedule == ScheduleKind::ba_r1 ||
           config.schedule == ScheduleKind::ba_r2)) {
        stored = region_pert;
        stored_rect = setup.region.rect;
      }
    } else if (!attack_now && !stored.empty() &&
               (config.schedule == ScheduleKind::ba_r1 ||
                config.schedule == ScheduleKind::ba_r2)) {
      // Reuse at the same region-relative position. Identical geometry means
      // the applied grid is byte-identical to the stored one.
      if (stored.same_shape(region_pert)) {
        region_pert = stored;
      } else {
        const int off_y = (region_pert.h - stored.h) / 2;
        const int off_x = (region_pert.w - stored.w) / 2;
        region_pert = embed(region_pert.h, region_pert.w, channels,
                            IntRect{off_x, off_y, stored.w, stored.h}, stored);
      }
      clip_perturbation(region_pert, setup.region.pixels,
                        config.epsilon_budget);
    } else if (attack_now && !setup.attackable) {
      result.flagged = true;
    }

    const Grid pert_frame =
        embed(frame_h, frame_w, channels, setup.region.rect, region_pert);
    const FrameAttackResult result_for_record = result;
    session.finish_frame(setup, pert_frame, mean_abs(region_pert),
                         result_for_record);
    if (!result.loss_curve.empty()) {
      session.last_record().loss_curve = result.loss_curve;
    }
  }

  return session.take_run(to_string(config.method) + "_" +
                              to_string(config.schedule),
                          config.seed);
}

}  // namespace trackadv
