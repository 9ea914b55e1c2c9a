#include "online_session.hpp"

#include <algorithm>
#include <cmath>

#include "trackadv/errors.hpp"

namespace trackadv::detail {

namespace {

constexpr double kContextLadder[] = {0.0, 3.0, 4.5};  // 0 = victim context

BBox attacker_template_box(const Video& video, const SessionOptions& opt) {
  const BBox gt0 = video.gt.front();
  if (!opt.template_from_detector) return gt0;
  return detect_center_object(video.frames.front(),
                              static_cast<int>(std::lround(gt0.w)),
                              static_cast<int>(std::lround(gt0.h)));
}

}  // namespace

bool disjoint_candidate_exists(const IntRect& rect, int tw, int th,
                               const BBox& gt_box) {
  const int cols = rect.w - tw + 1;
  const int rows = rect.h - th + 1;
  if (cols < 1 || rows < 1) return false;
  const double cx_min = rect.x0 + 0.5 * tw;
  const double cx_max = rect.x0 + (cols - 1) + 0.5 * tw;
  const double cy_min = rect.y0 + 0.5 * th;
  const double cy_max = rect.y0 + (rows - 1) + 0.5 * th;
  const double need_x = 0.5 * (tw + gt_box.w);
  const double need_y = 0.5 * (th + gt_box.h);
  const bool x_ok = std::max(std::abs(cx_min - gt_box.cx),
                             std::abs(cx_max - gt_box.cx)) >= need_x;
  const bool y_ok = std::max(std::abs(cy_min - gt_box.cy),
                             std::abs(cy_max - gt_box.cy)) >= need_y;
  return x_ok || y_ok;
}

RegionObjective make_region_objective(const TrackerState& attacker,
                                      Point region_origin,
                                      ObjectiveKind objective,
                                      const BBox& clean_box,
                                      const Point& target) {
  return [&attacker, region_origin, objective, clean_box,
          target](const Grid& region) -> ObjectiveSample {
    const ResponseMap map = respond(attacker, region, region_origin);
    const ObjectiveEval eval = objective == ObjectiveKind::ua
                                   ? f_ua(map, clean_box)
                                   : f_ta(map, target, clean_box);
    ObjectiveSample sample;
    sample.status = eval.status;
    sample.value = eval.value;
    if (eval.ok()) {
      sample.grad =
          grad_activations(attacker, region, eval.grad_weights(map.count()));
    }
    return sample;
  };
}

OnlineSession::OnlineSession(const Video& video,
                             const std::vector<Point>& trajectory,
                             const FeatureKernel& attacker_kernel,
                             const FeatureKernel& victim_kernel,
                             const SessionOptions& options)
    : video_(video),
      trajectory_(trajectory),
      options_(options),
      attacker_(init_tracker(video.frames.front(),
                             attacker_template_box(video, options),
                             attacker_kernel, options.victim_context)),
      victim_(init_tracker(video.frames.front(), video.gt.front(),
                           victim_kernel, options.victim_context)),
      clean_attacker_(init_tracker(video.frames.front(),
                                   attacker_template_box(video, options),
                                   attacker_kernel, options.victim_context)) {
  if (video.frames.size() < 2) {
    throw ConfigError("online session: video needs at least two frames");
  }
  if (trajectory.size() < video.frames.size()) {
    throw LengthMismatchError("online session: trajectory shorter than video");
  }
  if (attacker_kernel.name() != victim_kernel.name() ||
      options.template_from_detector) {
    clean_victim_.emplace(init_tracker(video.frames.front(), video.gt.front(),
                                       victim_kernel, options.victim_context));
  }
  run_.objective = options.objective;
  run_.attacker_kernel = attacker_kernel.name();
  run_.victim_kernel = victim_kernel.name();
}

OnlineSession::FrameSetup OnlineSession::begin_frame(int t) {
  FrameSetup setup;
  setup.t = t;
  setup.clean_frame = &video_.frames[static_cast<std::size_t>(t)];
  setup.target = trajectory_[static_cast<std::size_t>(t)];

  clean_attacker_.advance(*setup.clean_frame);
  if (clean_victim_) clean_victim_->advance(*setup.clean_frame);
  setup.clean_box = clean_attacker_.clean_box;

  BBox center_box = victim_.prev_box;
  switch (options_.region_center) {
    case RegionCenter::victim_prev:
      break;
    case RegionCenter::attacker_prev:
      center_box = attacker_.prev_box;
      break;
    case RegionCenter::ground_truth:
      center_box = video_.gt[static_cast<std::size_t>(t)];
      break;
  }

  setup.attackable = false;
  for (double ctx : kContextLadder) {
    SearchRegion region =
        search_region_at(attacker_, *setup.clean_frame, center_box, ctx);
    if (options_.objective == ObjectiveKind::ua &&
        !disjoint_candidate_exists(region.rect, attacker_.template_w,
                                   attacker_.template_h, setup.clean_box)) {
      continue;
    }
    setup.region = std::move(region);
    setup.attackable = true;
    break;
  }
  if (setup.attackable) {
    setup.objective =
        make_region_objective(attacker_, setup.region.origin,
                              options_.objective, setup.clean_box,
                              setup.target);
  } else {
    // No context in the ladder exposes a disjoint candidate; keep the
    // victim-context region so the caller can still account perturbations.
    setup.region =
        search_region_at(attacker_, *setup.clean_frame, center_box, 0.0);
  }
  return setup;
}

void OnlineSession::finish_frame(const FrameSetup& setup,
                                 const Grid& pert_frame,
                                 double region_mean_abs_pert,
                                 const FrameAttackResult& result) {
  const Frame adversarial = apply(*setup.clean_frame, pert_frame);

  const SearchRegion victim_region = search_region(victim_, adversarial);
  const ResponseMap victim_map =
      respond(victim_, victim_region.pixels, victim_region.origin);
  const Prediction pred = predict(victim_map);
  victim_.prev_box = pred.box;

  if (options_.region_center == RegionCenter::attacker_prev) {
    const SearchRegion own_region = search_region(attacker_, adversarial);
    const ResponseMap own_map =
        respond(attacker_, own_region.pixels, own_region.origin);
    attacker_.prev_box = predict(own_map).box;
  }

  const BBox victim_clean_box =
      clean_victim_ ? clean_victim_->clean_box : clean_attacker_.clean_box;

  FrameRecord rec;
  rec.frame = setup.t;
  rec.attacked = setup.attackable && !result.flagged;
  rec.flagged = result.flagged || !setup.attackable;
  rec.iterations = result.iterations;
  rec.objective = result.final_objective;
  rec.attack_success = result.succeeded;
  rec.cle_gt = cle(pred.box, video_.gt[static_cast<std::size_t>(setup.t)]);
  rec.cle_clean = cle(pred.box, victim_clean_box);
  rec.dist_target = distance(center(pred.box), setup.target);
  rec.mean_abs_pert = region_mean_abs_pert;
  rec.pred = pred.box;

  run_.frames.push_back(std::move(rec));
  run_.preds.push_back(pred.box);
  run_.clean_preds.push_back(victim_clean_box);
  if (options_.record_perturbations) run_.pert_dumps.push_back(pert_frame);
}

AttackRun OnlineSession::take_run(std::string attack_name,
                                  std::uint64_t seed) {
  run_.attack_name = std::move(attack_name);
  run_.seed = seed;
  return std::move(run_);
}

}  // namespace trackadv::detail
