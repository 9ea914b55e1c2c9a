#include "trackadv/objectives.hpp"

#include <cmath>
#include <limits>

#include "trackadv/errors.hpp"

namespace trackadv {

namespace {

// Candidate whose center is nearest to `p`; ties break to the smallest
// row-major index, matching predict().
int nearest_candidate(const ResponseMap& map, const Point& p,
                      double* out_dist = nullptr) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      const double d = distance(center(map.candidate(r, c)), p);
      if (d < best_dist) {
        best_dist = d;
        best = map.index(r, c);
      }
    }
  }
  if (out_dist) *out_dist = best_dist;
  return best;
}

}  // namespace

std::string to_string(ObjectiveKind k) {
  return k == ObjectiveKind::ua ? "ua" : "ta";
}

ObjectiveKind objective_from_string(const std::string& s) {
  if (s == "ua") return ObjectiveKind::ua;
  if (s == "ta") return ObjectiveKind::ta;
  throw ConfigError("unknown objective kind: " + s);
}

std::vector<double> ObjectiveEval::grad_weights(int candidate_count) const {
  std::vector<double> w(static_cast<std::size_t>(candidate_count), 0.0);
  if (gt_index >= 0 && gt_index < candidate_count) {
    w[static_cast<std::size_t>(gt_index)] += 1.0;
  }
  if (adversary_index >= 0 && adversary_index < candidate_count) {
    w[static_cast<std::size_t>(adversary_index)] -= 1.0;
  }
  return w;
}

ObjectiveEval f_ua(const ResponseMap& response, const BBox& gt_box) {
  ObjectiveEval eval;
  eval.gt_index = nearest_candidate(response, center(gt_box));

  int best = -1;
  double best_act = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < response.count(); ++i) {
    if (iou(response.candidate(i), gt_box) != 0.0) continue;
    const double a = response.activations[static_cast<std::size_t>(i)];
    if (a > best_act) {
      best_act = a;
      best = i;
    }
  }
  if (best < 0) {
    eval.status = ObjectiveStatus::no_disjoint_candidate;
    return eval;
  }
  eval.adversary_index = best;
  eval.value =
      response.activations[static_cast<std::size_t>(eval.gt_index)] - best_act;
  return eval;
}

ObjectiveEval f_ta(const ResponseMap& response, const Point& p_tr,
                   const BBox& gt_box) {
  ObjectiveEval eval;
  eval.gt_index = nearest_candidate(response, center(gt_box));

  double target_dist = 0.0;
  const int target = nearest_candidate(response, p_tr, &target_dist);
  const double half_diag =
      0.5 * std::sqrt(static_cast<double>(response.box_w) * response.box_w +
                      static_cast<double>(response.box_h) * response.box_h);
  if (target_dist > half_diag) {
    eval.status = ObjectiveStatus::target_outside_region;
    return eval;
  }
  eval.adversary_index = target;
  eval.value = response.activations[static_cast<std::size_t>(eval.gt_index)] -
               response.activations[static_cast<std::size_t>(target)];
  return eval;
}

void CleanReference::advance(const Frame& clean_frame) {
  const SearchRegion region = search_region(state, clean_frame);
  const ResponseMap map = respond(state, region.pixels, region.origin);
  const Prediction pred = predict(map);
  state.prev_box = pred.box;
  clean_box = pred.box;
  clean_peak_index = pred.index;
}

}  // namespace trackadv
