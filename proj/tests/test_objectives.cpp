#include <cmath>
#include <limits>

#include "doctest.h"
#include "trackadv/objectives.hpp"
#include "trackadv/rng.hpp"
#include "trackadv/scene.hpp"

using namespace trackadv;

namespace {

// Hand-built response map: 5x5 offsets over a 12x12 region with an 8x8
// candidate box, origin at (0, 0).
ResponseMap make_map(double fill = 0.0) {
  ResponseMap map;
  map.rows = 5;
  map.cols = 5;
  map.activations.assign(25, fill);
  map.region_origin = Point{0.0, 0.0};
  map.box_w = 8;
  map.box_h = 8;
  return map;
}

}  // namespace

TEST_CASE("f_ua on a clean-like map keeps a positive margin") {
  ResponseMap map = make_map(-0.1);
  // Peak at the gt candidate, everything else at or below 0.
  map.activations[static_cast<std::size_t>(map.index(2, 2))] = 0.95;
  const BBox gt = map.candidate(2, 2);
  // No candidate is disjoint from the centered gt box on this small grid:
  // max center offset is 2 < 8.
  const ObjectiveEval eval = f_ua(map, gt);
  CHECK(eval.status == ObjectiveStatus::no_disjoint_candidate);

  // Against a gt box at the far corner, disjoint candidates exist and the
  // margin stays positive.
  ResponseMap wide = make_map(-0.1);
  wide.rows = 9;
  wide.cols = 9;
  wide.activations.assign(81, -0.1);
  wide.activations[static_cast<std::size_t>(wide.index(0, 0))] = 0.95;
  const BBox corner_gt = wide.candidate(0, 0);
  const ObjectiveEval ok = f_ua(wide, corner_gt);
  REQUIRE(ok.status == ObjectiveStatus::ok);
  CHECK(ok.value >= 0.95 - (-0.1) - 1e-12);
}

TEST_CASE("f_ua margin arithmetic on a constructed map") {
  ResponseMap map = make_map(0.0);
  map.rows = 9;
  map.cols = 9;
  map.activations.assign(81, 0.0);
  map.activations[static_cast<std::size_t>(map.index(0, 0))] = 0.2;   // gt
  map.activations[static_cast<std::size_t>(map.index(8, 8))] = 0.9;   // disjoint
  const BBox gt = map.candidate(0, 0);
  const ObjectiveEval eval = f_ua(map, gt);
  REQUIRE(eval.status == ObjectiveStatus::ok);
  CHECK(eval.gt_index == map.index(0, 0));
  CHECK(eval.adversary_index == map.index(8, 8));
  CHECK(eval.value == doctest::Approx(-0.7));

  const auto w = eval.grad_weights(map.count());
  CHECK(w[static_cast<std::size_t>(map.index(0, 0))] == 1.0);
  CHECK(w[static_cast<std::size_t>(map.index(8, 8))] == -1.0);
  int nonzero = 0;
  for (double v : w) nonzero += v != 0.0;
  CHECK(nonzero == 2);
}

TEST_CASE("f_ua maximizer agrees with a filtered linear scan") {
  SplitMix64 rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    ResponseMap map;
    map.rows = 9;
    map.cols = 9;
    map.activations.assign(81, 0.0);
    for (double& a : map.activations) a = rng.uniform(-1.0, 1.0);
    map.box_w = 8;
    map.box_h = 8;
    map.region_origin = Point{0.0, 0.0};
    const BBox gt = map.candidate(static_cast<int>(rng.uniform_index(9)),
                                  static_cast<int>(rng.uniform_index(9)));
    const ObjectiveEval eval = f_ua(map, gt);

    int best = -1;
    double best_act = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < map.count(); ++i) {
      if (iou(map.candidate(i), gt) != 0.0) continue;
      if (map.activations[static_cast<std::size_t>(i)] > best_act) {
        best_act = map.activations[static_cast<std::size_t>(i)];
        best = i;
      }
    }
    if (best < 0) {
      CHECK(eval.status == ObjectiveStatus::no_disjoint_candidate);
    } else {
      REQUIRE(eval.status == ObjectiveStatus::ok);
      CHECK(eval.adversary_index == best);
    }
  }
}

TEST_CASE("f_ua monotone in the disjoint maximum") {
  ResponseMap map = make_map(0.0);
  map.rows = 9;
  map.cols = 9;
  map.activations.assign(81, 0.0);
  const BBox gt = map.candidate(0, 0);
  map.activations[static_cast<std::size_t>(map.index(0, 0))] = 0.5;
  map.activations[static_cast<std::size_t>(map.index(8, 8))] = 0.1;
  const double before = f_ua(map, gt).value;
  map.activations[static_cast<std::size_t>(map.index(8, 8))] = 0.4;
  const double after = f_ua(map, gt).value;
  CHECK(after <= before);
}

TEST_CASE("f_ta degenerate target equals gt candidate") {
  ResponseMap map = make_map(0.1);
  map.activations[static_cast<std::size_t>(map.index(2, 2))] = 0.8;
  const BBox gt = map.candidate(2, 2);
  const ObjectiveEval eval = f_ta(map, center(gt), gt);
  REQUIRE(eval.status == ObjectiveStatus::ok);
  CHECK(eval.gt_index == eval.adversary_index);
  CHECK(eval.value == 0.0);
  // Weights cancel at the shared candidate.
  for (double v : eval.grad_weights(map.count())) CHECK(v == 0.0);
}

TEST_CASE("f_ta margin on a constructed map") {
  ResponseMap map = make_map(0.0);
  map.activations[static_cast<std::size_t>(map.index(0, 0))] = 0.8;  // gt
  map.activations[static_cast<std::size_t>(map.index(4, 4))] = 0.3;  // target
  const BBox gt = map.candidate(0, 0);
  const Point target = center(map.candidate(4, 4));
  const ObjectiveEval eval = f_ta(map, target, gt);
  REQUIRE(eval.status == ObjectiveStatus::ok);
  CHECK(eval.value == doctest::Approx(0.5));
  CHECK(eval.gt_index == map.index(0, 0));
  CHECK(eval.adversary_index == map.index(4, 4));
}

TEST_CASE("f_ta nearest-center selection agrees with exhaustive scan") {
  SplitMix64 rng(89);
  for (int trial = 0; trial < 50; ++trial) {
    ResponseMap map = make_map(0.0);
    for (double& a : map.activations) a = rng.uniform(-1.0, 1.0);
    const Point target{rng.uniform(2.0, 10.0), rng.uniform(2.0, 10.0)};
    const BBox gt = map.candidate(0, 0);
    const ObjectiveEval eval = f_ta(map, target, gt);
    REQUIRE(eval.status == ObjectiveStatus::ok);

    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < map.count(); ++i) {
      const double d = distance(center(map.candidate(i)), target);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    CHECK(eval.adversary_index == best);
  }
}

TEST_CASE("f_ta flags targets outside the attackable neighborhood") {
  ResponseMap map = make_map(0.2);
  const BBox gt = map.candidate(2, 2);
  // Half template diagonal is ~5.66; nearest candidate center to this target
  // is (8, 8), distance > 40.
  const ObjectiveEval eval = f_ta(map, Point{50.0, 50.0}, gt);
  CHECK(eval.status == ObjectiveStatus::target_outside_region);
}

TEST_CASE("clean reference tracks the object on clean frames") {
  SceneConfig cfg;
  cfg.num_frames = 20;
  cfg.seed = 12;
  const Video video = generate(cfg);
  CleanReference ref(
      init_tracker(video.frames[0], video.gt[0], {KernelKind::identity}));
  for (int t = 1; t < cfg.num_frames; ++t) {
    ref.advance(video.frames[static_cast<std::size_t>(t)]);
    CHECK(cle(ref.clean_box, video.gt[static_cast<std::size_t>(t)]) < 20.0);
  }
}
