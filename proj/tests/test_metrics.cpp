#include "doctest.h"
#include "trackadv/errors.hpp"
#include "trackadv/metrics.hpp"
#include "trackadv/rng.hpp"

using namespace trackadv;

TEST_CASE("precision basics") {
  std::vector<BBox> annos;
  for (int i = 0; i < 10; ++i) {
    annos.push_back(BBox{10.0 * i, 5.0, 4.0, 4.0});
  }
  CHECK(precision(annos, annos) == 1.0);

  std::vector<BBox> off25 = annos;
  for (BBox& b : off25) b.cx += 25.0;
  CHECK(precision(off25, annos) == 0.0);

  std::vector<BBox> half = annos;
  for (std::size_t i = 0; i < half.size(); ++i) {
    half[i].cx += (i < 5) ? 5.0 : 30.0;
  }
  // Per-frame count oracle: first five within threshold, rest beyond.
  CHECK(precision(half, annos) == doctest::Approx(0.5));

  CHECK_THROWS_AS(precision(half, std::vector<BBox>(3)), LengthMismatchError);
}

TEST_CASE("succ_rate basics and boundary") {
  std::vector<BBox> preds{BBox{10, 10, 4, 4}, BBox{30, 10, 4, 4},
                          BBox{50, 10, 4, 4}};
  std::vector<Point> exact{{10, 10}, {30, 10}, {50, 10}};
  CHECK(succ_rate(preds, exact) == 1.0);

  std::vector<Point> far{{110, 10}, {130, 10}, {150, 10}};
  CHECK(succ_rate(preds, far) == 0.0);

  std::vector<Point> edges{{10, 10}, {30.0 + 19.9, 10}, {50.0 + 20.1, 10}};
  CHECK(succ_rate(preds, edges) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(succ_rate(preds, std::vector<Point>(1)),
                  LengthMismatchError);
}

TEST_CASE("rates never increase when a frame becomes a violation") {
  SplitMix64 rng(301);
  std::vector<BBox> preds, annos;
  for (int i = 0; i < 30; ++i) {
    const BBox b{rng.uniform(0, 100), rng.uniform(0, 100), 4, 4};
    annos.push_back(b);
    BBox p = b;
    p.cx += rng.uniform(0.0, 40.0);
    preds.push_back(p);
  }
  const double before = precision(preds, annos);
  preds[4].cx = annos[4].cx + 100.0;  // force one violation
  CHECK(precision(preds, annos) <= before);
}

TEST_CASE("map_suite: zeros, constants, flat-mean oracle") {
  std::vector<std::vector<Perturbation>> zeros(
      3, std::vector<Perturbation>(4, Perturbation(5, 5, 1)));
  CHECK(map_suite(zeros) == 0.0);

  std::vector<std::vector<Perturbation>> twos(
      2, std::vector<Perturbation>(3, Perturbation(4, 4, 1, -2.0)));
  CHECK(map_suite(twos) == doctest::Approx(2.0));

  SplitMix64 rng(307);
  std::vector<std::vector<Perturbation>> random_runs;
  double flat_sum = 0.0;
  std::size_t flat_count = 0;
  for (int d = 0; d < 3; ++d) {
    std::vector<Perturbation> frames;
    for (int k = 0; k < 5; ++k) {
      Perturbation p(6, 6, 1);
      for (double& v : p.data) {
        v = rng.uniform(-4.0, 4.0);
        flat_sum += std::abs(v);
        ++flat_count;
      }
      frames.push_back(std::move(p));
    }
    random_runs.push_back(std::move(frames));
  }
  // Equal frame and pixel counts: the nested mean equals the flat mean.
  CHECK(map_suite(random_runs) ==
        doctest::Approx(flat_sum / flat_count).epsilon(1e-12));
}

TEST_CASE("map is invariant to ordering and equal-size partitioning") {
  SplitMix64 rng(311);
  std::vector<Perturbation> frames;
  for (int k = 0; k < 12; ++k) {
    Perturbation p(4, 4, 1);
    for (double& v : p.data) v = rng.uniform(-3.0, 3.0);
    frames.push_back(std::move(p));
  }
  const double one_video = map_suite({frames});
  std::vector<std::vector<Perturbation>> split{
      {frames.begin(), frames.begin() + 6}, {frames.begin() + 6, frames.end()}};
  CHECK(map_suite(split) == doctest::Approx(one_video).epsilon(1e-12));

  std::vector<Perturbation> shuffled = frames;
  std::swap(shuffled[0], shuffled[11]);
  std::swap(shuffled[3], shuffled[7]);
  CHECK(map_suite({shuffled}) == doctest::Approx(one_video).epsilon(1e-12));
}
