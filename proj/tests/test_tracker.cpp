#include <cmath>

#include "doctest.h"
#include "trackadv/errors.hpp"
#include "trackadv/rng.hpp"
#include "trackadv/scene.hpp"
#include "trackadv/tracker.hpp"

using namespace trackadv;

namespace {

Frame random_frame(int h, int w, int c, SplitMix64& rng) {
  Frame f(h, w, c);
  for (double& v : f.data) v = rng.uniform(20.0, 230.0);
  return f;
}

// Brute-force NCC over feature maps, mirroring the definition directly.
double reference_ncc(const Grid& tmpl_feat, const Grid& region_feat, int r,
                     int c) {
  const int th = tmpl_feat.h, tw = tmpl_feat.w, ch = tmpl_feat.c;
  const int n = th * tw * ch;
  double tmean = 0.0, pmean = 0.0;
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      for (int k = 0; k < ch; ++k) {
        tmean += tmpl_feat.at(y, x, k);
        pmean += region_feat.at(r + y, c + x, k);
      }
    }
  }
  tmean /= n;
  pmean /= n;
  double num = 0.0, tnorm = 0.0, pnorm = 0.0;
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      for (int k = 0; k < ch; ++k) {
        const double tv = tmpl_feat.at(y, x, k) - tmean;
        const double pv = region_feat.at(r + y, c + x, k) - pmean;
        num += tv * pv;
        tnorm += tv * tv;
        pnorm += pv * pv;
      }
    }
  }
  if (pnorm <= 0.0 || tnorm <= 0.0) return 0.0;
  return num / std::sqrt(tnorm * pnorm);
}

}  // namespace

TEST_CASE("init caches a consistent normalized template") {
  SplitMix64 rng(51);
  const Frame f = random_frame(40, 40, 1, rng);
  const BBox gt{20.0, 20.0, 12.0, 12.0};
  const TrackerState state = init_tracker(f, gt, {KernelKind::identity});

  // Cached norm equals the recomputed norm of the raw feature template.
  const Grid patch = crop(f, gt);
  double mean = 0.0;
  for (double v : patch.data) mean += v;
  mean /= patch.data.size();
  double norm2 = 0.0;
  for (double v : patch.data) norm2 += (v - mean) * (v - mean);
  CHECK(state.template_norm ==
        doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));

  double hat_norm2 = 0.0, hat_sum = 0.0;
  for (double v : state.template_hat.data) {
    hat_norm2 += v * v;
    hat_sum += v;
  }
  CHECK(hat_norm2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hat_sum == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("init then respond on the first frame peaks at gt") {
  SceneConfig cfg;
  cfg.num_frames = 3;
  cfg.seed = 5;
  const Video video = generate(cfg);
  const TrackerState state =
      init_tracker(video.frames[0], video.gt[0], {KernelKind::identity});
  const SearchRegion region = search_region(state, video.frames[0]);
  const ResponseMap map = respond(state, region.pixels, region.origin);
  const Prediction pred = predict(map);
  CHECK(cle(pred.box, video.gt[0]) < 1.0);
  CHECK(pred.activation == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("different kernels produce different templates") {
  SplitMix64 rng(53);
  const Frame f = random_frame(40, 40, 1, rng);
  const BBox gt{20.0, 20.0, 10.0, 10.0};
  const TrackerState a = init_tracker(f, gt, {KernelKind::identity});
  const TrackerState b = init_tracker(f, gt, {KernelKind::box_blur_3});
  const TrackerState c = init_tracker(f, gt, {KernelKind::identity});
  CHECK(a.template_hat.data != b.template_hat.data);
  CHECK(a.template_hat.data == c.template_hat.data);

  // Direct application oracle for the blurred template.
  const Grid blurred = FeatureKernel{KernelKind::box_blur_3}.apply(crop(f, gt));
  double mean = 0.0;
  for (double v : blurred.data) mean += v;
  mean /= blurred.data.size();
  double norm2 = 0.0;
  for (double v : blurred.data) norm2 += (v - mean) * (v - mean);
  CHECK(b.template_norm == doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));
}

TEST_CASE("search region geometry") {
  SplitMix64 rng(57);
  const Frame f = random_frame(160, 160, 1, rng);
  const BBox gt{80.0, 80.0, 32.0, 32.0};
  const TrackerState state = init_tracker(f, gt, {KernelKind::identity}, 2.0);
  const SearchRegion region = search_region(state, f);
  CHECK(region.pixels.h == 64);
  CHECK(region.pixels.w == 64);
  // Region center coincides with the previous prediction center.
  CHECK(region.origin.x + 32.0 == doctest::Approx(80.0));
  CHECK(region.origin.y + 32.0 == doctest::Approx(80.0));

  // Region content equals an explicit crop of the same rectangle.
  const Grid reference = crop(f, region.rect);
  CHECK(region.pixels.data == reference.data);
}

TEST_CASE("respond: exact copy scores 1, negation scores -1") {
  SplitMix64 rng(61);
  Frame f = random_frame(30, 30, 1, rng);
  const BBox gt{10.0, 10.0, 8.0, 8.0};
  const TrackerState state = init_tracker(f, gt, {KernelKind::identity});

  // Build a region that embeds the exact template patch and its negation
  // around the template mean.
  const Grid patch = crop(f, gt);
  double mean = 0.0;
  for (double v : patch.data) mean += v;
  mean /= patch.data.size();

  Frame region(20, 20, 1, mean);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      region.at(1 + y, 1 + x, 0) = patch.at(y, x, 0);
      region.at(11 + y, 11 + x, 0) = 2.0 * mean - patch.at(y, x, 0);
    }
  }
  const ResponseMap map = respond(state, region);
  CHECK(map.activation(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(map.activation(11, 11) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("respond matches brute-force NCC within 1e-10") {
  SplitMix64 rng(63);
  for (KernelKind kind :
       {KernelKind::identity, KernelKind::box_blur_3, KernelKind::box_blur_5,
        KernelKind::center_surround}) {
    const Frame f = random_frame(32, 32, 1, rng);
    const BBox gt{16.0, 16.0, 9.0, 9.0};
    const FeatureKernel kernel{kind};
    const TrackerState state = init_tracker(f, gt, kernel);
    const Frame region = random_frame(24, 24, 1, rng);
    const ResponseMap map = respond(state, region);

    const Grid region_feat = kernel.apply(region);
    const Grid tmpl_feat = kernel.apply(crop(f, gt));
    for (int r = 0; r < map.rows; ++r) {
      for (int c = 0; c < map.cols; ++c) {
        CHECK(map.activation(r, c) ==
              doctest::Approx(reference_ncc(tmpl_feat, region_feat, r, c))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("respond activation bound and zero-variance patches") {
  SplitMix64 rng(67);
  const Frame f = random_frame(30, 30, 1, rng);
  const TrackerState state =
      init_tracker(f, BBox{15, 15, 8, 8}, {KernelKind::identity});
  const Frame region = random_frame(26, 26, 1, rng);
  const ResponseMap map = respond(state, region);
  for (double a : map.activations) CHECK(std::abs(a) <= 1.0 + 1e-9);

  const Frame flat(20, 20, 1, 100.0);
  const ResponseMap flat_map = respond(state, flat);
  for (double a : flat_map.activations) CHECK(a == 0.0);
}

TEST_CASE("respond rejects undersized regions") {
  SplitMix64 rng(69);
  const Frame f = random_frame(30, 30, 1, rng);
  const TrackerState state =
      init_tracker(f, BBox{15, 15, 12, 12}, {KernelKind::identity});
  CHECK_THROWS_AS(respond(state, Frame(8, 8, 1)), RegionTooSmallError);
}

TEST_CASE("predict: argmax, ties, linear-scan oracle") {
  ResponseMap map;
  map.rows = 1;
  map.cols = 1;
  map.activations = {0.4};
  map.box_w = 4;
  map.box_h = 4;
  CHECK(predict(map).index == 0);

  map.rows = 6;
  map.cols = 7;
  map.activations.assign(42, 0.0);
  map.activations[static_cast<std::size_t>(3 * 7 + 5)] = 0.9;
  const Prediction p = predict(map);
  CHECK(p.index == 3 * 7 + 5);
  CHECK(p.box.cx == doctest::Approx(5 + 2.0));
  CHECK(p.box.cy == doctest::Approx(3 + 2.0));

  // Tie at two indices resolves to the first in row-major order.
  map.activations[static_cast<std::size_t>(1 * 7 + 2)] = 0.9;
  CHECK(predict(map).index == 1 * 7 + 2);

  SplitMix64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    for (double& a : map.activations) a = rng.uniform(-1.0, 1.0);
    int best = 0;
    for (int i = 1; i < 42; ++i) {
      if (map.activations[static_cast<std::size_t>(i)] >
          map.activations[static_cast<std::size_t>(best)]) {
        best = i;
      }
    }
    CHECK(predict(map).index == best);
  }
}

TEST_CASE("shift equivariance of the argmax") {
  SplitMix64 rng(73);
  const Frame f = random_frame(40, 40, 1, rng);
  const BBox gt{20.0, 20.0, 8.0, 8.0};
  const TrackerState state = init_tracker(f, gt, {KernelKind::identity});
  const Grid patch = crop(f, gt);

  for (int shift = 0; shift <= 6; ++shift) {
    Frame region(30, 30, 1, 100.0);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        region.at(4 + shift + y, 6 + shift + x, 0) = patch.at(y, x, 0);
      }
    }
    const Prediction p = predict(respond(state, region));
    CHECK(p.index / (30 - 8 + 1) == 4 + shift);
    CHECK(p.index % (30 - 8 + 1) == 6 + shift);
  }
}

TEST_CASE("grad_activations: zero weights, linearity, finite differences") {
  SplitMix64 rng(79);
  const Frame f = random_frame(30, 30, 1, rng);
  const BBox gt{15.0, 15.0, 8.0, 8.0};

  for (KernelKind kind :
       {KernelKind::identity, KernelKind::box_blur_3,
        KernelKind::center_surround}) {
    const TrackerState state = init_tracker(f, gt, {kind});
    const Frame region = random_frame(20, 20, 1, rng);
    const ResponseMap map = respond(state, region);
    const int n = map.count();

    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    const Grid gz = grad_activations(state, region, zero);
    for (double v : gz.data) CHECK(v == 0.0);

    std::vector<double> w1(static_cast<std::size_t>(n), 0.0);
    std::vector<double> w2(static_cast<std::size_t>(n), 0.0);
    w1[static_cast<std::size_t>(rng.uniform_index(n))] = 1.3;
    w2[static_cast<std::size_t>(rng.uniform_index(n))] = -0.7;
    std::vector<double> w12 = w1;
    for (int i = 0; i < n; ++i) w12[static_cast<std::size_t>(i)] += w2[static_cast<std::size_t>(i)];

    const Grid g1 = grad_activations(state, region, w1);
    const Grid g2 = grad_activations(state, region, w2);
    const Grid g12 = grad_activations(state, region, w12);
    for (std::size_t i = 0; i < g12.data.size(); ++i) {
      CHECK(g12.data[i] ==
            doctest::Approx(g1.data[i] + g2.data[i]).epsilon(1e-10));
    }

    // Single-weight gradient vs central finite differences.
    const int cand = static_cast<int>(rng.uniform_index(n));
    std::vector<double> wfd(static_cast<std::size_t>(n), 0.0);
    wfd[static_cast<std::size_t>(cand)] = 1.0;
    const Grid grad = grad_activations(state, region, wfd);
    const double h = 1e-3;
    for (int probe = 0; probe < 20; ++probe) {
      const std::size_t idx = rng.uniform_index(region.data.size());
      Frame plus = region;
      Frame minus = region;
      plus.data[idx] += h;
      minus.data[idx] -= h;
      const double fd =
          (respond(state, plus).activations[static_cast<std::size_t>(cand)] -
           respond(state, minus).activations[static_cast<std::size_t>(cand)]) /
          (2.0 * h);
      const double an = grad.data[idx];
      if (std::abs(fd) < 1e-9 && std::abs(an) < 1e-9) continue;
      const double rel =
          std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8});
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("detect_center_object finds the textured object") {
  SceneConfig cfg;
  cfg.num_frames = 2;
  cfg.noise_sigma = 1.0;
  cfg.seed = 31;
  const Video video = generate(cfg);
  const BBox detected = detect_center_object(video.frames[0], 32, 32);
  CHECK(cle(detected, video.gt[0]) < 8.0);
}
