#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "trackadv/errors.hpp"
#include "trackadv/grid.hpp"
#include "trackadv/rng.hpp"

using namespace trackadv;

namespace {

Grid random_grid(int h, int w, int c, SplitMix64& rng, double lo = 0.0,
                 double hi = 255.0) {
  Grid g(h, w, c);
  for (double& v : g.data) v = rng.uniform(lo, hi);
  return g;
}

std::filesystem::path temp_dir() {
  const auto dir =
      std::filesystem::temp_directory_path() / "trackadv_grid_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("apply: zero perturbation, clipping, reference loop") {
  SplitMix64 rng(17);
  const Frame f = random_grid(6, 5, 3, rng);
  const Perturbation zero(6, 5, 3);
  const Frame same = apply(f, zero);
  CHECK(same.data == f.data);

  Frame bright(4, 4, 1, 255.0);
  Perturbation up(4, 4, 1, 5.0);
  const Frame clipped = apply(bright, up);
  for (double v : clipped.data) CHECK(v == 255.0);

  const Perturbation p = random_grid(6, 5, 3, rng, -30.0, 30.0);
  const Frame out = apply(f, p);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 5; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double expect = f.at(y, x, ch) + p.at(y, x, ch);
        if (expect < 0.0) expect = 0.0;
        if (expect > 255.0) expect = 255.0;
        CHECK(out.at(y, x, ch) == expect);
      }
    }
  }
}

TEST_CASE("apply rejects mismatched shapes") {
  CHECK_THROWS_AS(apply(Frame(3, 3, 1), Perturbation(3, 4, 1)),
                  ShapeMismatchError);
}

TEST_CASE("crop: full frame, all-outside padding, checkerboard corner") {
  SplitMix64 rng(23);
  const Frame f = random_grid(8, 8, 1, rng);

  const Grid full = crop(f, BBox{4.0, 4.0, 8.0, 8.0});
  CHECK(full.data == f.data);

  const Grid outside = crop(f, BBox{100.0, 100.0, 4.0, 4.0});
  const double mean = channel_means(f)[0];
  for (double v : outside.data) CHECK(v == mean);

  Frame checker(4, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) checker.at(y, x, 0) = (x + y) % 2 ? 255.0 : 0.0;
  }
  const Grid corner = crop(checker, BBox{1.0, 1.0, 2.0, 2.0});
  CHECK(corner.h == 2);
  CHECK(corner.w == 2);
  CHECK(corner.at(0, 0, 0) == checker.at(0, 0, 0));
  CHECK(corner.at(0, 1, 0) == checker.at(0, 1, 0));
  CHECK(corner.at(1, 0, 0) == checker.at(1, 0, 0));
  CHECK(corner.at(1, 1, 0) == checker.at(1, 1, 0));
}

TEST_CASE("crop rejects empty regions") {
  const Frame f(4, 4, 1);
  CHECK_THROWS_AS(crop(f, BBox{2.0, 2.0, 0.2, 3.0}), EmptyRegionError);
}

TEST_CASE("embed: roundtrip, zero patch, disjoint additivity") {
  SplitMix64 rng(29);
  const Frame f = random_grid(10, 10, 1, rng);
  const BBox region{3.0, 4.0, 4.0, 4.0};

  const Grid patch = crop(f, region);
  const Grid back = embed(10, 10, 1, region, patch);
  const Grid again = crop(back, region);
  CHECK(again.data == patch.data);

  const Grid zero = embed(10, 10, 1, region, Grid(4, 4, 1));
  for (double v : zero.data) CHECK(v == 0.0);

  const BBox r1{2.0, 2.0, 2.0, 2.0};
  const BBox r2{7.0, 7.0, 2.0, 2.0};
  const Grid p1 = random_grid(2, 2, 1, rng, -4.0, 4.0);
  const Grid p2 = random_grid(2, 2, 1, rng, -4.0, 4.0);
  const Grid both = add(embed(10, 10, 1, r1, p1), embed(10, 10, 1, r2, p2));
  // Reference loop: scatter both patches manually.
  Grid expect(10, 10, 1);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      expect.at(1 + y, 1 + x, 0) += p1.at(y, x, 0);
      expect.at(6 + y, 6 + x, 0) += p2.at(y, x, 0);
    }
  }
  CHECK(both.data == expect.data);
}

TEST_CASE("crop-embed-crop equals crop on interior pixels") {
  SplitMix64 rng(31);
  const Frame f = random_grid(16, 16, 3, rng);
  for (int i = 0; i < 20; ++i) {
    const BBox region{rng.uniform(3, 13), rng.uniform(3, 13),
                      std::floor(rng.uniform(2, 6)),
                      std::floor(rng.uniform(2, 6))};
    const Grid once = crop(f, region);
    const Grid back = crop(embed(16, 16, 3, region, once), region);
    CHECK(back.data == once.data);
  }
}

TEST_CASE("embed rejects mismatched patch shape") {
  CHECK_THROWS_AS(embed(8, 8, 1, BBox{4, 4, 3, 3}, Grid(4, 4, 1)),
                  ShapeMismatchError);
}

TEST_CASE("visualize_perturbation scaling") {
  Perturbation zero(3, 3, 1);
  for (double v : visualize_perturbation(zero).data) CHECK(v == 0.0);

  Perturbation ones(3, 3, 1, 1.0);
  for (double v : visualize_perturbation(ones, 255.0).data) CHECK(v == 255.0);

  Perturbation small(2, 2, 1, 0.004);
  for (double v : visualize_perturbation(small, 255.0).data) {
    CHECK(v == doctest::Approx(1.02).epsilon(1e-12));
  }
}

TEST_CASE("ppm roundtrip is exact for integer frames") {
  SplitMix64 rng(37);
  const auto dir = temp_dir();

  Frame rgb(5, 7, 3);
  for (double& v : rgb.data) v = std::floor(rng.uniform(0.0, 256.0));
  save_ppm(rgb, dir / "rgb.ppm");
  CHECK(load_ppm(dir / "rgb.ppm").data == rgb.data);

  Frame gray(4, 6, 1);
  for (double& v : gray.data) v = std::floor(rng.uniform(0.0, 256.0));
  save_ppm(gray, dir / "gray.ppm");
  const Frame gray2 = load_ppm(dir / "gray.ppm");
  CHECK(gray2.c == 1);
  CHECK(gray2.data == gray.data);
}

TEST_CASE("ppm loader rejects bad magic") {
  const auto dir = temp_dir();
  std::ofstream(dir / "bad.ppm") << "P3\n1 1\n255\n0 0 0\n";
  CHECK_THROWS_AS(load_ppm(dir / "bad.ppm"), BadMagicError);
  CHECK_THROWS_AS(load_ppm(dir / "missing.ppm"), IoError);
}

TEST_CASE("grid container roundtrip is bit-exact") {
  SplitMix64 rng(41);
  const auto dir = temp_dir();
  Grid g = random_grid(5, 7, 3, rng, -16.0, 16.0);
  g.data[0] = 0.125;
  save_grid(g, dir / "g.grid");
  const Grid back = load_grid(dir / "g.grid");
  CHECK(back.h == 5);
  CHECK(back.w == 7);
  CHECK(back.c == 3);
  CHECK(back.data == g.data);
  CHECK(back.data[0] == 0.125);

  // Byte-level comparison of a second serialization.
  save_grid(back, dir / "g2.grid");
  std::ifstream a(dir / "g.grid", std::ios::binary);
  std::ifstream b(dir / "g2.grid", std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)),
                            std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(b)),
                            std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
}

TEST_CASE("grid loader validates header") {
  const auto dir = temp_dir();
  std::ofstream(dir / "bad.grid", std::ios::binary) << "not a grid file at all";
  CHECK_THROWS_AS(load_grid(dir / "bad.grid"), BadMagicError);
}
