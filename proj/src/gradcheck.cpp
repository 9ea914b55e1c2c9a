#include "trackadv/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "trackadv/attack_spark.hpp"
#include "trackadv/objectives.hpp"
#include "trackadv/rng.hpp"
#include "trackadv/tracker.hpp"

namespace trackadv {

namespace {

constexpr double kFdStep = 1e-3;

// Builds a region with a solid margin structure: noise background, the
// template pattern at one offset and a boosted copy at a disjoint offset,
// so the argmax of the margin objectives is stable under +-h pixel probes.
struct TrialSetup {
  Frame frame0;
  Frame region;
  BBox gt_box;
  Point target;
  TrackerState state;
};

TrialSetup make_trial(const FeatureKernel& kernel, SplitMix64& rng) {
  const int region_side = 26;
  const int tpl_side = 10;

  Frame frame0(region_side, region_side, 1);
  for (double& v : frame0.data) v = 96.0 + rng.uniform(-25.0, 25.0);

  // Template source patch near the region center.
  const int tx = 4 + static_cast<int>(rng.uniform_index(4));
  const int ty = 4 + static_cast<int>(rng.uniform_index(4));
  const BBox tpl_box{tx + 0.5 * tpl_side, ty + 0.5 * tpl_side,
                     static_cast<double>(tpl_side),
                     static_cast<double>(tpl_side)};

  TrialSetup setup;
  setup.frame0 = frame0;
  setup.state = init_tracker(frame0, tpl_box, kernel);

  // Perturbed working region: fresh noise plus a strong template echo at a
  // disjoint offset to pin the adversary argmax.
  Frame region = frame0;
  for (double& v : region.data) v += rng.uniform(-4.0, 4.0);
  const int ex = (tx >= region_side / 2) ? 1 : region_side - tpl_side - 1;
  const int ey = (ty >= region_side / 2) ? 1 : region_side - tpl_side - 1;
  for (int y = 0; y < tpl_side; ++y) {
    for (int x = 0; x < tpl_side; ++x) {
      region.at(ey + y, ex + x, 0) =
          96.0 + 3.0 * (frame0.at(ty + y, tx + x, 0) - 96.0);
    }
  }
  setup.region = region;
  setup.gt_box = tpl_box;
  setup.target = Point{ex + 0.5 * tpl_side, ey + 0.5 * tpl_side};
  return setup;
}

double rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// Checks d(objective)/d(region pixels) on `probes` random coordinates.
double check_objective(const TrialSetup& setup, ObjectiveKind kind,
                       SplitMix64& rng, int probes) {
  auto eval_value = [&](const Frame& region) {
    const ResponseMap map = respond(setup.state, region);
    const ObjectiveEval e = kind == ObjectiveKind::ua
                                ? f_ua(map, setup.gt_box)
                                : f_ta(map, setup.target, setup.gt_box);
    return e;
  };

  const ObjectiveEval base = eval_value(setup.region);
  if (!base.ok()) return 0.0;
  const ResponseMap map = respond(setup.state, setup.region);
  const Grid grad = grad_activations(setup.state, setup.region,
                                     base.grad_weights(map.count()));

  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const std::size_t idx = rng.uniform_index(setup.region.data.size());
    Frame plus = setup.region;
    Frame minus = setup.region;
    plus.data[idx] += kFdStep;
    minus.data[idx] -= kFdStep;
    const ObjectiveEval ep = eval_value(plus);
    const ObjectiveEval em = eval_value(minus);
    if (!ep.ok() || !em.ok()) continue;
    // Skip probes that flip the adversary argmax (a kink of the max).
    if (ep.adversary_index != base.adversary_index ||
        em.adversary_index != base.adversary_index) {
      continue;
    }
    const double fd = (ep.value - em.value) / (2.0 * kFdStep);
    const double an = grad.data[idx];
    if (std::abs(fd) < 1e-7 && std::abs(an) < 1e-7) continue;
    worst = std::max(worst, rel_err(an, fd));
  }
  return worst;
}

double check_l21(SplitMix64& rng, int probes) {
  const int h = 6, w = 6, c = 1;
  std::vector<Grid> cols;
  const int ncols = 3;
  for (int k = 0; k < ncols; ++k) {
    Grid g(h, w, c);
    // Keep rows away from the kink.
    for (double& v : g.data) v = rng.uniform(0.2, 2.0) * rng.sign();
    cols.push_back(std::move(g));
  }
  std::vector<const Grid*> views;
  for (const Grid& g : cols) views.push_back(&g);

  const Grid grad = l21_subgradient(views);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const std::size_t idx = rng.uniform_index(cols.back().data.size());
    Grid& newest = cols.back();
    const double keep = newest.data[idx];
    newest.data[idx] = keep + kFdStep;
    const double fp = l21_norm(views);
    newest.data[idx] = keep - kFdStep;
    const double fm = l21_norm(views);
    newest.data[idx] = keep;
    const double fd = (fp - fm) / (2.0 * kFdStep);
    worst = std::max(worst, rel_err(grad.data[idx], fd));
  }
  return worst;
}

}  // namespace

double GradCheckReport::worst() const {
  return std::max({max_rel_err_ua, max_rel_err_ta, max_rel_err_l21});
}

std::string GradCheckReport::summary() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "trials=%d ua=%.3e ta=%.3e l21=%.3e (%.2fs)", trials,
                max_rel_err_ua, max_rel_err_ta, max_rel_err_l21, seconds);
  return buf;
}

GradCheckReport run_gradient_checks(int trials_per_kernel,
                                    std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GradCheckReport report;
  SplitMix64 rng(seed);

  const KernelKind kinds[] = {KernelKind::identity, KernelKind::box_blur_3,
                              KernelKind::box_blur_5,
                              KernelKind::center_surround};
  const int probes = 24;
  for (KernelKind kind : kinds) {
    const FeatureKernel kernel{kind};
    for (int trial = 0; trial < trials_per_kernel; ++trial) {
      const TrialSetup setup = make_trial(kernel, rng);
      report.max_rel_err_ua =
          std::max(report.max_rel_err_ua,
                   check_objective(setup, ObjectiveKind::ua, rng, probes));
      report.max_rel_err_ta =
          std::max(report.max_rel_err_ta,
                   check_objective(setup, ObjectiveKind::ta, rng, probes));
      ++report.trials;
    }
  }
  for (int trial = 0; trial < 2 * trials_per_kernel; ++trial) {
    report.max_rel_err_l21 =
        std::max(report.max_rel_err_l21, check_l21(rng, probes));
  }

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace trackadv
