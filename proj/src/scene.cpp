#include "trackadv/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "trackadv/errors.hpp"
#include "trackadv/rng.hpp"

namespace trackadv {

namespace {

// Rendering constants. The object sits on a mid-gray background with
// moderate texture contrast; per-frame sensor noise comes on top. Contrast
// is deliberately modest so pixel-budgeted attacks have a realistic fight.
constexpr double kBackgroundLevel = 96.0;
constexpr double kObjectContrast = 6.0;
constexpr double kBackgroundContrast = 4.0;
constexpr int kCheckerCell = 8;

double reflect(double v, double lo, double hi) {
  if (lo >= hi) return lo;
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return v;
}

Grid make_object_pattern(const SceneConfig& cfg, SplitMix64& rng) {
  Grid pat(cfg.object_h, cfg.object_w, cfg.channels);
  for (int y = 0; y < cfg.object_h; ++y) {
    for (int x = 0; x < cfg.object_w; ++x) {
      double v = kBackgroundLevel;
      switch (cfg.texture) {
        case TextureKind::checker: {
          const int parity = (y / kCheckerCell + x / kCheckerCell) & 1;
          v = kBackgroundLevel + (parity ? kObjectContrast : -kObjectContrast);
          break;
        }
        case TextureKind::noise:
          v = kBackgroundLevel + kObjectContrast * (2.0 * rng.uniform() - 1.0);
          break;
        case TextureKind::gradient: {
          const double fx = cfg.object_w > 1
                                ? static_cast<double>(x) / (cfg.object_w - 1)
                                : 0.0;
          const double fy = cfg.object_h > 1
                                ? static_cast<double>(y) / (cfg.object_h - 1)
                                : 0.0;
          v = kBackgroundLevel + kObjectContrast * (fx + fy - 1.0);
          break;
        }
      }
      for (int ch = 0; ch < cfg.channels; ++ch) pat.at(y, x, ch) = v;
    }
  }
  return pat;
}

Grid make_background_pattern(const SceneConfig& cfg, SplitMix64& rng) {
  Grid pat(cfg.frame_h, cfg.frame_w, cfg.channels);
  for (int y = 0; y < cfg.frame_h; ++y) {
    for (int x = 0; x < cfg.frame_w; ++x) {
      double v = kBackgroundLevel;
      if (cfg.background != BackgroundKind::flat) {
        v = kBackgroundLevel +
            kBackgroundContrast * (2.0 * rng.uniform() - 1.0);
      }
      for (int ch = 0; ch < cfg.channels; ++ch) pat.at(y, x, ch) = v;
    }
  }
  return pat;
}

void validate(const SceneConfig& cfg) {
  if (cfg.frame_h <= 0 || cfg.frame_w <= 0 || cfg.object_w <= 0 ||
      cfg.object_h <= 0) {
    throw ConfigError("scene: dimensions must be positive");
  }
  if (cfg.channels != 1 && cfg.channels != 3) {
    throw ConfigError("scene: channels must be 1 or 3");
  }
  if (cfg.num_frames < 2) {
    throw ConfigError("scene: num_frames must be at least 2");
  }
  if (cfg.frame_w < 3 * cfg.object_w || cfg.frame_h < 3 * cfg.object_h) {
    throw ConfigError("scene: object must fit with at least one object-size margin");
  }
  if (cfg.motion_step_max < 0.0 || cfg.noise_sigma < 0.0) {
    throw ConfigError("scene: motion_step_max and noise_sigma must be >= 0");
  }
}

}  // namespace

std::string to_string(TextureKind k) {
  switch (k) {
    case TextureKind::checker: return "checker";
    case TextureKind::noise: return "noise";
    case TextureKind::gradient: return "gradient";
  }
  return "checker";
}

std::string to_string(BackgroundKind k) {
  switch (k) {
    case BackgroundKind::flat: return "flat";
    case BackgroundKind::noise: return "noise";
    case BackgroundKind::drift: return "drift";
  }
  return "flat";
}

TextureKind texture_from_string(const std::string& s) {
  if (s == "checker") return TextureKind::checker;
  if (s == "noise") return TextureKind::noise;
  if (s == "gradient") return TextureKind::gradient;
  throw ConfigError("unknown texture kind: " + s);
}

BackgroundKind background_from_string(const std::string& s) {
  if (s == "flat") return BackgroundKind::flat;
  if (s == "noise") return BackgroundKind::noise;
  if (s == "drift") return BackgroundKind::drift;
  throw ConfigError("unknown background kind: " + s);
}

Video generate(const SceneConfig& cfg) {
  validate(cfg);
  SplitMix64 rng(cfg.seed);

  const Grid object = make_object_pattern(cfg, rng);
  const Grid background = make_background_pattern(cfg, rng);

  const double min_cx = 0.5 * cfg.object_w;
  const double max_cx = cfg.frame_w - 0.5 * cfg.object_w;
  const double min_cy = 0.5 * cfg.object_h;
  const double max_cy = cfg.frame_h - 0.5 * cfg.object_h;

  double cx = 0.5 * cfg.frame_w;
  double cy = 0.5 * cfg.frame_h;

  Video video;
  video.frames.reserve(static_cast<std::size_t>(cfg.num_frames));
  video.gt.reserve(static_cast<std::size_t>(cfg.num_frames));

  for (int t = 0; t < cfg.num_frames; ++t) {
    if (t > 0) {
      cx = reflect(cx + rng.uniform(-cfg.motion_step_max, cfg.motion_step_max),
                   min_cx, max_cx);
      cy = reflect(cy + rng.uniform(-cfg.motion_step_max, cfg.motion_step_max),
                   min_cy, max_cy);
    }
    const BBox box{cx, cy, static_cast<double>(cfg.object_w),
                   static_cast<double>(cfg.object_h)};

    Frame frame = background;
    if (cfg.background == BackgroundKind::drift) {
      // Background texture slides one pixel every other frame (wrap-around).
      const int off = t / 2;
      for (int y = 0; y < cfg.frame_h; ++y) {
        for (int x = 0; x < cfg.frame_w; ++x) {
          const int sx = (x + off) % cfg.frame_w;
          for (int ch = 0; ch < cfg.channels; ++ch) {
            frame.at(y, x, ch) = background.at(y, sx, ch);
          }
        }
      }
    }

    const IntRect rect = round_rect(box);
    for (int y = 0; y < rect.h; ++y) {
      for (int x = 0; x < rect.w; ++x) {
        for (int ch = 0; ch < cfg.channels; ++ch) {
          frame.at(rect.y0 + y, rect.x0 + x, ch) = object.at(y, x, ch);
        }
      }
    }

    if (cfg.noise_sigma > 0.0) {
      for (double& v : frame.data) v += cfg.noise_sigma * rng.gaussian();
    }
    for (double& v : frame.data) {
      v = std::clamp(std::round(v), 0.0, 255.0);
    }

    video.frames.push_back(std::move(frame));
    video.gt.push_back(box);
  }
  return video;
}

std::vector<Point> target_trajectory(Point start, int num_points,
                                     std::uint64_t seed, int frame_w,
                                     int frame_h) {
  std::vector<Point> traj;
  if (num_points < 1) return traj;
  traj.reserve(static_cast<std::size_t>(num_points));
  traj.push_back(start);
  SplitMix64 rng(seed);
  Point p = start;
  for (int t = 1; t < num_points; ++t) {
    const double dx = rng.uniform(1.0, 10.0) * rng.sign();
    const double dy = rng.uniform(1.0, 10.0) * rng.sign();
    p.x = reflect(p.x + dx, 0.0, static_cast<double>(frame_w - 1));
    p.y = reflect(p.y + dy, 0.0, static_cast<double>(frame_h - 1));
    traj.push_back(p);
  }
  return traj;
}

SceneSuite make_suite(int count, const SceneConfig& base,
                      std::uint64_t master_seed) {
  // Targeted trajectories start at a diagonal standoff from the object:
  // inside the first frame's attackable neighborhood, but far enough that
  // the target candidate never coincides with the object candidate (which
  // would make the targeted margin identically zero).
  constexpr double kTrajectoryStandoff = 20.0;

  SceneSuite suite;
  suite.scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Scene scene;
    scene.config = base;
    scene.config.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i),
                                    fnv1a("scene"));
    scene.video = generate(scene.config);
    const Point c = center(scene.video.gt.front());
    const Point start{
        reflect(c.x + kTrajectoryStandoff, 0.0,
                static_cast<double>(scene.config.frame_w - 1)),
        reflect(c.y + kTrajectoryStandoff, 0.0,
                static_cast<double>(scene.config.frame_h - 1))};
    scene.trajectory = target_trajectory(
        start, scene.config.num_frames,
        derive_seed(master_seed, static_cast<std::uint64_t>(i),
                    fnv1a("trajectory")),
        scene.config.frame_w, scene.config.frame_h);
    suite.scenes.push_back(std::move(scene));
  }
  return suite;
}

namespace {

using nlohmann::ordered_json;

ordered_json config_to_json(const SceneConfig& c) {
  return ordered_json{{"frame_h", c.frame_h},
                      {"frame_w", c.frame_w},
                      {"object_w", c.object_w},
                      {"object_h", c.object_h},
                      {"num_frames", c.num_frames},
                      {"channels", c.channels},
                      {"motion_step_max", c.motion_step_max},
                      {"texture", to_string(c.texture)},
                      {"background", to_string(c.background)},
                      {"noise_sigma", c.noise_sigma},
                      {"seed", c.seed}};
}

SceneConfig config_from_json(const ordered_json& j) {
  SceneConfig c;
  c.frame_h = j.at("frame_h").get<int>();
  c.frame_w = j.at("frame_w").get<int>();
  c.object_w = j.at("object_w").get<int>();
  c.object_h = j.at("object_h").get<int>();
  c.num_frames = j.at("num_frames").get<int>();
  c.channels = j.at("channels").get<int>();
  c.motion_step_max = j.at("motion_step_max").get<double>();
  c.texture = texture_from_string(j.at("texture").get<std::string>());
  c.background = background_from_string(j.at("background").get<std::string>());
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_suite(const SceneSuite& suite, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ordered_json manifest;
  manifest["version"] = 1;
  manifest["scenes"] = ordered_json::array();
  for (std::size_t i = 0; i < suite.scenes.size(); ++i) {
    const Scene& scene = suite.scenes[i];
    char name[32];
    std::snprintf(name, sizeof(name), "scene%03zu", i);
    const std::filesystem::path scene_dir = dir / name;
    std::filesystem::create_directories(scene_dir);

    ordered_json js;
    js["name"] = name;
    js["config"] = config_to_json(scene.config);
    ordered_json gt = ordered_json::array();
    for (const BBox& b : scene.video.gt) {
      gt.push_back(ordered_json::array({b.cx, b.cy, b.w, b.h}));
    }
    js["gt"] = gt;
    ordered_json traj = ordered_json::array();
    for (const Point& p : scene.trajectory) {
      traj.push_back(ordered_json::array({p.x, p.y}));
    }
    js["trajectory"] = traj;

    for (std::size_t t = 0; t < scene.video.frames.size(); ++t) {
      char frame_name[32];
      std::snprintf(frame_name, sizeof(frame_name), "frame%04zu.ppm", t);
      save_ppm(scene.video.frames[t], scene_dir / frame_name);
    }
    manifest["scenes"].push_back(std::move(js));
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("save_suite: cannot write manifest");
  out << manifest.dump(2) << "\n";
}

SceneSuite load_suite(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("load_suite: missing manifest in " + dir.string());
  ordered_json manifest;
  in >> manifest;

  SceneSuite suite;
  for (const auto& js : manifest.at("scenes")) {
    Scene scene;
    scene.config = config_from_json(js.at("config"));
    const std::string name = js.at("name").get<std::string>();
    for (const auto& b : js.at("gt")) {
      scene.video.gt.push_back(
          BBox{b.at(0).get<double>(), b.at(1).get<double>(),
               b.at(2).get<double>(), b.at(3).get<double>()});
    }
    for (const auto& p : js.at("trajectory")) {
      scene.trajectory.push_back(
          Point{p.at(0).get<double>(), p.at(1).get<double>()});
    }
    for (int t = 0; t < scene.config.num_frames; ++t) {
      char frame_name[32];
      std::snprintf(frame_name, sizeof(frame_name), "frame%04d.ppm", t);
      scene.video.frames.push_back(load_ppm(dir / name / frame_name));
    }
    suite.scenes.push_back(std::move(scene));
  }
  return suite;
}

}  // namespace trackadv
