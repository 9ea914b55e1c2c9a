#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trackadv/geometry.hpp"
#include "trackadv/grid.hpp"

namespace trackadv {

enum class TextureKind { checker, noise, gradient };
enum class BackgroundKind { flat, noise, drift };

std::string to_string(TextureKind k);
std::string to_string(BackgroundKind k);
TextureKind texture_from_string(const std::string& s);
BackgroundKind background_from_string(const std::string& s);

/// Configuration for one synthetic video. Motion is a seeded bounded random
/// walk of the object center, reflected at the borders so the box never
/// leaves the frame.
struct SceneConfig {
  int frame_h = 160;
  int frame_w = 160;
  int object_w = 32;
  int object_h = 32;
  int num_frames = 100;
  int channels = 1;
  double motion_step_max = 4.0;
  TextureKind texture = TextureKind::noise;
  BackgroundKind background = BackgroundKind::flat;
  double noise_sigma = 1.0;
  std::uint64_t seed = 1;
};

struct Video {
  std::vector<Frame> frames;
  std::vector<BBox> gt;
};

/// Deterministic generator: identical configs (including seed) produce
/// bit-identical videos. Frames are quantized to integers so PPM round-trips
/// are exact.
Video generate(const SceneConfig& config);

/// Random-walk target trajectory: each per-axis step has magnitude uniform
/// in [1, 10] with independent random sign, reflected at frame borders.
std::vector<Point> target_trajectory(Point start, int num_points,
                                     std::uint64_t seed, int frame_w,
                                     int frame_h);

/// One scene of a benchmark suite: video, ground truth and the targeted
/// trajectory used by targeted attacks.
struct Scene {
  SceneConfig config;
  Video video;
  std::vector<Point> trajectory;
};

struct SceneSuite {
  std::vector<Scene> scenes;
};

/// Builds `count` scenes with per-scene seeds derived from `master_seed`.
/// Trajectories start at the frame-0 object center.
SceneSuite make_suite(int count, const SceneConfig& base,
                      std::uint64_t master_seed);

/// Suite persistence: a directory of PPM frames plus a JSON manifest holding
/// configs, ground-truth boxes and trajectories.
void save_suite(const SceneSuite& suite, const std::filesystem::path& dir);
SceneSuite load_suite(const std::filesystem::path& dir);

}  // namespace trackadv
