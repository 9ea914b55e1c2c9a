#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trackadv/attack_spark.hpp"
#include "trackadv/attacks_basic.hpp"
#include "trackadv/metrics.hpp"
#include "trackadv/scene.hpp"

namespace trackadv {

/// One named attack entry of the experiment grid.
struct AttackSpec {
  std::string name;
  bool is_spark = false;
  BasicAttackConfig basic;
  SparkConfig spark;

  static AttackSpec make_basic(std::string name, BasicAttackConfig cfg) {
    AttackSpec spec;
    spec.name = std::move(name);
    spec.basic = cfg;
    return spec;
  }
  static AttackSpec make_spark(std::string name, SparkConfig cfg) {
    AttackSpec spec;
    spec.name = std::move(name);
    spec.is_spark = true;
    spec.spark = cfg;
    return spec;
  }
};

struct KernelPair {
  std::string attacker = "identity";
  std::string victim = "identity";
};

/// Experiment grid: every attack x objective x kernel pair runs over every
/// scene of the suite. Per-cell seeds derive from the master seed and the
/// cell coordinates, so results do not depend on worker scheduling.
struct ExperimentConfig {
  int scene_count = 20;
  SceneConfig scene;
  std::vector<AttackSpec> attacks;
  std::vector<ObjectiveKind> objectives{ObjectiveKind::ta};
  std::vector<KernelPair> kernel_pairs{{}};
  std::string out_dir = "out";
  std::uint64_t master_seed = 424242;
  int workers = 0;  // 0 = hardware concurrency
  bool dump_perturbations = false;
};

ExperimentConfig config_from_json_file(const std::filesystem::path& path);
void config_to_json_file(const ExperimentConfig& config,
                         const std::filesystem::path& path);

/// Aggregated suite-level row for one grid cell.
struct ResultRow {
  std::string attack;       // "none" for clean rows
  std::string objective;    // empty for clean rows
  std::string attacker_kernel;
  std::string victim_kernel;
  double org_prec = 0.0;
  double prec_attacked = 0.0;
  double prec_drop = 0.0;
  double succ = 0.0;
  bool has_succ = false;
  double map = 0.0;
  double mean_iters = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::string to_csv() const;
};

/// Per-video detail retained for analysis and the acceptance suite.
struct CellResult {
  std::string cell_id;
  std::string attack;
  std::string objective;
  KernelPair kernels;
  std::vector<RunMetrics> per_video;
  std::vector<AttackRun> runs;  // per-frame records per video
};

struct SuiteResult {
  ResultTable table;
  std::vector<CellResult> cells;
};

std::string cell_id(const std::string& attack, const std::string& objective,
                    const KernelPair& kernels);

/// Runs (or resumes) the experiment: generates/loads the scene suite under
/// out_dir/scenes, executes every pending cell on a worker pool, persists
/// per-cell metrics.json + frames.csv, and writes table.csv, videos.csv and
/// summary.json.
SuiteResult run_suite(const ExperimentConfig& config);

/// Rebuilds the suite table and plots from an existing output directory.
ResultTable report(const ExperimentConfig& config);

/// Emits per-video SVG plots (distance to target, per-frame perturbation,
/// loss-vs-iteration at the round anchors) for each cell directory.
void write_plots(const std::filesystem::path& cell_dir);

/// Minimal polyline chart used for the report plots.
std::string svg_line_chart(const std::string& title,
                           const std::vector<double>& series, int width = 640,
                           int height = 240);

}  // namespace trackadv
