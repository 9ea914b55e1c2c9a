#include "trackadv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "trackadv/errors.hpp"
#include "trackadv/objectives.hpp"
#include "trackadv/rng.hpp"

namespace trackadv {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      c = '_';
    }
  }
  return s;
}

// --- config (de)serialization ------------------------------------------

ordered_json scene_to_json(const SceneConfig& c) {
  return ordered_json{{"frame_h", c.frame_h},
                      {"frame_w", c.frame_w},
                      {"object_w", c.object_w},
                      {"object_h", c.object_h},
                      {"num_frames", c.num_frames},
                      {"channels", c.channels},
                      {"motion_step_max", c.motion_step_max},
                      {"texture", to_string(c.texture)},
                      {"background", to_string(c.background)},
                      {"noise_sigma", c.noise_sigma}};
}

SceneConfig scene_from_json(const ordered_json& j) {
  SceneConfig c;
  c.frame_h = j.value("frame_h", c.frame_h);
  c.frame_w = j.value("frame_w", c.frame_w);
  c.object_w = j.value("object_w", c.object_w);
  c.object_h = j.value("object_h", c.object_h);
  c.num_frames = j.value("num_frames", c.num_frames);
  c.channels = j.value("channels", c.channels);
  c.motion_step_max = j.value("motion_step_max", c.motion_step_max);
  if (j.contains("texture")) {
    c.texture = texture_from_string(j.at("texture").get<std::string>());
  }
  if (j.contains("background")) {
    c.background =
        background_from_string(j.at("background").get<std::string>());
  }
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  return c;
}

ordered_json attack_to_json(const AttackSpec& a) {
  if (a.is_spark) {
    return ordered_json{{"name", a.name},
                        {"type", "spark"},
                        {"step", a.spark.step},
                        {"lambda", a.spark.lambda},
                        {"reset_interval", a.spark.reset_interval},
                        {"iters_anchor", a.spark.iters_anchor},
                        {"iters_between", a.spark.iters_between},
                        {"epsilon_budget", a.spark.epsilon_budget},
                        {"variant", to_string(a.spark.variant)}};
  }
  return ordered_json{{"name", a.name},
                      {"type", "basic"},
                      {"method", to_string(a.basic.method)},
                      {"schedule", to_string(a.basic.schedule)},
                      {"step", a.basic.step},
                      {"iters_anchor", a.basic.iters_anchor},
                      {"iters_between", a.basic.iters_between},
                      {"momentum_decay", a.basic.momentum_decay},
                      {"cw_penalty", a.basic.cw_penalty},
                      {"attack_prob", a.basic.attack_prob},
                      {"attack_interval", a.basic.attack_interval},
                      {"anchor_period", a.basic.anchor_period},
                      {"epsilon_budget", a.basic.epsilon_budget},
                      {"region", to_string(a.basic.region)}};
}

AttackSpec attack_from_json(const ordered_json& j) {
  AttackSpec a;
  a.name = j.at("name").get<std::string>();
  const std::string type = j.value("type", "basic");
  if (type == "spark") {
    a.is_spark = true;
    a.spark.step = j.value("step", a.spark.step);
    a.spark.lambda = j.value("lambda", a.spark.lambda);
    a.spark.reset_interval = j.value("reset_interval", a.spark.reset_interval);
    a.spark.iters_anchor = j.value("iters_anchor", a.spark.iters_anchor);
    a.spark.iters_between = j.value("iters_between", a.spark.iters_between);
    a.spark.epsilon_budget = j.value("epsilon_budget", a.spark.epsilon_budget);
    a.spark.variant = spark_variant_from_string(j.value("variant", "standard"));
  } else if (type == "basic") {
    a.basic.method =
        attack_method_from_string(j.value("method", std::string("bim")));
    a.basic.schedule =
        schedule_from_string(j.value("schedule", std::string("ba_e")));
    a.basic.step = j.value("step", a.basic.method == AttackMethod::fgsm
                                       ? 1.0
                                       : a.basic.step);
    a.basic.iters_anchor = j.value("iters_anchor", a.basic.iters_anchor);
    a.basic.iters_between = j.value("iters_between", a.basic.iters_between);
    a.basic.momentum_decay = j.value("momentum_decay", a.basic.momentum_decay);
    a.basic.cw_penalty = j.value("cw_penalty", a.basic.cw_penalty);
    a.basic.attack_prob = j.value("attack_prob", a.basic.attack_prob);
    a.basic.attack_interval =
        j.value("attack_interval", a.basic.attack_interval);
    a.basic.anchor_period = j.value("anchor_period", a.basic.anchor_period);
    a.basic.epsilon_budget = j.value("epsilon_budget", a.basic.epsilon_budget);
    a.basic.region =
        region_policy_from_string(j.value("region", std::string("annotation")));
  } else {
    throw ConfigError("attack type must be 'basic' or 'spark': " + type);
  }
  return a;
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["master_seed"] = c.master_seed;
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  j["dump_perturbations"] = c.dump_perturbations;
  j["scenes"] = scene_to_json(c.scene);
  j["scenes"]["count"] = c.scene_count;
  ordered_json objs = ordered_json::array();
  for (ObjectiveKind o : c.objectives) objs.push_back(to_string(o));
  j["objectives"] = objs;
  ordered_json pairs = ordered_json::array();
  for (const KernelPair& p : c.kernel_pairs) {
    pairs.push_back(ordered_json::array({p.attacker, p.victim}));
  }
  j["kernel_pairs"] = pairs;
  ordered_json attacks = ordered_json::array();
  for (const AttackSpec& a : c.attacks) attacks.push_back(attack_to_json(a));
  j["attacks"] = attacks;
  return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig c;
  c.master_seed = j.value("master_seed", c.master_seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.workers = j.value("workers", c.workers);
  c.dump_perturbations = j.value("dump_perturbations", c.dump_perturbations);
  if (j.contains("scenes")) {
    c.scene = scene_from_json(j.at("scenes"));
    c.scene_count = j.at("scenes").value("count", c.scene_count);
  }
  if (j.contains("objectives")) {
    c.objectives.clear();
    for (const auto& o : j.at("objectives")) {
      c.objectives.push_back(objective_from_string(o.get<std::string>()));
    }
  }
  if (j.contains("kernel_pairs")) {
    c.kernel_pairs.clear();
    for (const auto& p : j.at("kernel_pairs")) {
      c.kernel_pairs.push_back(KernelPair{p.at(0).get<std::string>(),
                                          p.at(1).get<std::string>()});
    }
  }
  if (j.contains("attacks")) {
    for (const auto& a : j.at("attacks")) {
      c.attacks.push_back(attack_from_json(a));
    }
  }
  return c;
}

// --- per-cell persistence ----------------------------------------------

ordered_json record_to_json(const FrameRecord& r) {
  ordered_json j{{"frame", r.frame},
                 {"attacked", r.attacked},
                 {"flagged", r.flagged},
                 {"iterations", r.iterations},
                 {"objective", r.objective},
                 {"attack_success", r.attack_success},
                 {"cle_gt", r.cle_gt},
                 {"cle_clean", r.cle_clean},
                 {"dist_target", r.dist_target},
                 {"mean_abs_pert", r.mean_abs_pert},
                 {"pred", ordered_json::array(
                              {r.pred.cx, r.pred.cy, r.pred.w, r.pred.h})},
                 {"anchor", r.anchor},
                 {"buffer_len", r.buffer_len},
                 {"buffer_sum_err", r.buffer_sum_err},
                 {"increment_mean_abs", r.increment_mean_abs}};
  if (!r.loss_curve.empty()) j["loss_curve"] = r.loss_curve;
  return j;
}

FrameRecord record_from_json(const ordered_json& j) {
  FrameRecord r;
  r.frame = j.at("frame").get<int>();
  r.attacked = j.at("attacked").get<bool>();
  r.flagged = j.at("flagged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.objective = j.at("objective").get<double>();
  r.attack_success = j.at("attack_success").get<bool>();
  r.cle_gt = j.at("cle_gt").get<double>();
  r.cle_clean = j.at("cle_clean").get<double>();
  r.dist_target = j.at("dist_target").get<double>();
  r.mean_abs_pert = j.at("mean_abs_pert").get<double>();
  const auto& p = j.at("pred");
  r.pred = BBox{p.at(0).get<double>(), p.at(1).get<double>(),
                p.at(2).get<double>(), p.at(3).get<double>()};
  r.anchor = j.at("anchor").get<bool>();
  r.buffer_len = j.at("buffer_len").get<int>();
  r.buffer_sum_err = j.at("buffer_sum_err").get<double>();
  r.increment_mean_abs = j.at("increment_mean_abs").get<double>();
  if (j.contains("loss_curve")) {
    r.loss_curve = j.at("loss_curve").get<std::vector<double>>();
  }
  return r;
}

ordered_json metrics_to_json(const RunMetrics& m) {
  return ordered_json{{"precision_clean", m.precision_clean},
                      {"precision_attacked", m.precision_attacked},
                      {"prec_drop", m.prec_drop},
                      {"succ_rate", m.succ_rate},
                      {"map", m.map},
                      {"mean_iterations", m.mean_iterations}};
}

RunMetrics metrics_from_json(const ordered_json& j) {
  RunMetrics m;
  m.precision_clean = j.at("precision_clean").get<double>();
  m.precision_attacked = j.at("precision_attacked").get<double>();
  m.prec_drop = j.at("prec_drop").get<double>();
  m.succ_rate = j.at("succ_rate").get<double>();
  m.map = j.at("map").get<double>();
  m.mean_iterations = j.at("mean_iterations").get<double>();
  return m;
}

void write_cell_json(const CellResult& cell,
                     const std::filesystem::path& path) {
  ordered_json j;
  j["cell_id"] = cell.cell_id;
  j["attack"] = cell.attack;
  j["objective"] = cell.objective;
  j["attacker_kernel"] = cell.kernels.attacker;
  j["victim_kernel"] = cell.kernels.victim;
  ordered_json videos = ordered_json::array();
  for (std::size_t v = 0; v < cell.per_video.size(); ++v) {
    ordered_json jv;
    jv["video"] = v;
    jv["seed"] = cell.runs[v].seed;
    jv["metrics"] = metrics_to_json(cell.per_video[v]);
    ordered_json frames = ordered_json::array();
    for (const FrameRecord& r : cell.runs[v].frames) {
      frames.push_back(record_to_json(r));
    }
    jv["frames"] = frames;
    videos.push_back(std::move(jv));
  }
  j["videos"] = videos;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

CellResult load_cell_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  ordered_json j;
  in >> j;
  CellResult cell;
  cell.cell_id = j.at("cell_id").get<std::string>();
  cell.attack = j.at("attack").get<std::string>();
  cell.objective = j.at("objective").get<std::string>();
  cell.kernels.attacker = j.at("attacker_kernel").get<std::string>();
  cell.kernels.victim = j.at("victim_kernel").get<std::string>();
  for (const auto& jv : j.at("videos")) {
    cell.per_video.push_back(metrics_from_json(jv.at("metrics")));
    AttackRun run;
    run.attack_name = cell.attack;
    run.attacker_kernel = cell.kernels.attacker;
    run.victim_kernel = cell.kernels.victim;
    run.seed = jv.at("seed").get<std::uint64_t>();
    for (const auto& jr : jv.at("frames")) {
      run.frames.push_back(record_from_json(jr));
      run.preds.push_back(run.frames.back().pred);
    }
    cell.runs.push_back(std::move(run));
  }
  return cell;
}

void write_frames_csv(const CellResult& cell,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "video,frame,attacked,flagged,iterations,objective,attack_success,"
         "cle_gt,cle_clean,dist_target,mean_abs_pert,anchor,buffer_len,"
         "buffer_sum_err,increment_mean_abs\n";
  for (std::size_t v = 0; v < cell.runs.size(); ++v) {
    for (const FrameRecord& r : cell.runs[v].frames) {
      out << v << "," << r.frame << "," << (r.attacked ? 1 : 0) << ","
          << (r.flagged ? 1 : 0) << "," << r.iterations << ","
          << fmt(r.objective) << "," << (r.attack_success ? 1 : 0) << ","
          << fmt(r.cle_gt) << "," << fmt(r.cle_clean) << ","
          << fmt(r.dist_target) << "," << fmt(r.mean_abs_pert) << ","
          << (r.anchor ? 1 : 0) << "," << r.buffer_len << ","
          << fmt(r.buffer_sum_err) << "," << fmt(r.increment_mean_abs)
          << "\n";
    }
  }
}

// --- clean baseline runs -----------------------------------------------

AttackRun clean_run(const Video& video, const std::vector<Point>& trajectory,
                    const FeatureKernel& kernel) {
  CleanReference ref(
      init_tracker(video.frames.front(), video.gt.front(), kernel));
  AttackRun run;
  run.attack_name = "none";
  run.attacker_kernel = kernel.name();
  run.victim_kernel = kernel.name();
  const int predicted = static_cast<int>(video.frames.size()) - 1;
  for (int t = 1; t <= predicted; ++t) {
    ref.advance(video.frames[static_cast<std::size_t>(t)]);
    FrameRecord rec;
    rec.frame = t;
    rec.pred = ref.clean_box;
    rec.cle_gt = cle(ref.clean_box, video.gt[static_cast<std::size_t>(t)]);
    rec.cle_clean = 0.0;
    rec.dist_target =
        distance(center(ref.clean_box), trajectory[static_cast<std::size_t>(t)]);
    run.frames.push_back(std::move(rec));
    run.preds.push_back(ref.clean_box);
    run.clean_preds.push_back(ref.clean_box);
  }
  return run;
}

struct CellSpec {
  std::string id;
  int attack_index = -1;  // -1 for clean baseline cells
  std::string attack_name = "none";
  ObjectiveKind objective = ObjectiveKind::ta;
  bool has_objective = false;
  KernelPair kernels;
};

std::vector<CellSpec> build_cells(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  // Clean baselines: one per distinct victim kernel, in first-use order.
  std::vector<std::string> seen;
  for (const KernelPair& pair : config.kernel_pairs) {
    if (std::find(seen.begin(), seen.end(), pair.victim) != seen.end()) {
      continue;
    }
    seen.push_back(pair.victim);
    CellSpec spec;
    spec.kernels = KernelPair{pair.victim, pair.victim};
    spec.id = cell_id("none", "", spec.kernels);
    cells.push_back(std::move(spec));
  }
  for (std::size_t a = 0; a < config.attacks.size(); ++a) {
    for (ObjectiveKind obj : config.objectives) {
      for (const KernelPair& pair : config.kernel_pairs) {
        CellSpec spec;
        spec.attack_index = static_cast<int>(a);
        spec.attack_name = config.attacks[a].name;
        spec.objective = obj;
        spec.has_objective = true;
        spec.kernels = pair;
        spec.id = cell_id(spec.attack_name, to_string(obj), pair);
        cells.push_back(std::move(spec));
      }
    }
  }
  return cells;
}

}  // namespace

ExperimentConfig config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("malformed config JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

void config_to_json_file(const ExperimentConfig& config,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << config_to_json(config).dump(2) << "\n";
}

std::string cell_id(const std::string& attack, const std::string& objective,
                    const KernelPair& kernels) {
  std::string id = attack;
  id += "__";
  id += objective.empty() ? "clean" : objective;
  id += "__";
  id += kernels.attacker;
  id += "-";
  id += kernels.victim;
  return sanitize(id);
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  out << "attack,objective,attacker_kernel,victim_kernel,org_prec,"
         "prec_attacked,prec_drop,succ_rate,map,mean_iters\n";
  for (const ResultRow& r : rows) {
    out << r.attack << "," << r.objective << "," << r.attacker_kernel << ","
        << r.victim_kernel << "," << fmt(r.org_prec) << ","
        << fmt(r.prec_attacked) << "," << fmt(r.prec_drop) << ","
        << (r.has_succ ? fmt(r.succ) : std::string()) << "," << fmt(r.map)
        << "," << fmt(r.mean_iters) << "\n";
  }
  return out.str();
}

SuiteResult run_suite(const ExperimentConfig& config) {
  if (config.objectives.empty()) {
    throw ConfigError("run_suite: at least one objective required");
  }
  if (config.kernel_pairs.empty()) {
    throw ConfigError("run_suite: at least one kernel pair required");
  }

  const std::filesystem::path out_dir(config.out_dir);
  const std::filesystem::path cells_dir = out_dir / "cells";
  std::filesystem::create_directories(cells_dir);

  // Scene suite: load when present, otherwise generate and persist.
  const std::filesystem::path scenes_dir = out_dir / "scenes";
  SceneSuite suite;
  if (std::filesystem::exists(scenes_dir / "manifest.json")) {
    suite = load_suite(scenes_dir);
  } else {
    suite = make_suite(config.scene_count, config.scene, config.master_seed);
    save_suite(suite, scenes_dir);
  }
  const int videos = static_cast<int>(suite.scenes.size());

  const std::vector<CellSpec> specs = build_cells(config);
  std::vector<CellResult> cells(specs.size());
  std::vector<bool> loaded(specs.size(), false);

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto path = cells_dir / specs[i].id / "metrics.json";
    if (std::filesystem::exists(path)) {
      cells[i] = load_cell_json(path);
      loaded[i] = true;
    } else {
      cells[i].cell_id = specs[i].id;
      cells[i].attack = specs[i].attack_name;
      cells[i].objective =
          specs[i].has_objective ? to_string(specs[i].objective) : "";
      cells[i].kernels = specs[i].kernels;
      cells[i].per_video.resize(static_cast<std::size_t>(videos));
      cells[i].runs.resize(static_cast<std::size_t>(videos));
    }
  }

  // Task list over (cell, video); each task writes only its own slot.
  struct Task {
    std::size_t cell;
    int video;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (loaded[i]) continue;
    for (int v = 0; v < videos; ++v) tasks.push_back(Task{i, v});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task task = tasks[k];
      const CellSpec& spec = specs[task.cell];
      const Scene& scene = suite.scenes[static_cast<std::size_t>(task.video)];
      const std::uint64_t seed = derive_seed(
          config.master_seed, static_cast<std::uint64_t>(task.video),
          fnv1a(spec.attack_name),
          fnv1a(spec.has_objective ? to_string(spec.objective) : "clean"),
          fnv1a(spec.kernels.attacker + "|" + spec.kernels.victim));
      const bool record_perts =
          config.dump_perturbations && task.video == 0 && spec.attack_index >= 0;

      AttackRun run;
      if (spec.attack_index < 0) {
        run = clean_run(scene.video, scene.trajectory,
                        FeatureKernel::from_name(spec.kernels.victim));
      } else {
        const AttackSpec& attack =
            config.attacks[static_cast<std::size_t>(spec.attack_index)];
        const FeatureKernel atk =
            FeatureKernel::from_name(spec.kernels.attacker);
        const FeatureKernel vic = FeatureKernel::from_name(spec.kernels.victim);
        if (attack.is_spark) {
          run = run_spark(scene.video, scene.trajectory, atk, vic,
                          spec.objective, attack.spark, record_perts);
          run.attack_name = attack.name;
        } else {
          BasicAttackConfig basic = attack.basic;
          basic.seed = seed;
          run = schedule_attack(scene.video, scene.trajectory, atk, vic,
                                spec.objective, basic, record_perts);
          run.attack_name = attack.name;
        }
      }
      run.seed = seed;
      CellResult& cell = cells[task.cell];
      cell.per_video[static_cast<std::size_t>(task.video)] =
          compute_run_metrics(run, scene.video.gt, scene.trajectory);
      cell.runs[static_cast<std::size_t>(task.video)] = std::move(run);
    }
  };

  int nworkers = config.workers > 0
                     ? config.workers
                     : static_cast<int>(std::thread::hardware_concurrency());
  nworkers = std::max(1, std::min<int>(nworkers,
                                       static_cast<int>(tasks.size()) + 1));
  std::vector<std::thread> pool;
  for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  // Persist freshly computed cells (single-threaded, canonical order).
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (loaded[i]) continue;
    const auto dir = cells_dir / specs[i].id;
    std::filesystem::create_directories(dir);
    write_cell_json(cells[i], dir / "metrics.json");
    write_frames_csv(cells[i], dir / "frames.csv");
    if (config.dump_perturbations && !cells[i].runs.empty() &&
        !cells[i].runs[0].pert_dumps.empty()) {
      const auto pdir = dir / "perturbations";
      std::filesystem::create_directories(pdir);
      const Video& video0 = suite.scenes[0].video;
      const auto& dumps = cells[i].runs[0].pert_dumps;
      for (std::size_t t = 0; t < dumps.size(); ++t) {
        char name[48];
        std::snprintf(name, sizeof(name), "e_%04zu.grid", t + 1);
        save_grid(dumps[t], pdir / name);
        std::snprintf(name, sizeof(name), "heat_%04zu.ppm", t + 1);
        save_ppm(visualize_perturbation(dumps[t]), pdir / name);
        std::snprintf(name, sizeof(name), "adv_%04zu.ppm", t + 1);
        save_ppm(apply(video0.frames[t + 1], dumps[t]), pdir / name);
      }
    }
  }

  // Reduce to the suite table.
  SuiteResult result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CellResult& cell = cells[i];
    ResultRow row;
    row.attack = cell.attack;
    row.objective = cell.objective;
    row.attacker_kernel = cell.kernels.attacker;
    row.victim_kernel = cell.kernels.victim;
    row.has_succ = cell.objective == "ta";
    const double n = static_cast<double>(cell.per_video.size());
    for (const RunMetrics& m : cell.per_video) {
      row.org_prec += m.precision_clean / n;
      row.prec_attacked += m.precision_attacked / n;
      row.prec_drop += m.prec_drop / n;
      row.succ += m.succ_rate / n;
      row.map += m.map / n;
      row.mean_iters += m.mean_iterations / n;
    }
    if (specs[i].attack_index < 0) {
      // Clean rows: the "attacked" run is the clean run itself.
      row.prec_drop = 0.0;
      row.has_succ = false;
    }
    result.table.rows.push_back(row);
  }
  result.cells = std::move(cells);

  // Suite-level outputs.
  {
    std::ofstream out(out_dir / "table.csv");
    if (!out) throw IoError("cannot write table.csv");
    out << result.table.to_csv();
  }
  {
    std::ofstream out(out_dir / "videos.csv");
    if (!out) throw IoError("cannot write videos.csv");
    out << "attack,objective,attacker_kernel,victim_kernel,video,"
           "precision_clean,precision_attacked,prec_drop,succ_rate,map,"
           "mean_iters\n";
    for (const CellResult& cell : result.cells) {
      for (std::size_t v = 0; v < cell.per_video.size(); ++v) {
        const RunMetrics& m = cell.per_video[v];
        out << cell.attack << "," << cell.objective << ","
            << cell.kernels.attacker << "," << cell.kernels.victim << "," << v
            << "," << fmt(m.precision_clean) << ","
            << fmt(m.precision_attacked) << "," << fmt(m.prec_drop) << ","
            << fmt(m.succ_rate) << "," << fmt(m.map) << ","
            << fmt(m.mean_iterations) << "\n";
      }
    }
  }
  {
    ordered_json summary;
    summary["config"] = config_to_json(config);
    ordered_json rows = ordered_json::array();
    for (const ResultRow& r : result.table.rows) {
      rows.push_back(ordered_json{{"attack", r.attack},
                                  {"objective", r.objective},
                                  {"attacker_kernel", r.attacker_kernel},
                                  {"victim_kernel", r.victim_kernel},
                                  {"org_prec", r.org_prec},
                                  {"prec_attacked", r.prec_attacked},
                                  {"prec_drop", r.prec_drop},
                                  {"succ_rate", r.has_succ ? ordered_json(r.succ)
                                                           : ordered_json()},
                                  {"map", r.map},
                                  {"mean_iters", r.mean_iters}});
    }
    summary["rows"] = rows;
    std::ofstream out(out_dir / "summary.json");
    if (!out) throw IoError("cannot write summary.json");
    out << summary.dump(2) << "\n";
  }
  return result;
}

ResultTable report(const ExperimentConfig& config) {
  const std::filesystem::path out_dir(config.out_dir);
  const std::filesystem::path cells_dir = out_dir / "cells";
  if (!std::filesystem::exists(cells_dir)) {
    throw IoError("report: no cells directory under " + out_dir.string());
  }
  const SuiteResult result = run_suite(config);  // loads persisted cells
  for (const CellResult& cell : result.cells) {
    write_plots(cells_dir / cell.cell_id);
  }
  return result.table;
}

// --- plots ---------------------------------------------------------------

namespace {

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct FrameSeries {
  std::vector<double> dist_target;
  std::vector<double> mean_abs_pert;
};

// Reads the per-frame series of one video back from the cell's frames.csv.
FrameSeries read_series(const std::filesystem::path& frames_csv, int video) {
  std::ifstream in(frames_csv);
  if (!in) throw IoError("cannot read " + frames_csv.string());
  FrameSeries series;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 11) continue;
    if (std::stoi(fields[0]) != video) continue;
    series.dist_target.push_back(std::stod(fields[9]));
    series.mean_abs_pert.push_back(std::stod(fields[10]));
  }
  return series;
}

}  // namespace

std::string svg_line_chart(const std::string& title,
                           const std::vector<double>& series, int width,
                           int height) {
  if (series.empty()) {
    throw LengthMismatchError("svg_line_chart: empty series");
  }
  double lo = series.front(), hi = series.front();
  for (double v : series) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;

  const double margin = 30.0;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\" stroke=\"none\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"18\" font-size=\"12\">" << title
      << "</text>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << height - 8
      << "\" font-size=\"10\">min=" << fmt_coord(lo) << " max=" << fmt_coord(hi)
      << " n=" << series.size() << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
  const double dx =
      series.size() > 1 ? plot_w / static_cast<double>(series.size() - 1) : 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x = margin + dx * static_cast<double>(i);
    const double y = margin + plot_h * (1.0 - (series[i] - lo) / (hi - lo));
    if (i) svg << " ";
    svg << fmt_coord(x) << "," << fmt_coord(y);
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

void write_plots(const std::filesystem::path& cell_dir) {
  const auto frames_csv = cell_dir / "frames.csv";
  if (!std::filesystem::exists(frames_csv)) {
    throw IoError("write_plots: missing " + frames_csv.string());
  }
  const auto plots_dir = cell_dir / "plots";
  std::filesystem::create_directories(plots_dir);

  const FrameSeries series = read_series(frames_csv, 0);
  if (!series.dist_target.empty()) {
    std::ofstream out(plots_dir / "video000_dist_target.svg");
    out << svg_line_chart("distance to target vs frame", series.dist_target);
  }
  if (!series.mean_abs_pert.empty()) {
    std::ofstream out(plots_dir / "video000_mean_abs_pert.svg");
    out << svg_line_chart("mean |E| vs frame", series.mean_abs_pert);
  }

  // Loss-vs-iteration curves for up to three frames of video 0.
  const auto metrics_path = cell_dir / "metrics.json";
  if (std::filesystem::exists(metrics_path)) {
    const CellResult cell = load_cell_json(metrics_path);
    if (!cell.runs.empty()) {
      int emitted = 0;
      for (const FrameRecord& rec : cell.runs[0].frames) {
        if (rec.loss_curve.size() < 2) continue;
        char name[48];
        std::snprintf(name, sizeof(name), "video000_loss_frame%03d.svg",
                      rec.frame);
        std::ofstream out(plots_dir / name);
        out << svg_line_chart("objective vs iteration", rec.loss_curve);
        if (++emitted >= 3) break;
      }
    }
  }
}

}  // namespace trackadv
