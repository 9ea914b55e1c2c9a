#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "trackadv/gradcheck.hpp"
#include "trackadv/harness.hpp"

namespace {

int cmd_gen(const std::string& out_dir, std::uint64_t seed, int count) {
  trackadv::SceneConfig base;
  const trackadv::SceneSuite suite = trackadv::make_suite(count, base, seed);
  trackadv::save_suite(suite, out_dir);
  std::printf("wrote %d scenes to %s\n", count, out_dir.c_str());
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::int64_t seed_override, int workers_override,
            bool dump_perturbations) {
  trackadv::ExperimentConfig config =
      trackadv::config_from_json_file(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  if (seed_override >= 0) {
    config.master_seed = static_cast<std::uint64_t>(seed_override);
  }
  if (workers_override > 0) config.workers = workers_override;
  if (dump_perturbations) config.dump_perturbations = true;

  const trackadv::SuiteResult result = trackadv::run_suite(config);
  std::printf("%s", result.table.to_csv().c_str());
  std::printf("results under %s\n", config.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& config_path, const std::string& out_override) {
  trackadv::ExperimentConfig config =
      trackadv::config_from_json_file(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  const trackadv::ResultTable table = trackadv::report(config);
  std::printf("%s", table.to_csv().c_str());
  return 0;
}

int cmd_gradcheck(int trials, std::uint64_t seed) {
  const trackadv::GradCheckReport report =
      trackadv::run_gradient_checks(trials, seed);
  std::printf("gradcheck %s\n", report.summary().c_str());
  std::printf("max relative error: %.3e (threshold 1e-4)\n", report.worst());
  if (!report.pass()) {
    std::printf("FAIL\n");
    return 1;
  }
  std::printf("PASS\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial-attack laboratory for online visual tracking"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic scene suite");
  std::string gen_out = "scenes";
  std::uint64_t gen_seed = 424242;
  int gen_count = 20;
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--count", gen_count, "number of scenes");

  // run
  auto* run = app.add_subcommand("run", "execute an experiment config");
  std::string run_config;
  std::string run_out;
  std::int64_t run_seed = -1;
  int run_workers = 0;
  bool run_dump = false;
  run->add_option("--config", run_config, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "override output directory");
  run->add_option("--seed", run_seed, "override master seed");
  run->add_option("--workers", run_workers, "worker thread count");
  run->add_flag("--dump-perturbations", run_dump,
                "dump per-frame perturbation grids and heatmaps for video 0");

  // report
  auto* rep = app.add_subcommand("report", "rebuild tables and plots");
  std::string rep_config;
  std::string rep_out;
  rep->add_option("--config", rep_config, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--out", rep_out, "override output directory");

  // gradcheck
  auto* gc = app.add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  int gc_trials = 6;
  std::uint64_t gc_seed = 20240101;
  gc->add_option("--trials", gc_trials, "trials per feature kernel");
  gc->add_option("--seed", gc_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_out, gen_seed, gen_count);
    if (run->parsed()) {
      return cmd_run(run_config, run_out, run_seed, run_workers, run_dump);
    }
    if (rep->parsed()) return cmd_report(rep_config, rep_out);
    if (gc->parsed()) return cmd_gradcheck(gc_trials, gc_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
