#include "trackadv/metrics.hpp"

#include "trackadv/errors.hpp"

namespace trackadv {

double precision(const std::vector<BBox>& preds,
                 const std::vector<BBox>& annotations, double threshold) {
  if (preds.size() != annotations.size()) {
    throw LengthMismatchError("precision: prediction/annotation mismatch");
  }
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (cle(preds[i], annotations[i]) < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double succ_rate(const std::vector<BBox>& preds,
                 const std::vector<Point>& targets, double threshold) {
  if (preds.size() != targets.size()) {
    throw LengthMismatchError("succ_rate: prediction/target mismatch");
  }
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (distance(center(preds[i]), targets[i]) < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double map_suite(const std::vector<std::vector<Perturbation>>& runs) {
  if (runs.empty()) return 0.0;
  double video_acc = 0.0;
  for (const auto& frames : runs) {
    double frame_acc = 0.0;
    for (const Perturbation& pert : frames) frame_acc += mean_abs(pert);
    video_acc += frames.empty()
                     ? 0.0
                     : frame_acc / static_cast<double>(frames.size());
  }
  return video_acc / static_cast<double>(runs.size());
}

RunMetrics compute_run_metrics(const AttackRun& run,
                               const std::vector<BBox>& annotations,
                               const std::vector<Point>& targets,
                               double threshold) {
  RunMetrics m;
  const std::size_t n = run.preds.size();
  if (n == 0) return m;
  if (annotations.size() < n + 1 || targets.size() < n + 1) {
    throw LengthMismatchError("compute_run_metrics: annotation/target length");
  }

  // Predictions cover frames 1..n; frame 0 is the template frame.
  const std::vector<BBox> annos(annotations.begin() + 1,
                                annotations.begin() + 1 + n);
  const std::vector<Point> tgts(targets.begin() + 1, targets.begin() + 1 + n);

  m.precision_attacked = precision(run.preds, annos, threshold);
  m.precision_clean = precision(run.clean_preds, annos, threshold);
  m.prec_drop = m.precision_clean - m.precision_attacked;
  m.succ_rate = succ_rate(run.preds, tgts, threshold);

  double pert_acc = 0.0;
  double iter_acc = 0.0;
  for (const FrameRecord& rec : run.frames) {
    pert_acc += rec.mean_abs_pert;
    iter_acc += rec.iterations;
  }
  m.map = pert_acc / static_cast<double>(run.frames.size());
  m.mean_iterations = iter_acc / static_cast<double>(run.frames.size());
  return m;
}

}  // namespace trackadv
