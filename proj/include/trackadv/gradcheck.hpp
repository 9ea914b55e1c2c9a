#pragma once

#include <cstdint>
#include <string>

namespace trackadv {

/// Results of checking analytic gradients against central finite
/// differences on randomized regions, per objective and for the
/// group-sparsity term.
struct GradCheckReport {
  double max_rel_err_ua = 0.0;
  double max_rel_err_ta = 0.0;
  double max_rel_err_l21 = 0.0;
  int trials = 0;
  double seconds = 0.0;

  double worst() const;
  bool pass(double threshold = 1e-4) const { return worst() < threshold; }
  std::string summary() const;
};

/// Runs `trials_per_kernel` randomized trials for each feature kernel and
/// each objective, probing a sample of pixel coordinates per trial with
/// central differences (h = 1e-3).
GradCheckReport run_gradient_checks(int trials_per_kernel = 6,
                                    std::uint64_t seed = 20240101);

}  // namespace trackadv
