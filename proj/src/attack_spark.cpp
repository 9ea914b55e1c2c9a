#include "trackadv/attack_spark.hpp"

#include <algorithm>
#include <cmath>

#include "online_session.hpp"
#include "trackadv/errors.hpp"
#include "trackadv/rng.hpp"

namespace trackadv {

namespace {

// Row norms below this count as the kink of the L2,1 norm.
constexpr double kRowNormFloor = 1e-12;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_columns(const std::vector<const Grid*>& columns) {
  if (columns.empty()) {
    throw LengthMismatchError("l21: empty column list");
  }
  for (const Grid* g : columns) {
    if (!g->same_shape(*columns.front())) {
      throw ShapeMismatchError("l21: column shapes differ");
    }
  }
}

std::vector<const Grid*> buffer_columns(const IncrementBuffer& buffer) {
  std::vector<const Grid*> cols;
  cols.reserve(buffer.size());
  for (const Grid& g : buffer.increments()) cols.push_back(&g);
  return cols;
}

}  // namespace

std::string to_string(SparkVariant v) {
  switch (v) {
    case SparkVariant::standard: return "standard";
    case SparkVariant::no_template: return "no_template";
    case SparkVariant::no_victim_box: return "no_victim_box";
  }
  return "standard";
}

SparkVariant spark_variant_from_string(const std::string& s) {
  if (s == "standard") return SparkVariant::standard;
  if (s == "no_template") return SparkVariant::no_template;
  if (s == "no_victim_box") return SparkVariant::no_victim_box;
  throw ConfigError("unknown spark variant: " + s);
}

void IncrementBuffer::reset(int anchor_frame, int h, int w, int c) {
  increments_.clear();
  total_ = Grid(h, w, c);
  anchor_frame_ = anchor_frame;
}

void IncrementBuffer::push(Perturbation increment) {
  if (total_.empty()) {
    total_ = Grid(increment.h, increment.w, increment.c);
  }
  if (!increment.same_shape(total_)) {
    throw ShapeMismatchError("IncrementBuffer::push: shape mismatch");
  }
  add_in_place(total_, increment);
  increments_.push_back(std::move(increment));
}

Grid IncrementBuffer::recomputed_total() const {
  Grid sum = total_.empty() ? Grid() : Grid(total_.h, total_.w, total_.c);
  for (const Perturbation& inc : increments_) add_in_place(sum, inc);
  return sum;
}

double l21_norm(const std::vector<const Grid*>& columns) {
  check_columns(columns);
  const std::size_t n = columns.front()->data.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row2 = 0.0;
    for (const Grid* g : columns) {
      const double v = g->data[i];
      row2 += v * v;
    }
    acc += std::sqrt(row2);
  }
  return acc;
}

double l21_norm(const IncrementBuffer& buffer) {
  return l21_norm(buffer_columns(buffer));
}

Grid l21_subgradient(const std::vector<const Grid*>& columns) {
  check_columns(columns);
  const Grid& newest = *columns.back();
  Grid grad(newest.h, newest.w, newest.c);
  for (std::size_t i = 0; i < newest.data.size(); ++i) {
    double row2 = 0.0;
    for (const Grid* g : columns) {
      const double v = g->data[i];
      row2 += v * v;
    }
    const double norm = std::sqrt(row2);
    grad.data[i] = norm > kRowNormFloor ? newest.data[i] / norm : 0.0;
  }
  return grad;
}

Grid l21_subgradient(const IncrementBuffer& buffer) {
  return l21_subgradient(buffer_columns(buffer));
}

FrameAttackResult spark_frame(const Frame& region_clean, const IntRect& rect,
                              int frame_h, int frame_w, int frame_number,
                              const RegionObjective& objective,
                              IncrementBuffer& buffer,
                              const SparkConfig& config) {
  const int channels = region_clean.c;
  const bool anchor =
      (frame_number - buffer.anchor_frame()) % config.reset_interval == 0 ||
      buffer.size() == 0;
  if (anchor) {
    buffer.reset(frame_number, frame_h, frame_w, channels);
  }
  const int budget = anchor ? config.iters_anchor : config.iters_between;

  // Region-coordinate views of the round history.
  const Grid hist = crop(buffer.total(), rect, PadMode::zero);
  std::vector<Grid> hist_cols;
  hist_cols.reserve(buffer.size());
  for (const Perturbation& inc : buffer.increments()) {
    hist_cols.push_back(crop(inc, rect, PadMode::zero));
  }

  FrameAttackResult out;
  Grid eps(rect.h, rect.w, channels);

  ObjectiveSample s = objective(add(region_clean, hist));
  if (s.status != ObjectiveStatus::ok) {
    out.flagged = true;
    out.final_objective = s.value;
    out.perturbation = hist;
    if (anchor) buffer.push(Grid(frame_h, frame_w, channels));
    return out;
  }

  std::vector<const Grid*> gamma;
  gamma.reserve(hist_cols.size() + 1);
  for (const Grid& g : hist_cols) gamma.push_back(&g);
  gamma.push_back(&eps);

  int used = 0;
  while (used < budget && s.status == ObjectiveStatus::ok && s.value >= 0.0) {
    if (!all_finite(s.grad)) {
      out.flagged = true;
      break;
    }
    const Grid reg = l21_subgradient(gamma);
    for (std::size_t i = 0; i < eps.data.size(); ++i) {
      eps.data[i] -=
          config.step * sign_of(s.grad.data[i] + config.lambda * reg.data[i]);
    }
    ++used;
    Grid perturbed = add(region_clean, hist);
    add_in_place(perturbed, eps);
    s = objective(perturbed);
    out.loss_curve.push_back(s.value);
  }

  // Clip the running total (not the raw step) to the budget and the valid
  // pixel range, then store the post-clip delta so the buffer sum stays
  // exactly equal to the live perturbation.
  Grid total = add(hist, eps);
  for (std::size_t i = 0; i < total.data.size(); ++i) {
    const double px = region_clean.data[i];
    const double lo = std::max(-config.epsilon_budget, -px);
    const double hi = std::min(config.epsilon_budget, 255.0 - px);
    total.data[i] = std::clamp(total.data[i], lo, hi);
  }

  const Grid new_e = embed(frame_h, frame_w, channels, rect, total);
  buffer.push(sub(new_e, buffer.total()));

  out.perturbation = std::move(total);
  out.iterations = used;
  out.final_objective = s.value;
  out.succeeded = s.status == ObjectiveStatus::ok && s.value < 0.0;
  out.flagged = out.flagged || s.status != ObjectiveStatus::ok;
  return out;
}

AttackRun run_spark(const Video& video, const std::vector<Point>& trajectory,
                    const FeatureKernel& attacker_kernel,
                    const FeatureKernel& victim_kernel,
                    ObjectiveKind objective, const SparkConfig& config,
                    bool record_perturbations) {
  detail::SessionOptions options;
  options.objective = objective;
  options.template_from_detector = config.variant == SparkVariant::no_template;
  options.region_center = config.variant == SparkVariant::no_victim_box
                              ? detail::RegionCenter::attacker_prev
                              : detail::RegionCenter::victim_prev;
  options.record_perturbations = record_perturbations;
  detail::OnlineSession session(video, trajectory, attacker_kernel,
                                victim_kernel, options);

  const int frame_h = video.frames.front().h;
  const int frame_w = video.frames.front().w;
  const int channels = video.frames.front().c;

  IncrementBuffer buffer(frame_h, frame_w, channels);

  for (int t = 1; t <= session.predicted_frames(); ++t) {
    auto setup = session.begin_frame(t);

    const bool is_anchor =
        (t - buffer.anchor_frame()) % config.reset_interval == 0 ||
        buffer.size() == 0;

    RegionObjective objective_fn = setup.objective;
    if (!setup.attackable) {
      // Keeps the round schedule (anchor resets) intact on frames the
      // region ladder could not make attackable.
      objective_fn = [](const Grid&) {
        ObjectiveSample s;
        s.status = ObjectiveStatus::no_disjoint_candidate;
        return s;
      };
    }
    const std::size_t pushes_before = is_anchor ? 0 : buffer.size();
    const FrameAttackResult result =
        spark_frame(setup.region.pixels, setup.region.rect, frame_h, frame_w,
                    t, objective_fn, buffer, config);

    session.finish_frame(setup, buffer.total(),
                         mean_abs(result.perturbation), result);

    FrameRecord& rec = session.last_record();
    rec.anchor = is_anchor;
    rec.buffer_len = static_cast<int>(buffer.size());
    rec.loss_curve = result.loss_curve;
    if (buffer.size() > pushes_before) {
      rec.increment_mean_abs = mean_abs(buffer.increments().back());
    }
    rec.buffer_sum_err = max_abs(sub(buffer.recomputed_total(), buffer.total()));
  }

  std::string name = "spark";
  if (config.variant != SparkVariant::standard) {
    name += "_" + to_string(config.variant);
  }
  return session.take_run(std::move(name), 0);
}

}  // namespace trackadv
