#include "chl/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chl {

namespace {

/// Smallest j with 2^j >= v, for v > 0. The float log2 estimate is verified
/// and adjusted with exact ldexp comparisons.
std::int32_t ceil_log2(double v) {
  int j = static_cast<int>(std::ceil(std::log2(v)));
  while (std::ldexp(1.0, j - 1) >= v) --j;
  while (std::ldexp(1.0, j) < v) ++j;
  return j;
}

}  // namespace

ScaleBounds scale_bounds(std::uint64_t n, double horizon) {
  if (n == 0) throw std::invalid_argument("scale_bounds: n must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("scale_bounds: horizon must be > 0");
  ScaleBounds bounds;
  bounds.j_min = ceil_log2(std::sqrt(1.0 / static_cast<double>(n)));
  const double target = std::sqrt(horizon * std::log(static_cast<double>(n)));
  bounds.j_max = target > 0.0 ? std::max(ceil_log2(target), bounds.j_min)
                              : bounds.j_min;
  return bounds;
}

std::int32_t dyadic_index(double distance, const ScaleBounds& bounds) {
  if (!(distance > 0.0)) {
    throw std::invalid_argument("dyadic_index: distance must be positive");
  }
  if (distance <= std::ldexp(1.0, bounds.j_min)) return kScaleMin;
  const std::int32_t j = std::ilogb(distance);  // exact floor(log2 d)
  return j > bounds.j_max ? kScaleOver : j;
}

std::int32_t dyadic_index(double distance, std::uint64_t n, double horizon) {
  return dyadic_index(distance, scale_bounds(n, horizon));
}

// ---------------------------------------------------------------------------
// DyadicLedger
// ---------------------------------------------------------------------------

DyadicLedger::DyadicLedger(ScaleBounds bounds) : bounds_(bounds) {
  const std::size_t width =
      static_cast<std::size_t>(bounds_.j_max - bounds_.j_min) + 1;
  delta_.resize(width);
  counts_.resize(width, 0);
}

std::size_t DyadicLedger::slot(std::int32_t j) const {
  if (j < bounds_.j_min || j > bounds_.j_max) {
    throw std::invalid_argument("DyadicLedger: scale outside [j_min, j_max]");
  }
  return static_cast<std::size_t>(j - bounds_.j_min);
}

void DyadicLedger::add(std::int32_t scale, double push) {
  if (scale == kScaleMin) {
    delta_min_.add(push);
    ++count_min_;
  } else if (scale == kScaleOver) {
    delta_over_.add(push);
    ++count_over_;
  } else {
    const std::size_t i = slot(scale);
    delta_[i].add(push);
    ++counts_[i];
  }
}

void DyadicLedger::reset() {
  for (auto& d : delta_) d = KahanSum{};
  std::fill(counts_.begin(), counts_.end(), 0);
  delta_min_ = KahanSum{};
  delta_over_ = KahanSum{};
  count_min_ = 0;
  count_over_ = 0;
}

double DyadicLedger::delta(std::int32_t j) const { return delta_[slot(j)].value(); }

std::uint64_t DyadicLedger::count(std::int32_t j) const { return counts_[slot(j)]; }

double DyadicLedger::total() const {
  KahanSum sum;
  sum.add(delta_min_.value());
  for (const auto& d : delta_) sum.add(d.value());
  sum.add(delta_over_.value());
  return sum.value();
}

// ---------------------------------------------------------------------------
// GrowthState
// ---------------------------------------------------------------------------

GrowthState::GrowthState(std::uint64_t n, std::uint64_t seed, double horizon)
    : n_(n), bounds_(scale_bounds(n, horizon)),
      right_ledger_(bounds_), left_ledger_(bounds_), rng_(seed) {
  if (n == 0) throw std::invalid_argument("GrowthState: n must be >= 1");
  const double h = std::sqrt(1.0 / static_cast<double>(n));
  left_ = right_ = h;  // particle 1 at the origin
  lambda_ = left_ + right_;
  min_bucket_edge_ = std::ldexp(1.0, bounds_.j_min);
}

StepRecord GrowthState::step() {
  double u = rng_.uniform();
  if (mirrored_) u = 1.0 - u;  // exact: both are multiples of 2^-53 below 1

  // x = -L + lambda*u, evaluated so that the map (u, L, R) -> x is exactly
  // odd under (u, L, R) -> (1-u, R, L). Each branch is a single fused
  // rounding, and rounding commutes with negation.
  double x;
  if (u < 0.5) {
    x = std::fma(lambda_, u, -left_);
  } else if (u > 0.5) {
    x = std::fma(-lambda_, 1.0 - u, right_);
  } else {
    x = (right_ - left_) * 0.5;
  }

  const double dist_right = right_ - x;
  const double dist_left = left_ + x;

  StepRecord rec;
  rec.x = x;
  rec.scale_right = dist_right <= min_bucket_edge_ ? kScaleMin
                                                   : dyadic_index(dist_right, bounds_);
  rec.scale_left = dist_left <= min_bucket_edge_ ? kScaleMin
                                                 : dyadic_index(dist_left, bounds_);

  const Endpoints next = endpoint_update(left_, right_, x, n_);
  rec.push_right = next.right - right_;
  rec.push_left = next.left - left_;

  right_ledger_.add(rec.scale_right, rec.push_right);
  left_ledger_.add(rec.scale_left, rec.push_left);

  left_ = next.left;
  right_ = next.right;
  lambda_ = left_ + right_;
  ++k_;
  return rec;
}

// ---------------------------------------------------------------------------
// Runs and traces
// ---------------------------------------------------------------------------

Trace run_growth(const GrowthRunParams& params) {
  if (params.steps == 0) throw std::invalid_argument("run_growth: steps must be >= 1");
  std::uint64_t stride = params.stride;
  if (stride == 0) stride = std::max<std::uint64_t>(1, (params.steps + 999999) / 1000000);

  GrowthState state(params.n, params.seed, params.horizon);
  state.set_mirrored(params.mirrored);

  const double h = std::sqrt(1.0 / static_cast<double>(params.n));
  Trace trace;
  trace.n = params.n;
  trace.stride = stride;
  // All trace storage is reserved up front, so a run that does not fit in
  // memory fails here, cleanly, before any stepping.
  try {
    trace.attachments.reserve(params.steps);
    const std::uint64_t samples = (params.steps - 1) / stride + 2;
    trace.ks.reserve(samples);
    trace.left.reserve(samples);
    trace.right.reserve(samples);
    trace.scales.reserve(samples);
    trace.push_right.reserve(samples);
    trace.push_left.reserve(samples);
  } catch (const std::bad_alloc&) {
    throw std::runtime_error(
        "run_growth: trace of " + std::to_string(params.steps) +
        " steps does not fit in memory; rerun with a larger stride");
  }

  auto record = [&](std::uint64_t k, const StepRecord& rec) {
    trace.ks.push_back(k);
    trace.left.push_back(state.left());
    trace.right.push_back(state.right());
    trace.scales.push_back(rec.scale_right);
    trace.push_right.push_back(rec.push_right);
    trace.push_left.push_back(rec.push_left);
  };

  // Particle 1 sits at the origin; its step record is the seed row.
  trace.attachments.push_back(0.0);
  record(1, StepRecord{0.0, kScaleMin, kScaleMin, h, h});

  for (std::uint64_t k = 2; k <= params.steps; ++k) {
    const StepRecord rec = state.step();
    trace.attachments.push_back(rec.x);
    if ((k - 1) % stride == 0 || k == params.steps) record(k, rec);
  }
  return trace;
}

ReplayedEndpoints replay_endpoints(const Trace& trace) {
  ReplayedEndpoints out;
  const std::uint64_t steps = trace.steps();
  out.left.reserve(steps);
  out.right.reserve(steps);
  const double h = std::sqrt(1.0 / static_cast<double>(trace.n));
  double left = h, right = h;
  out.left.push_back(left);
  out.right.push_back(right);
  for (std::uint64_t k = 2; k <= steps; ++k) {
    const Endpoints next = endpoint_update(left, right, trace.attachments[k - 1], trace.n);
    left = next.left;
    right = next.right;
    out.left.push_back(left);
    out.right.push_back(right);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stopping times, ratios, ODE
// ---------------------------------------------------------------------------

double threshold_length(std::uint64_t n) {
  const double logn = std::log(static_cast<double>(n));
  return logn * logn * logn / std::sqrt(static_cast<double>(n));
}

StoppingReport stopping_times(const Trace& trace, double delta, double epsilon,
                              std::span<const double> t_grid) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("stopping_times: delta must lie in (0, 1]");
  }
  if (trace.stride != 1 || trace.ks.size() != trace.steps()) {
    throw std::invalid_argument("stopping_times: requires a stride-1 trace");
  }
  if (trace.n < 2) throw std::invalid_argument("stopping_times: requires n >= 2");

  const double logn = std::log(static_cast<double>(trace.n));
  StoppingReport report;
  report.l_n = threshold_length(trace.n);
  report.delta = delta;
  report.epsilon = epsilon;

  std::vector<double> grid(t_grid.begin(), t_grid.end());
  std::sort(grid.begin(), grid.end());
  report.crossing_t = grid;
  report.crossing_step.assign(grid.size(), 0);
  std::size_t next_cross = 0;

  double threshold = report.l_n;
  bool past_first = false;
  double lambda_prev_time = 0.0;

  const std::uint64_t steps = trace.steps();
  for (std::uint64_t i = 1; i <= steps; ++i) {
    const double lambda = trace.left[i - 1] + trace.right[i - 1];
    while (next_cross < grid.size() &&
           lambda >= std::sqrt(grid[next_cross] * logn)) {
      report.crossing_step[next_cross] = i;
      ++next_cross;
    }
    if (lambda >= threshold) {
      report.times.push_back(i);
      report.lambda_at_times.push_back(lambda);
      if (past_first) {
        const double base = (static_cast<double>(trace.n) / logn) *
                            lambda_prev_time * lambda_prev_time;
        report.windows.push_back(
            StoppingWindow{2.0 * delta / (1.0 + epsilon) * base,
                           2.0 * delta * (1.0 + epsilon) * base});
      }
      past_first = true;
      lambda_prev_time = lambda;
      threshold = (1.0 + delta) * lambda;
    }
  }
  report.reached_threshold = !report.times.empty();
  return report;
}

TheoremRatios theorem_ratio(const Trace& trace, double t) {
  if (trace.n < 2) throw std::invalid_argument("theorem_ratio: requires n >= 2");
  if (!(t > 0.0)) throw std::invalid_argument("theorem_ratio: t must be positive");
  if (trace.stride != 1 || trace.ks.size() != trace.steps()) {
    throw std::invalid_argument("theorem_ratio: requires a stride-1 trace");
  }
  const double nd = static_cast<double>(trace.n);
  const auto index = static_cast<std::uint64_t>(nd * t);
  if (index < 1 || index > trace.steps()) {
    throw std::invalid_argument("theorem_ratio: floor(n t) outside the trace");
  }
  const double logn = std::log(nd);
  const double denom = std::sqrt(t * logn);
  TheoremRatios ratios;
  const double left = trace.left[index - 1];
  const double right = trace.right[index - 1];
  ratios.lambda_ratio = (left + right) / denom;
  ratios.right_ratio = right / denom;
  ratios.left_ratio = left / denom;
  ratios.below_theorem_range = t < std::pow(logn, 9) / nd;
  return ratios;
}

double ode_prediction(double t, double alpha0) {
  if (!(t >= 0.0) || !(alpha0 >= 0.0)) {
    throw std::invalid_argument("ode_prediction: t and alpha0 must be >= 0");
  }
  return std::sqrt(0.25 * t + alpha0 * alpha0);
}

std::vector<ScalePushStat> scale_push_stats(const DyadicLedger& ledger,
                                            std::uint64_t n) {
  std::vector<ScalePushStat> stats;
  const double nd = static_cast<double>(n);
  const ScaleBounds& bounds = ledger.bounds();
  for (std::int32_t j = bounds.j_min; j <= bounds.j_max; ++j) {
    const std::uint64_t count = ledger.count(j);
    if (count == 0) continue;
    ScalePushStat stat;
    stat.j = j;
    stat.count = count;
    stat.mean = ledger.delta(j) / static_cast<double>(count);
    stat.predicted_hi = std::log(2.0) / (nd * std::ldexp(1.0, j + 1));
    stat.predicted_lo =
        stat.predicted_hi - (7.0 / 24.0) / (nd * nd * std::ldexp(1.0, 3 * j));
    stat.predicted_var_bound = 0.25 / (nd * nd * std::ldexp(1.0, 2 * j));
    stats.push_back(stat);
  }
  return stats;
}

}  // namespace chl
