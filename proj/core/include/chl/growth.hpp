#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "chl/complex_maps.hpp"
#include "chl/rng.hpp"
#include "chl/summation.hpp"

namespace chl {

// ---------------------------------------------------------------------------
// Dyadic scale classification
// ---------------------------------------------------------------------------

/// Scale labels are the dyadic index j with 2^j <= d < 2^{j+1}, or one of two
/// sentinels: MIN for distances at or below 2^{j_min} (the front bucket) and
/// OVER for distances at or beyond 2^{j_max+1}.
constexpr std::int32_t kScaleMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int32_t kScaleOver = std::numeric_limits<std::int32_t>::max();

struct ScaleBounds {
  std::int32_t j_min = 0;  // smallest j with 2^j >= 1/sqrt(n)
  std::int32_t j_max = 0;  // smallest j with 2^j >= sqrt(T log n)
};

/// Scale range for particle scale n and time horizon T.
ScaleBounds scale_bounds(std::uint64_t n, double horizon);

/// Dyadic label of a positive front distance under the given bounds.
/// Throws std::invalid_argument for nonpositive distances.
std::int32_t dyadic_index(double distance, const ScaleBounds& bounds);
std::int32_t dyadic_index(double distance, std::uint64_t n, double horizon);

/// Per-scale accumulators of front pushes over a step window. Bucket sums are
/// compensated so that delta_min + sum_j delta_j + delta_over reproduces the
/// total front displacement of the window to ~1e-15 relative.
class DyadicLedger {
 public:
  DyadicLedger() = default;
  explicit DyadicLedger(ScaleBounds bounds);

  void add(std::int32_t scale, double push);
  void reset();

  const ScaleBounds& bounds() const { return bounds_; }
  double delta(std::int32_t j) const;
  double delta_min() const { return delta_min_.value(); }
  double delta_over() const { return delta_over_.value(); }
  std::uint64_t count(std::int32_t j) const;
  std::uint64_t count_min() const { return count_min_; }
  std::uint64_t count_over() const { return count_over_; }
  /// Sum of every bucket including MIN and OVER.
  double total() const;

 private:
  std::size_t slot(std::int32_t j) const;

  ScaleBounds bounds_{};
  std::vector<KahanSum> delta_;
  std::vector<std::uint64_t> counts_;
  KahanSum delta_min_{}, delta_over_{};
  std::uint64_t count_min_ = 0, count_over_ = 0;
};

// ---------------------------------------------------------------------------
// Growth state and traces
// ---------------------------------------------------------------------------

struct StepRecord {
  double x = 0.0;            // attachment location in mapped-out coordinates
  std::int32_t scale_right = kScaleMin;  // dyadic label of right - x
  std::int32_t scale_left = kScaleMin;   // dyadic label of left + x
  double push_right = 0.0;
  double push_left = 0.0;
};

/// Sequential state of one run. Step k+1 draws x uniformly on the current
/// interval [-left, right], classifies the distance to each front on the
/// dyadic ledgers, and applies the closed-form endpoint recursion. The state
/// after construction is the one-particle cluster: k = 1, left = right =
/// 1/sqrt(n).
class GrowthState {
 public:
  /// Throws std::invalid_argument when n == 0.
  GrowthState(std::uint64_t n, std::uint64_t seed, double horizon = 1.0);

  StepRecord step();

  std::uint64_t n() const { return n_; }
  std::uint64_t k() const { return k_; }
  double left() const { return left_; }
  double right() const { return right_; }
  double lambda() const { return lambda_; }
  const DyadicLedger& right_ledger() const { return right_ledger_; }
  const DyadicLedger& left_ledger() const { return left_ledger_; }

  /// Mirror mode maps every uniform draw u to 1-u. A mirrored run's
  /// (left, right) sequences equal the plain run's (right, left) bitwise.
  void set_mirrored(bool mirrored) { mirrored_ = mirrored; }

 private:
  std::uint64_t n_ = 1;
  std::uint64_t k_ = 1;
  double left_ = 0.0, right_ = 0.0, lambda_ = 0.0;
  double min_bucket_edge_ = 0.0;  // 2^{j_min}
  ScaleBounds bounds_{};
  DyadicLedger right_ledger_, left_ledger_;
  Xoshiro256pp rng_;
  bool mirrored_ = false;
};

/// Full run record. Attachments are always complete; endpoint/scale/push
/// samples are kept at steps ks[i] (stride 1 keeps every step). Replaying
/// attachments through endpoint_update reproduces the endpoints bit for bit.
struct Trace {
  std::uint64_t n = 1;
  std::uint64_t stride = 1;
  std::vector<double> attachments;     // x_1 .. x_K
  std::vector<std::uint64_t> ks;       // sampled step indices (always ends at K)
  std::vector<double> left, right;     // endpoints at ks
  std::vector<std::int32_t> scales;    // right-front label of the step at ks
  std::vector<double> push_right, push_left;

  std::uint64_t steps() const { return attachments.size(); }
  double final_left() const { return left.back(); }
  double final_right() const { return right.back(); }
  double final_lambda() const { return left.back() + right.back(); }
};

struct GrowthRunParams {
  std::uint64_t n = 1;
  std::uint64_t steps = 1;
  std::uint64_t seed = 0;
  std::uint64_t stride = 1;   // 0 = auto: ceil(steps / 1e6)
  double horizon = 1.0;       // T, fixes the ledger scale range
  bool mirrored = false;
};

/// Runs `steps` sequential attachments. O(1) memory per step beyond the
/// recorded trace. Throws std::invalid_argument for zero steps or zero n.
Trace run_growth(const GrowthRunParams& params);

/// Endpoint sequences obtained by replaying a trace's attachments through
/// endpoint_update; used by trace consumers so the RNG never reruns.
struct ReplayedEndpoints {
  std::vector<double> left, right;  // per step, 1-based step k at index k-1
};
ReplayedEndpoints replay_endpoints(const Trace& trace);

// ---------------------------------------------------------------------------
// Stopping times, ratios, ODE
// ---------------------------------------------------------------------------

/// Threshold length l(n) = (log n)^3 / sqrt(n).
double threshold_length(std::uint64_t n);

struct StoppingWindow {
  double m_k = 0.0;  // lower window (2 delta / (1+eps)) (n/log n) lambda_{T_{k-1}}^2
  double n_k = 0.0;  // upper window  2 delta (1+eps)    (n/log n) lambda_{T_{k-1}}^2
};

struct StoppingReport {
  double l_n = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  bool reached_threshold = false;          // lambda never reached l(n) if false
  std::vector<std::uint64_t> times;        // T_1, T_2, ...
  std::vector<double> lambda_at_times;     // lambda_{T_k}
  std::vector<StoppingWindow> windows;     // for T_k with k >= 2
  std::vector<double> crossing_t;          // t-grid
  std::vector<std::uint64_t> crossing_step;  // S(t); 0 when never crossed
};

/// Stopping times T_k (growth by 1+delta after reaching l(n)) and crossing
/// steps S(t) on the given t-grid. Requires a stride-1 trace.
/// Throws std::invalid_argument for delta outside (0, 1] or thinned traces.
StoppingReport stopping_times(const Trace& trace, double delta,
                              double epsilon = 0.5,
                              std::span<const double> t_grid = {});

struct TheoremRatios {
  double lambda_ratio = 0.0;
  double right_ratio = 0.0;
  double left_ratio = 0.0;
  bool below_theorem_range = false;  // t < (log n)^9 / n: computed, flagged
};

/// lambda_{floor(nt)} / sqrt(t log n) and the per-front ratios; the model
/// concentrates them near 1, 1/2, 1/2. Requires a stride-1 trace covering
/// step floor(nt) and n >= 2.
TheoremRatios theorem_ratio(const Trace& trace, double t);

/// Exact solution alpha(t) = sqrt(t/4 + alpha0^2) of the front heuristic
/// alpha' = 1/(8 alpha), alpha(0) = alpha0. Negative inputs rejected.
double ode_prediction(double t, double alpha0);

struct ScalePushStat {
  std::int32_t j = 0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double predicted_lo = 0.0;        // log2/(n 2^{j+1}) - (7/24)/(n^2 2^{3j})
  double predicted_hi = 0.0;        // log2/(n 2^{j+1})
  double predicted_var_bound = 0.0; // (1/4)/(n^2 2^{2j})
};

/// Empirical mean push per dyadic scale against the conditional-push
/// predictions. Scales with zero arrivals are omitted.
std::vector<ScalePushStat> scale_push_stats(const DyadicLedger& ledger,
                                            std::uint64_t n);

}  // namespace chl
