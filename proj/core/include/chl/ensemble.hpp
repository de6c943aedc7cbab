#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chl/config.hpp"
#include "chl/growth.hpp"
#include "chl/hull.hpp"

namespace chl {

struct Quantiles {
  double q05 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q95 = 0.0;
};

/// Quantiles by linear interpolation over a sample pool (copied and sorted).
Quantiles quantiles(std::vector<double> samples);
double median(std::vector<double> samples);

/// Streaming per-replica record: checkpoints on the t-grid, stopping-time
/// diagnostics, final ledger statistics, and the quadratic-growth fit. Keeps
/// O(grid) memory however long the run is.
struct ReplicaResult {
  std::uint32_t replica = 0;
  std::uint64_t stream_seed = 0;
  std::vector<double> lambda_at, right_at, left_at;  // per t-grid entry
  std::uint64_t t1_step = 0;                         // 0 = threshold not reached
  std::uint64_t window_hits = 0, window_total = 0;   // T_k - T_{k-1} vs [m_k, n_k]
  double ode_c = 0.0;  // least squares of lambda^2 on t log n over t in [0.1, T]
  double lambda_final = 0.0;
  std::vector<ScalePushStat> scales;
  std::optional<GeometrySummary> geometry;
};

ReplicaResult run_replica_summary(const RunConfig& config, std::uint32_t replica,
                                  bool with_geometry = false);

/// Deterministic reduction over replicas: sample pools are keyed by replica
/// index, so the merge is independent of completion order.
struct EnsembleSummary {
  std::uint64_t n = 0;
  double t = 0.0;
  std::uint32_t replicas = 0;
  std::uint64_t seed = 0;
  double delta = 0.0, eps_window = 0.0;
  std::vector<double> t_grid;
  std::vector<std::uint8_t> below_theorem_range;  // per grid point
  std::vector<Quantiles> lambda_ratio, right_ratio, left_ratio, right_share;
  double window_hit_rate = 0.0;
  std::uint64_t window_total = 0;
  std::vector<std::uint64_t> t1_steps;  // per replica
  double t1_bound = 0.0;                // (log n)^7
  std::vector<double> ode_c;            // per replica
  std::vector<ScalePushStat> pooled_scales;
  std::vector<GeometrySummary> geometry;  // per replica, when enabled
};

/// Runs the replicas concurrently (seeds derived from (seed, replica)) and
/// reduces. A failed replica aborts the ensemble; the error names the
/// replica and its stream seed.
EnsembleSummary run_ensemble(const RunConfig& config, bool with_geometry = false);

std::string ensemble_summary_to_json(const EnsembleSummary& summary);
std::string scaling_to_csv(const EnsembleSummary& summary);

/// Disc-variant ensemble: first-arrival samples for the tau_alpha experiment.
struct DiscEnsembleSummary {
  std::uint64_t n = 0;
  double alpha = 0.0;
  std::uint32_t replicas = 0;
  std::uint64_t max_steps = 0;
  std::vector<std::int64_t> tau;  // -1 = not reached within max_steps
  std::vector<std::uint8_t> collided;
  double prediction = 0.0;            // 4 pi^2 n (1-alpha)^2 / log n
  double tau_over_n_median = 0.0;     // over reached replicas
  double ratio_to_prediction_median = 0.0;
};

DiscEnsembleSummary run_disc_ensemble(const RunConfig& config,
                                      std::uint64_t max_steps = 0 /* 0 = 2n */);

std::string disc_summary_to_json(const DiscEnsembleSummary& summary);

}  // namespace chl
