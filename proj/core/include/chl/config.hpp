#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace chl {

/// Configuration problems (malformed JSON, bad values, unusable out dir)
/// surface as this type; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment parameters. A JSON config file mirrors the CLI flags
/// (keys "n", "t", "delta", "eps-window", "seed", "replicas",
/// "envelope-eps", "grid-points", "alpha", "out", "stride", "dt",
/// "t-grid"); explicitly set flags override file values.
struct RunConfig {
  std::uint64_t n = 1000;
  double t = 1.0;              // time horizon T; a run has ceil(n T) particles
  double delta = 0.5;          // doubling factor for the stopping times
  double eps_window = 0.5;     // epsilon in the doubling-window diagnostics
  std::uint64_t seed = 1;
  std::uint32_t replicas = 1;
  double envelope_eps = 1e-5;
  int envelope_points = 2000;
  double alpha = 0.5;          // disc-mode target arc half-width is pi*alpha
  std::string out_dir;         // empty: no files written
  std::uint64_t trace_stride = 0;  // 0 = auto (ceil(steps / 1e6))
  double dt = 0.0;             // Loewner integrator step; 0 = 1e-4 max(1, t)
  std::vector<double> t_grid;  // empty = default geometric grid

  std::uint64_t steps() const;
  /// Geometric 20-point grid. The theorem range starts at (log n)^9 / n,
  /// which exceeds any desk-scale horizon, so the grid is floored at 1e-3
  /// (or T/20) and out-of-range points are simply flagged downstream.
  std::vector<double> effective_t_grid() const;
  void validate() const;  // throws ConfigError
};

/// Parses a JSON config file. Unknown keys are a ConfigError, as are
/// ill-typed values.
RunConfig load_config_file(const std::filesystem::path& path);

/// Applies a JSON config on top of defaults; exposed for the CLI merge.
void apply_config_json(RunConfig& config, const std::string& json_text);

}  // namespace chl
