// chl: constrained half-plane aggregation toolbox.
//
// Subcommands:
//   grow      single run -> trace.csv, summary.json, scales.csv, interval.svg
//   envelope  trace.csv -> envelope.csv, envelope.svg (never reruns the RNG)
//   verify    property suites; exit 3 on any failure
//   loewner   integrator oracles + discrepancy.csv
//   disc      exterior-disc variant: first-arrival experiment
//   ensemble  replicated runs -> summary.json, scaling.csv, scaling.svg
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "chl/checks.hpp"
#include "chl/config.hpp"
#include "chl/disc.hpp"
#include "chl/ensemble.hpp"
#include "chl/growth.hpp"
#include "chl/hull.hpp"
#include "chl/io.hpp"
#include "chl/loewner.hpp"
#include "chl/svg.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFailed = 3;

struct CliFlags {
  std::string config_path;
  chl::RunConfig values;
  // CLI11 counts tell us which flags were set explicitly; those win over the
  // config file.
  CLI::App* cmd = nullptr;

  void add_common(CLI::App& app) {
    cmd = &app;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--n", values.n, "particle-count scale n");
    app.add_option("--t", values.t, "time horizon T (a run has ceil(nT) particles)");
    app.add_option("--delta", values.delta, "doubling factor delta");
    app.add_option("--eps-window", values.eps_window, "epsilon for doubling-window diagnostics");
    app.add_option("--seed", values.seed, "master seed");
    app.add_option("--replicas", values.replicas, "replica count");
    app.add_option("--envelope-eps", values.envelope_eps, "envelope offset height");
    app.add_option("--grid-points", values.envelope_points, "envelope grid points");
    app.add_option("--alpha", values.alpha, "disc-mode target arc parameter");
    app.add_option("--stride", values.trace_stride, "trace sampling stride (0 = auto)");
    app.add_option("--dt", values.dt, "integrator step (0 = default)");
    app.add_option("--out", values.out_dir, "output directory");
  }

  chl::RunConfig merged() const {
    chl::RunConfig config;
    if (!config_path.empty()) config = chl::load_config_file(config_path);
    const auto take = [&](const char* flag, auto member) {
      if (cmd->count(flag) > 0) config.*member = values.*member;
    };
    take("--n", &chl::RunConfig::n);
    take("--t", &chl::RunConfig::t);
    take("--delta", &chl::RunConfig::delta);
    take("--eps-window", &chl::RunConfig::eps_window);
    take("--seed", &chl::RunConfig::seed);
    take("--replicas", &chl::RunConfig::replicas);
    take("--envelope-eps", &chl::RunConfig::envelope_eps);
    take("--grid-points", &chl::RunConfig::envelope_points);
    take("--alpha", &chl::RunConfig::alpha);
    take("--stride", &chl::RunConfig::trace_stride);
    take("--dt", &chl::RunConfig::dt);
    take("--out", &chl::RunConfig::out_dir);
    config.validate();
    return config;
  }
};

fs::path ensure_out_dir(const chl::RunConfig& config) {
  if (config.out_dir.empty()) {
    throw chl::ConfigError("this subcommand needs --out <dir>");
  }
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw chl::ConfigError("out dir is not writable: " + dir.string());
  }
  // Probe writability explicitly so the failure mode is a config error.
  const fs::path probe = dir / ".chl_write_probe";
  try {
    chl::write_text_file(probe, "ok");
  } catch (const std::exception&) {
    throw chl::ConfigError("out dir is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

ordered_json meta_json() { return ordered_json{{"tool", "chl"}, {"format", 1}}; }

int cmd_grow(const chl::RunConfig& config) {
  const fs::path dir = ensure_out_dir(config);
  chl::GrowthRunParams params;
  params.n = config.n;
  params.steps = config.steps();
  params.seed = config.seed;
  params.stride = config.trace_stride;
  params.horizon = config.t;
  const chl::Trace trace = chl::run_growth(params);

  chl::write_text_file(dir / "trace.csv", chl::trace_to_csv(trace));

  ordered_json summary;
  summary["meta"] = meta_json();
  summary["n"] = trace.n;
  summary["steps"] = trace.steps();
  summary["seed"] = config.seed;
  summary["final"] = ordered_json{{"k", trace.ks.back()},
                                  {"L", trace.final_left()},
                                  {"R", trace.final_right()},
                                  {"lambda", trace.final_lambda()}};
  const double logn = std::log(static_cast<double>(trace.n));
  if (trace.n >= 2) {
    summary["lambda_ratio_final"] =
        trace.final_lambda() / std::sqrt(config.t * logn);
  }
  if (trace.stride == 1) {
    const auto grid = config.effective_t_grid();
    const chl::StoppingReport stops =
        chl::stopping_times(trace, config.delta, config.eps_window, grid);
    summary["stopping"] = ordered_json{
        {"l_n", stops.l_n},
        {"reached_threshold", stops.reached_threshold},
        {"times", stops.times},
        {"crossing_t", stops.crossing_t},
        {"crossing_step", stops.crossing_step}};
  }
  chl::write_text_file(dir / "summary.json", summary.dump(2) + "\n");

  // Per-scale push statistics of the right front.
  chl::GrowthState state(config.n, config.seed, config.t);
  for (std::uint64_t k = 2; k <= params.steps; ++k) state.step();
  const auto stats = chl::scale_push_stats(state.right_ledger(), config.n);
  chl::write_text_file(dir / "scales.csv", chl::scales_to_csv(stats));

  // Allowed-interval picture: endpoints and attachment locations against k.
  std::vector<chl::SvgSeries> series(3);
  series[0].label = "-L_k";
  series[1].label = "R_k";
  series[2].label = "x_k";
  series[2].kind = chl::SvgSeries::Kind::Dots;
  for (std::size_t i = 0; i < trace.ks.size(); ++i) {
    const double k = static_cast<double>(trace.ks[i]);
    series[0].points.emplace_back(-trace.left[i], k);
    series[1].points.emplace_back(trace.right[i], k);
  }
  for (std::size_t i = 0; i < trace.attachments.size(); ++i) {
    series[2].points.emplace_back(trace.attachments[i], static_cast<double>(i + 1));
  }
  chl::SvgStyle style;
  style.title = "allowed interval";
  style.x_label = "position";
  style.y_label = "k";
  chl::write_text_file(dir / "interval.svg", chl::emit_svg(series, style));

  std::cout << "grow: wrote " << (dir / "trace.csv").string() << " ("
            << trace.steps() << " particles, lambda = " << trace.final_lambda()
            << ")\n";
  return kExitOk;
}

int cmd_envelope(const chl::RunConfig& config, const std::string& trace_path) {
  const fs::path dir = ensure_out_dir(config);
  const fs::path source = trace_path.empty() ? dir / "trace.csv" : fs::path(trace_path);
  const chl::Trace trace = chl::trace_from_csv(chl::read_text_file(source));

  const chl::EnvelopePolyline env = chl::envelope(
      trace.attachments, trace.n, config.envelope_eps, config.envelope_points);
  chl::write_text_file(dir / "envelope.csv", chl::envelope_to_csv(env));

  std::vector<chl::SvgSeries> series(1);
  series[0].label = "envelope";
  for (const auto& p : env.points) series[0].points.emplace_back(p.real(), p.imag());
  chl::SvgStyle style;
  style.title = "cluster envelope";
  style.equal_axes = true;
  chl::write_text_file(dir / "envelope.svg", chl::emit_svg(series, style));

  std::cout << "envelope: " << env.points.size() << " points, diameter "
            << chl::diameter(env) << ", height " << chl::max_height(env) << "\n";
  return kExitOk;
}

int cmd_verify() {
  const auto results = chl::run_verification_suite();
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

int cmd_loewner(const chl::RunConfig& config) {
  const fs::path dir = ensure_out_dir(config);
  const double dt = config.dt > 0.0 ? config.dt : chl::default_dt(config.t);

  // Point-mass oracle at the configured step.
  const chl::DrivingMeasure pm = chl::DrivingMeasure::point_mass(0.0);
  const double root = std::sqrt(2.0 * config.t);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const chl::ComplexPoint z(-3.0 + 6.0 * (i % 10) / 9.0, 0.5 + 4.5 * (i / 10) / 9.0);
    const chl::ComplexPoint exact = chl::sqrt_upper((z - root) * (z + root));
    const chl::ComplexPoint num = chl::solve_characteristic(z, config.t, pm, dt);
    worst = std::max(worst, std::abs(num - exact) / std::abs(exact));
  }
  std::cout << "loewner: point-mass oracle max relative error " << worst << "\n";

  // Discrepancy report for a fresh run at (n, seed).
  chl::GrowthRunParams params;
  params.n = config.n;
  params.steps = config.steps();
  params.seed = config.seed;
  params.stride = 0;
  params.horizon = config.t;
  const chl::Trace trace = chl::run_growth(params);
  std::vector<chl::ComplexPoint> grid;
  for (int ix = 0; ix < 5; ++ix) {
    for (int iy = 0; iy < 5; ++iy) {
      grid.emplace_back(-2.0 + ix, 0.5 + 0.5 * iy);
    }
  }
  const auto rows =
      chl::discrepancy_report(trace.attachments, config.n, config.t, grid, dt);
  chl::write_text_file(dir / "discrepancy.csv", chl::discrepancy_to_csv(rows));
  std::cout << "loewner: wrote " << (dir / "discrepancy.csv").string() << "\n";
  return kExitOk;
}

int cmd_disc(const chl::RunConfig& config, std::uint64_t max_steps) {
  const fs::path dir = ensure_out_dir(config);
  if (config.replicas == 1) {
    chl::DiscRunOptions opts;
    opts.record_trace = true;
    const std::uint64_t cap = max_steps == 0 ? 2 * config.n : max_steps;
    const chl::DiscRunResult res =
        chl::disc_run(config.n, config.seed, config.alpha, cap, opts);
    chl::write_text_file(dir / "disc_trace.csv", chl::disc_trace_to_csv(res.trace));
    ordered_json summary;
    summary["meta"] = meta_json();
    summary["n"] = config.n;
    summary["alpha"] = config.alpha;
    summary["seed"] = config.seed;
    summary["tau"] = res.tau ? ordered_json(*res.tau) : ordered_json(nullptr);
    summary["arm_collision"] = res.arm_collision;
    summary["prediction"] = chl::tau_alpha_prediction(config.n, config.alpha);
    chl::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "disc: tau = "
              << (res.tau ? std::to_string(*res.tau) : std::string("NOT_REACHED"))
              << " (prediction "
              << chl::tau_alpha_prediction(config.n, config.alpha) << ")\n";
    return kExitOk;
  }
  const chl::DiscEnsembleSummary summary = chl::run_disc_ensemble(config, max_steps);
  chl::write_text_file(dir / "summary.json", chl::disc_summary_to_json(summary));
  std::cout << "disc: median tau/n = " << summary.tau_over_n_median << " over "
            << summary.replicas << " replicas\n";
  return kExitOk;
}

int cmd_ensemble(const chl::RunConfig& config, bool with_geometry) {
  const fs::path dir = ensure_out_dir(config);
  const chl::EnsembleSummary summary = chl::run_ensemble(config, with_geometry);
  chl::write_text_file(dir / "summary.json", chl::ensemble_summary_to_json(summary));
  chl::write_text_file(dir / "scaling.csv", chl::scaling_to_csv(summary));

  std::vector<chl::SvgSeries> series(3);
  series[0].label = "lambda ratio median";
  series[1].label = "q25";
  series[2].label = "q75";
  for (std::size_t i = 0; i < summary.t_grid.size(); ++i) {
    series[0].points.emplace_back(summary.t_grid[i], summary.lambda_ratio[i].median);
    series[1].points.emplace_back(summary.t_grid[i], summary.lambda_ratio[i].q25);
    series[2].points.emplace_back(summary.t_grid[i], summary.lambda_ratio[i].q75);
  }
  chl::SvgStyle style;
  style.title = "interval length against sqrt(t log n)";
  style.x_label = "t";
  style.y_label = "ratio";
  chl::write_text_file(dir / "scaling.svg", chl::emit_svg(series, style));

  const std::size_t last = summary.t_grid.size() - 1;
  std::cout << "ensemble: median lambda ratio at t = " << summary.t_grid[last]
            << " is " << summary.lambda_ratio[last].median << " ("
            << summary.replicas << " replicas)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained half-plane aggregation simulator"};
  app.require_subcommand(1);

  CliFlags grow_flags, env_flags, loewner_flags, disc_flags, ens_flags;
  std::string trace_path;
  std::uint64_t disc_max_steps = 0;
  bool with_geometry = false;

  CLI::App* grow = app.add_subcommand("grow", "single run: trace + summary");
  grow_flags.add_common(*grow);

  CLI::App* env = app.add_subcommand("envelope", "envelope of a recorded trace");
  env_flags.add_common(*env);
  env->add_option("--trace", trace_path, "trace CSV (default <out>/trace.csv)");

  app.add_subcommand("verify", "run all property suites");

  CLI::App* loewner = app.add_subcommand("loewner", "integrator oracles + discrepancies");
  loewner_flags.add_common(*loewner);

  CLI::App* disc = app.add_subcommand("disc", "exterior-disc first-arrival experiment");
  disc_flags.add_common(*disc);
  disc->add_option("--max-steps", disc_max_steps, "step cap (0 = 2n)");

  CLI::App* ens = app.add_subcommand("ensemble", "replicated runs + scaling summary");
  ens_flags.add_common(*ens);
  ens->add_flag("--geometry", with_geometry, "also compute envelope geometry per replica");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (app.got_subcommand("grow")) return cmd_grow(grow_flags.merged());
    if (app.got_subcommand("envelope")) return cmd_envelope(env_flags.merged(), trace_path);
    if (app.got_subcommand("verify")) return cmd_verify();
    if (app.got_subcommand("loewner")) return cmd_loewner(loewner_flags.merged());
    if (app.got_subcommand("disc")) return cmd_disc(disc_flags.merged(), disc_max_steps);
    if (app.got_subcommand("ensemble")) return cmd_ensemble(ens_flags.merged(), with_geometry);
  } catch (const chl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
