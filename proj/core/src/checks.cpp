#include "chl/checks.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "chl/disc.hpp"
#include "chl/ensemble.hpp"
#include "chl/growth.hpp"
#include "chl/hull.hpp"
#include "chl/io.hpp"
#include "chl/loewner.hpp"
#include "chl/svg.hpp"

namespace chl {

namespace {

struct Suite {
  std::vector<CheckResult> results;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    results.push_back(CheckResult{name, ok, detail});
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void conformal_checks(Suite& suite) {
  // Branch consistency on a grid of interior points against random slits.
  bool branch_ok = true;
  Xoshiro256pp rng(11);
  for (int i = 0; i < 400 && branch_ok; ++i) {
    const ComplexPoint z(-5.0 + 10.0 * rng.uniform(), 1e-6 + 4.0 * rng.uniform());
    const SlitParams p{-2.0 + 4.0 * rng.uniform(), 1 + (rng.next() % 1000)};
    branch_ok = slit_forward(z, p).imag() > 0.0 && slit_inverse(z, p).imag() >= 0.0;
  }
  suite.check("conformal/branch_consistency", branch_ok);

  // Inverse identity on 10^3 interior points.
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ComplexPoint z(-6.0 + 12.0 * rng.uniform(), 1e-3 + 5.0 * rng.uniform());
    const SlitParams p{-3.0 + 6.0 * rng.uniform(), 1 + (rng.next() % 10000)};
    const double err =
        std::abs(slit_inverse(slit_forward(z, p), p) - z) / (1.0 + std::abs(z));
    worst = std::max(worst, err);
  }
  suite.check("conformal/inverse_identity", worst <= 1e-10, "worst " + fmt(worst));

  // Hydrodynamic normalization: iy (g(iy) - iy) -> 1/(2n).
  bool hydro_ok = true;
  for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{100}}) {
    for (const double y : {1e3, 1e4}) {
      const SlitParams p{0.0, n};
      const ComplexPoint iy(0.0, y);
      const double est = ((iy * (slit_inverse(iy, p) - iy))).real();
      if (std::abs(est - p.capacity()) > 1e-2 * p.capacity()) hydro_ok = false;
    }
  }
  suite.check("conformal/hydrodynamic_normalization", hydro_ok);

  // Monotone pushes with the 1/sqrt(n) cap, plus exact reflection symmetry.
  bool push_ok = true, reflect_ok = true;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = 1 + (rng.next() % 100000);
    const double L = 5.0 * rng.uniform() + 1e-3;
    const double R = 5.0 * rng.uniform() + 1e-3;
    const double x = -L + (L + R) * rng.uniform();
    const Endpoints e = endpoint_update(L, R, x, n);
    const double cap = std::sqrt(1.0 / static_cast<double>(n)) * (1.0 + 1e-13);
    if (!(e.left > L && e.right > R)) push_ok = false;
    if (e.left - L > cap || e.right - R > cap) push_ok = false;
    const Endpoints m = endpoint_update(R, L, -x, n);
    if (m.left != e.right || m.right != e.left) reflect_ok = false;
  }
  suite.check("conformal/monotone_pushes", push_ok);
  suite.check("conformal/reflection_symmetry_bitwise", reflect_ok);

  // Push bracketing against the closed-form bounds. Distances cap at
  // 1e3/sqrt(n); beyond that the bracket width drops below double
  // resolution.
  bool bracket_ok = true;
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t n = 1 + (rng.next() % 1000000);
    const double h = std::sqrt(1.0 / static_cast<double>(n));
    const double d = h * std::exp(std::log(1e3) * rng.uniform());
    const double R = d + 10.0 * rng.uniform();
    const PushBounds b = push_bounds(R, R - d, n);
    const double push = front_push(d, n);
    if (!(push >= b.lo && push <= b.hi)) bracket_ok = false;
  }
  suite.check("conformal/push_bracketing", bracket_ok);
}

void growth_checks(Suite& suite) {
  // Ledger conservation over a window, both fronts.
  {
    GrowthState state(1000, 42, 1.0);
    const double right0 = state.right(), left0 = state.left();
    for (int i = 0; i < 200000; ++i) state.step();
    const double moved_r = state.right() - right0;
    const double moved_l = state.left() - left0;
    const double err_r = std::abs(state.right_ledger().total() - moved_r) / moved_r;
    const double err_l = std::abs(state.left_ledger().total() - moved_l) / moved_l;
    suite.check("growth/ledger_conservation", err_r <= 1e-12 && err_l <= 1e-12,
                "rel " + fmt(std::max(err_r, err_l)));
  }

  // Min-bucket pushes never exceed 1/sqrt(n).
  {
    const std::uint64_t n = 400;
    GrowthState state(n, 7, 1.0);
    const double cap = std::sqrt(1.0 / static_cast<double>(n)) * (1.0 + 1e-13);
    bool ok = true;
    for (int i = 0; i < 100000; ++i) {
      const StepRecord rec = state.step();
      if (rec.scale_right == kScaleMin && rec.push_right > cap) ok = false;
      if (rec.scale_left == kScaleMin && rec.push_left > cap) ok = false;
    }
    suite.check("growth/min_bucket_push_cap", ok);
  }

  // Minimal push floor while lambda <= l(n), n = 1e4.
  {
    const std::uint64_t n = 10000;
    GrowthState state(n, 3, 1.0);
    const double l_n = threshold_length(n);
    const double logn = std::log(static_cast<double>(n));
    const double floor_push =
        1.0 / (std::sqrt(static_cast<double>(n)) * std::pow(logn, 4));
    bool ok = true;
    while (state.lambda() <= l_n) {
      const StepRecord rec = state.step();
      if (rec.push_right < floor_push) {
        ok = false;
        break;
      }
    }
    suite.check("growth/minimal_push_floor", ok);
  }

  // Reflection metamorphic test: u -> 1-u swaps the endpoint sequences.
  {
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 4 && ok; ++seed) {
      GrowthState a(500, seed, 1.0);
      GrowthState b(500, seed, 1.0);
      b.set_mirrored(true);
      for (int i = 0; i < 10000; ++i) {
        a.step();
        b.step();
        if (a.left() != b.right() || a.right() != b.left()) {
          ok = false;
          break;
        }
      }
    }
    suite.check("growth/reflection_metamorphic_bitwise", ok);
  }

  // Capacity clock: hull capacity is k/(2n), measured conformally.
  {
    const std::uint64_t n = 100;
    const Trace trace = run_growth({n, 200, 5, 1, 1.0, false});
    bool ok = true;
    for (const std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{200}}) {
      const std::span<const double> prefix(trace.attachments.data(), k);
      const double expect = static_cast<double>(k) / (2.0 * static_cast<double>(n));
      const double est = hcap_estimate(prefix, n, 1000.0);
      if (std::abs(est - expect) > 0.01 * expect) ok = false;
    }
    suite.check("growth/capacity_clock", ok);
  }

  // Determinism: identical (n, seed, steps) yield byte-identical traces.
  {
    const Trace a = run_growth({777, 5000, 99, 1, 1.0, false});
    const Trace b = run_growth({777, 5000, 99, 1, 1.0, false});
    suite.check("growth/determinism", trace_to_csv(a) == trace_to_csv(b));
  }

  // Trace replay reproduces recorded endpoints bit for bit.
  {
    const Trace trace = run_growth({250, 4000, 12, 1, 1.0, false});
    const ReplayedEndpoints replayed = replay_endpoints(trace);
    bool ok = true;
    for (std::size_t i = 0; i < trace.ks.size(); ++i) {
      const std::size_t step = trace.ks[i] - 1;
      if (replayed.left[step] != trace.left[i] || replayed.right[step] != trace.right[i]) {
        ok = false;
      }
    }
    suite.check("growth/trace_replay_bitwise", ok);
  }
}

void hull_checks(Suite& suite) {
  // Height bound on sampled envelopes (deterministic theorem).
  {
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Trace trace = run_growth({100, 600, seed, 1, 8.0, false});
      const EnvelopePolyline env = envelope(trace.attachments, 100, 1e-4, 301);
      const double t = 600.0 / 200.0;
      if (max_height(env) > std::sqrt(2.0 * t) + env.eps + 1e-6) ok = false;
    }
    suite.check("hull/height_bound", ok);
  }

  // Envelope endpoint anchoring: true boundary points map onto the real axis.
  {
    const Trace trace = run_growth({100, 400, 9, 1, 4.0, false});
    const EnvelopePolyline env = envelope(trace.attachments, 100, 1e-5, 51);
    const ComplexPoint lo =
        compose_forward(ComplexPoint(env.s.front(), 0.0), trace.attachments, 100);
    const ComplexPoint hi =
        compose_forward(ComplexPoint(env.s.back(), 0.0), trace.attachments, 100);
    suite.check("hull/endpoint_anchoring",
                std::abs(lo.imag()) <= 2.0 * env.eps && std::abs(hi.imag()) <= 2.0 * env.eps);
  }

  // Diameter estimates never decrease under nested grid refinement.
  {
    const Trace trace = run_growth({100, 500, 21, 1, 4.0, false});
    double prev = 0.0;
    bool ok = true;
    for (const int m : {101, 201, 401}) {
      const double d = diameter(envelope(trace.attachments, 100, 1e-5, m));
      if (d + 1e-12 < prev) ok = false;
      prev = d;
    }
    suite.check("hull/diameter_grid_monotone", ok);
  }
}

void loewner_checks(Suite& suite) {
  // Point-mass oracle f_t(z) = sqrt(z^2 - 2t).
  {
    const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
    const double t = 1.0;
    const double root = std::sqrt(2.0 * t);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      const ComplexPoint z(-3.0 + 6.0 * (i % 5) / 4.0, 0.5 + 4.5 * (i / 5) / 4.0);
      const ComplexPoint exact = sqrt_upper((z - root) * (z + root));
      const ComplexPoint num = solve_characteristic(z, t, pm, 1e-3);
      worst = std::max(worst, std::abs(num - exact) / std::abs(exact));
    }
    suite.check("loewner/point_mass_oracle", worst <= 1e-6, "worst " + fmt(worst));
  }

  // Fourth-order convergence under step halving.
  {
    const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
    const ComplexPoint z(0.7, 0.6);
    const double root = std::sqrt(2.0);
    const ComplexPoint exact = sqrt_upper((z - root) * (z + root));
    double err[3];
    double h = 0.04;
    for (int i = 0; i < 3; ++i, h *= 0.5) {
      err[i] = std::abs(solve_characteristic_fixed(z, 1.0, pm, h) - exact);
    }
    const double r1 = err[0] / err[1], r2 = err[1] / err[2];
    suite.check("loewner/rk4_order",
                r1 >= 12.0 && r1 <= 20.0 && r2 >= 12.0 && r2 <= 20.0,
                "ratios " + fmt(r1) + ", " + fmt(r2));
  }

  // One empirical atom reproduces the elementary slit map.
  {
    const std::vector<double> atoms{0.0};
    const DrivingMeasure emp = DrivingMeasure::empirical(atoms, 4);
    const SlitParams p{0.0, 4};
    double worst = 0.0;
    for (const ComplexPoint z : {ComplexPoint(0.3, 0.8), ComplexPoint(-1.2, 0.5),
                                 ComplexPoint(2.0, 2.0)}) {
      const ComplexPoint num = solve_characteristic_fixed(z, 0.25, emp, 1e-4);
      worst = std::max(worst, std::abs(num - slit_forward(z, p)));
    }
    suite.check("loewner/single_atom_equivalence", worst <= 1e-8, "worst " + fmt(worst));

    const ComplexPoint exact = empirical_map_exact(atoms, 4, 0.25, ComplexPoint(0.3, 0.8));
    suite.check("loewner/empirical_exact_path",
                std::abs(exact - slit_forward(ComplexPoint(0.3, 0.8), p)) == 0.0);
  }

  // Capacity clock of the deterministic comparison flow.
  {
    const double logn = std::log(1e4);
    const DrivingMeasure uni = DrivingMeasure::uniform(
        [logn](double s) { return 0.5 * std::sqrt(s * logn); });
    const double cap = flow_capacity_estimate(uni, 1.0, 300.0, 1e-3);
    suite.check("loewner/flow_capacity_clock", std::abs(cap - 1.0) <= 0.01,
                "capacity " + fmt(cap));
  }
}

void disc_checks(Suite& suite) {
  // Mobius round trips on random exterior points.
  {
    Xoshiro256pp rng(5);
    double worst = 0.0;
    bool angle_ok = true;
    for (int i = 0; i < 1000; ++i) {
      const double r = 1.0 + 4.0 * rng.uniform();
      const double theta = 2.0 * std::numbers::pi * rng.uniform() - std::numbers::pi;
      const ComplexPoint z = std::polar(r, theta);
      const ComplexPoint back = mobius_from_halfplane(mobius_to_halfplane(z));
      worst = std::max(worst, std::abs(back - z) / std::abs(z));
      const double u = mobius_to_halfplane(std::polar(1.0, theta)).real();
      if (std::abs(u - (-std::tan(theta / 2.0))) > 1e-9 * (1.0 + std::abs(u))) {
        angle_ok = false;
      }
    }
    suite.check("disc/mobius_roundtrip", worst <= 1e-14, "worst " + fmt(worst));
    suite.check("disc/boundary_angle_identity", angle_ok);
  }

  // Conjugation consistency: one particle carries capacity 1/(2n) in the
  // half-plane picture. Evaluated through the production slit_inverse with a
  // cancellation-free rearrangement.
  {
    bool ok = true;
    for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{64}, std::uint64_t{1000}}) {
      const double c = 1.0 / static_cast<double>(n);
      const double y = 1e5;
      const SlitParams p{0.0, n};
      const double im = slit_inverse(ComplexPoint(0.0, y), p).imag();
      const double est = y * c / (y + im);
      if (std::abs(est - 0.5 * c) > 1e-10) ok = false;
    }
    suite.check("disc/conjugation_capacity", ok);
  }

  // Determinism and phased-vs-exact detection agreement at small n.
  {
    DiscRunOptions exact_opts;
    exact_opts.force_exact = true;
    DiscRunOptions phased_opts;
    phased_opts.exact_below = 0;  // force the probe-and-trigger path
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 3 && ok; ++seed) {
      const DiscRunResult a = disc_run(2000, seed, 0.5, 20000, exact_opts);
      const DiscRunResult b = disc_run(2000, seed, 0.5, 20000, phased_opts);
      const DiscRunResult c = disc_run(2000, seed, 0.5, 20000, exact_opts);
      ok = a.tau.has_value() && a.tau == b.tau && a.tau == c.tau;
    }
    suite.check("disc/detection_consistency", ok);
  }
}

void runner_checks(Suite& suite) {
  // Trace CSV round trip.
  {
    const Trace trace = run_growth({64, 300, 8, 1, 1.0, false});
    const std::string csv = trace_to_csv(trace);
    const Trace parsed = trace_from_csv(csv);
    suite.check("runner/trace_csv_roundtrip",
                parsed.n == trace.n && trace_to_csv(parsed) == csv);
  }

  // SVG output is byte-deterministic.
  {
    std::vector<SvgSeries> series(1);
    series[0].label = "probe";
    for (int i = 0; i < 50; ++i) {
      series[0].points.emplace_back(i, std::sin(0.3 * i));
    }
    suite.check("runner/svg_deterministic", emit_svg(series) == emit_svg(series));
  }

  // Ensemble summaries do not depend on scheduling.
  {
    RunConfig config;
    config.n = 400;
    config.t = 1.0;
    config.replicas = 3;
    config.seed = 17;
    const std::string a = ensemble_summary_to_json(run_ensemble(config));
    const std::string b = ensemble_summary_to_json(run_ensemble(config));
    suite.check("runner/ensemble_deterministic", a == b);
  }
}

}  // namespace

std::vector<CheckResult> run_verification_suite() {
  Suite suite;
  conformal_checks(suite);
  growth_checks(suite);
  hull_checks(suite);
  loewner_checks(suite);
  disc_checks(suite);
  runner_checks(suite);
  return suite.results;
}

}  // namespace chl
