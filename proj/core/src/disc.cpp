#include "chl/disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chl {

namespace {
constexpr double kPi = std::numbers::pi;
}

ComplexPoint mobius_to_halfplane(ComplexPoint z) {
  if (z == ComplexPoint(-1.0, 0.0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return ComplexPoint(0.0, 1.0) * (z - 1.0) / (z + 1.0);
}

ComplexPoint mobius_from_halfplane(ComplexPoint w) {
  const ComplexPoint i(0.0, 1.0);
  return (w + i) / (i - w);
}

double boundary_angle(double u) { return -2.0 * std::atan(u); }

double pullback_angle(ComplexPoint w) { return std::arg(mobius_from_halfplane(w)); }

double tau_alpha_prediction(std::uint64_t n, double alpha) {
  if (n < 2) throw std::invalid_argument("tau_alpha_prediction: requires n >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("tau_alpha_prediction: alpha must lie in (0, 1)");
  }
  const double nd = static_cast<double>(n);
  const double one_minus = 1.0 - alpha;
  return 4.0 * kPi * kPi * nd * one_minus * one_minus / std::log(nd);
}

DiscState::DiscState(std::uint64_t n, std::uint64_t seed) : engine_(n, seed) {
  attachments_.push_back(0.0);  // seed particle at disc angle 0
}

double DiscState::step() {
  const StepRecord rec = engine_.step();
  attachments_.push_back(rec.x);
  return rec.x;
}

double DiscState::attachment_angle(std::uint64_t j) const {
  if (j < 1 || j > attachments_.size()) {
    throw std::invalid_argument("attachment_angle: particle index out of range");
  }
  const std::span<const double> earlier(attachments_.data(), j - 1);
  const ComplexPoint base =
      compose_forward(ComplexPoint(attachments_[j - 1], 0.0), earlier, n());
  return pullback_angle(base);
}

ComplexPoint DiscState::boundary_point(double s) const {
  return compose_forward(ComplexPoint(s, 0.0), attachments_, n());
}

namespace {

/// Sampled boundary-angle table: pullback angles of Phi_{k0} over preimage
/// points of [-L_{k0}, R_{k0}], with extra resolution near the angular
/// maximum. Sorted by s.
struct BoundaryTable {
  std::uint64_t k0 = 0;
  std::vector<double> s;
  std::vector<double> theta;   // pullback angle at s (signed)
  double left_max = 0.0;       // largest positive angle (left arm)
  double right_max = 0.0;      // largest -angle (right arm)
  double abs_max = 0.0;
  double cell = 0.0;           // uniform stage spacing

  struct LocalView {
    double abs_max = 0.0;
    double roughness = 0.0;  // largest adjacent |theta| jump in the window
  };

  /// Largest |theta| and adjacent-sample jump over samples within
  /// |s_i - s0| <= w, widened to the bracketing neighbors when empty.
  LocalView local_view(double s0, double w) const {
    auto lo = std::lower_bound(s.begin(), s.end(), s0 - w);
    auto hi = std::upper_bound(s.begin(), s.end(), s0 + w);
    if (lo != s.begin()) --lo;  // include the bracketing samples
    if (hi != s.end()) ++hi;
    LocalView view;
    double prev = 0.0;
    bool first = true;
    for (auto it = lo; it != hi; ++it) {
      const double th = theta[static_cast<std::size_t>(it - s.begin())];
      view.abs_max = std::max(view.abs_max, std::abs(th));
      if (!first) view.roughness = std::max(view.roughness, std::abs(th - prev));
      prev = th;
      first = false;
    }
    return view;
  }
};

BoundaryTable build_table(const DiscState& state, int uniform_points,
                          int refine_points) {
  BoundaryTable table;
  table.k0 = state.k();
  const double left = state.left();
  const double span = left + state.right();
  table.cell = span / static_cast<double>(uniform_points - 1);

  std::vector<std::pair<double, double>> samples;
  samples.reserve(static_cast<std::size_t>(uniform_points + refine_points));
  const auto sample = [&](double s) {
    const double theta = pullback_angle(state.boundary_point(s));
    samples.emplace_back(s, theta);
    if (theta >= 0.0) {
      table.left_max = std::max(table.left_max, theta);
    } else {
      table.right_max = std::max(table.right_max, -theta);
    }
  };

  for (int i = 0; i < uniform_points; ++i) {
    sample(-left + table.cell * static_cast<double>(i));
  }

  // Refine around the cells carrying the largest angles: splits the top
  // windows so the tip regions are resolved well below the screening guard.
  if (refine_points > 0) {
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(samples[a].second) > std::abs(samples[b].second);
    });
    const std::size_t windows = 6;
    const int per_window = refine_points / static_cast<int>(windows);
    for (std::size_t w = 0; w < windows && w < order.size(); ++w) {
      const double center = samples[order[w]].first;
      for (int i = 0; i < per_window; ++i) {
        const double offset = table.cell * (static_cast<double>(i + 1) /
                                                static_cast<double>(per_window + 1) -
                                            0.5) *
                              2.0;
        const double s = std::clamp(center + offset, -left, -left + span);
        sample(s);
      }
    }
  }

  std::sort(samples.begin(), samples.end());
  table.s.reserve(samples.size());
  table.theta.reserve(samples.size());
  for (const auto& [s, theta] : samples) {
    table.s.push_back(s);
    table.theta.push_back(theta);
  }
  table.abs_max = std::max(table.left_max, table.right_max);
  return table;
}

}  // namespace

DiscRunResult disc_run(std::uint64_t n, std::uint64_t seed, double alpha,
                       std::uint64_t max_steps, const DiscRunOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("disc_run: alpha must lie in (0, 1)");
  }
  if (max_steps == 0) throw std::invalid_argument("disc_run: max_steps must be >= 1");

  const double edge = kPi * (1.0 - alpha);
  DiscState state(n, seed);
  DiscRunResult result;

  const bool exact =
      opts.force_exact || opts.record_trace || n <= opts.exact_below;

  auto record = [&](std::uint64_t k, double theta) {
    if (opts.record_trace) {
      result.trace.push_back(DiscTraceRow{k, theta, state.arc_lo(), state.arc_hi()});
    }
  };

  const auto exact_hit = [&](std::uint64_t j) {
    ++result.exact_checks;
    const double theta = state.attachment_angle(j);
    record(j, theta);
    return std::abs(theta) >= edge;
  };

  // Particle 1 sits at angle 0, outside the target arc for every alpha < 1.
  record(1, 0.0);
  result.steps = 1;

  if (exact) {
    for (std::uint64_t k = 2; k <= max_steps; ++k) {
      state.step();
      result.steps = k;
      if (exact_hit(k)) {
        result.tau = k;
        return result;
      }
      if (k % 8192 == 0) {
        const BoundaryTable table = build_table(state, opts.probe_points, 0);
        if ((kPi - table.left_max) + (kPi - table.right_max) < opts.collision_gap) {
          result.arm_collision = true;
          return result;
        }
      }
    }
    return result;
  }

  // Screened detection. Phase one probes the boundary-angle table at an
  // adaptive cadence until the sampled maximum reaches edge - filter_start;
  // no attachment can land in the target arc while the boundary itself is
  // clear of it. Phase two rebuilds the table on a fixed cadence and screens
  // every attachment: its base point is pushed through the cheap suffix map
  // onto the table's picture, and only attachments whose table neighborhood
  // reaches the edge minus an allowance pay the exact O(k) check. The
  // allowance covers the three ways the table can under-read a hit: static
  // sampling slack (filter_guard floor), local boundary roughness (adjacent
  // sample jumps), and table staleness (frontier advance since the table
  // was built, at twice the ratcheted growth rate).
  BoundaryTable table = build_table(state, opts.probe_points, opts.refine_points);
  bool screening = table.abs_max >= edge - opts.filter_start;
  double rate = 1e-9;
  const std::uint64_t screen_stride = std::clamp<std::uint64_t>(
      n / 64, 256, std::max<std::uint64_t>(opts.probe_stride, 256));

  const auto collision = [&]() {
    return (kPi - table.left_max) + (kPi - table.right_max) < opts.collision_gap;
  };

  const auto refresh_rate = [&](const BoundaryTable& prev) {
    const double observed =
        (table.abs_max - prev.abs_max) /
        static_cast<double>(std::max<std::uint64_t>(table.k0 - prev.k0, 1));
    rate = std::max({observed, 0.5 * rate, 1e-9});
  };

  std::uint64_t next_probe = state.k() + 16;
  for (std::uint64_t k = 2; k <= max_steps; ++k) {
    state.step();
    result.steps = k;

    if (screening) {
      const std::span<const double> suffix(state.attachments().data() + table.k0,
                                           k - 1 - table.k0);
      const ComplexPoint y = compose_forward(
          ComplexPoint(state.attachments()[k - 1], 0.0), suffix, n);
      const double window = std::max(2.0 * table.cell, 4.0 * y.imag());
      const BoundaryTable::LocalView view = table.local_view(y.real(), window);
      const double staleness =
          2.0 * rate * static_cast<double>(k - table.k0);
      const double allowance =
          opts.filter_guard + 2.0 * view.roughness + staleness;
      const bool candidate = view.abs_max >= edge - allowance;
      const bool audited = opts.audit_stride != 0 && k % opts.audit_stride == 0;
      if ((candidate || audited) && exact_hit(k)) {
        result.tau = k;
        return result;
      }
      if (k >= next_probe) {
        const BoundaryTable prev = std::move(table);
        table = build_table(state, opts.probe_points, opts.refine_points);
        refresh_rate(prev);
        if (collision()) {
          result.arm_collision = true;
          return result;
        }
        next_probe = k + screen_stride;
      }
      continue;
    }

    if (k >= next_probe) {
      const BoundaryTable prev = std::move(table);
      table = build_table(state, opts.probe_points, opts.refine_points);
      refresh_rate(prev);
      if (collision()) {
        result.arm_collision = true;
        return result;
      }
      if (table.abs_max >= edge - opts.filter_start) {
        screening = true;
        next_probe = k + screen_stride;
        continue;
      }
      // Next probe after a quarter of the projected distance to the
      // screening threshold, floored so early fast growth cannot overshoot
      // the whole screening band between two probes.
      const double remaining = (edge - opts.filter_start) - table.abs_max;
      const double stride =
          std::clamp(0.25 * remaining / rate, 16.0,
                     std::max(1024.0, static_cast<double>(n) / 64.0));
      next_probe = k + static_cast<std::uint64_t>(stride);
    }
  }
  return result;  // NOT_REACHED
}

}  // namespace chl
