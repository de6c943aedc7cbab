#include "chl/loewner.hpp"

#include <algorithm>
#include <cmath>

#include "chl/parallel.hpp"

namespace chl {

DrivingMeasure DrivingMeasure::point_mass(double position) {
  DrivingMeasure m;
  m.kind_ = Kind::PointMass;
  m.position_ = position;
  return m;
}

DrivingMeasure DrivingMeasure::uniform(std::function<double(double)> half_width) {
  DrivingMeasure m;
  m.kind_ = Kind::Uniform;
  m.half_width_ = std::move(half_width);
  return m;
}

DrivingMeasure DrivingMeasure::empirical(std::vector<double> attachments,
                                         std::uint64_t n) {
  DrivingMeasure m;
  m.kind_ = Kind::Empirical;
  m.attachments_ = std::move(attachments);
  m.n_ = n;
  return m;
}

ComplexPoint DrivingMeasure::drift_unchecked(ComplexPoint z, double s) const {
  switch (kind_) {
    case Kind::PointMass:
      return 1.0 / (position_ - z);
    case Kind::Uniform: {
      const double a = half_width_(s);
      // (1/2a) log((a-z)/(-a-z)) with the continuous branch; for small a/z
      // the artanh series sidesteps both the log cancellation and a = 0.
      const ComplexPoint q = a / z;
      if (std::abs(q) < 1e-3) {
        const ComplexPoint q2 = q * q;
        return -(1.0 + q2 / 3.0 + q2 * q2 / 5.0) / z;
      }
      return std::log((a - z) / (-a - z)) / (2.0 * a);
    }
    case Kind::Empirical: {
      const auto idx = static_cast<std::uint64_t>(s * static_cast<double>(n_));
      if (idx >= attachments_.size()) return {0.0, 0.0};
      return 0.5 / (attachments_[idx] - z);
    }
  }
  return {0.0, 0.0};
}

ComplexPoint DrivingMeasure::drift(ComplexPoint z, double s) const {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument("driver_drift: requires Im(z) > 0");
  }
  return drift_unchecked(z, s);
}

std::vector<double> DrivingMeasure::switch_times(double t) const {
  std::vector<double> times;
  if (kind_ != Kind::Empirical) return times;
  const double nd = static_cast<double>(n_);
  const auto total = static_cast<std::uint64_t>(attachments_.size());
  for (std::uint64_t k = 1; k <= total; ++k) {
    const double s = static_cast<double>(k) / nd;
    if (s >= t) break;
    times.push_back(s);
  }
  return times;
}

/// Shared RK4 characteristic integrator. Backward mode integrates
/// w'(sigma) = drift(w, t - sigma) from sigma = 0 (w = z) to sigma = t,
/// which evaluates f_t(z); forward mode integrates w'(s) = -drift(w, s)
/// from s = 0 to t, which evaluates g_t(z) = f_t^{-1}(z). Integration is
/// split at atom switch times, and within a segment the empirical drift is
/// pinned to that segment's atom so stage evaluations at the segment edges
/// never read the neighboring atom.
ComplexPoint integrate_characteristic(ComplexPoint z, double t, double dt,
                                      const DrivingMeasure& measure, bool backward) {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument("solve_characteristic: requires Im(z) > 0");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("solve_characteristic: dt must be > 0");
  if (t == 0.0) return z;
  if (!(t > 0.0)) throw std::invalid_argument("solve_characteristic: t must be >= 0");

  // Segment boundaries in the integration variable.
  std::vector<double> cuts = measure.switch_times(t);
  if (backward) {
    for (double& s : cuts) s = t - s;
    std::reverse(cuts.begin(), cuts.end());
  }
  cuts.push_back(t);

  const double direction = backward ? 1.0 : -1.0;
  ComplexPoint w = z;
  double tau = 0.0;
  for (double edge : cuts) {
    const double len = edge - tau;
    if (!(len > 0.0)) continue;

    // Segment drift: fixed atom for empirical drivers, time lookup otherwise.
    const double s_mid = backward ? t - 0.5 * (tau + edge) : 0.5 * (tau + edge);
    double atom = 0.0;
    bool has_atom = false;
    if (measure.kind_ == DrivingMeasure::Kind::Empirical) {
      const auto idx =
          static_cast<std::uint64_t>(s_mid * static_cast<double>(measure.n_));
      has_atom = idx < measure.attachments_.size();
      if (has_atom) atom = measure.attachments_[idx];
    }
    const auto f = [&](ComplexPoint p, double at) -> ComplexPoint {
      if (measure.kind_ == DrivingMeasure::Kind::Empirical) {
        return has_atom ? direction * 0.5 / (atom - p) : ComplexPoint{};
      }
      return direction * measure.drift_unchecked(p, backward ? t - at : at);
    };

    const auto steps = static_cast<std::uint64_t>(std::ceil(len / dt));
    const double h = len / static_cast<double>(steps);
    const double floor_im = 10.0 * h;
    for (std::uint64_t i = 0; i < steps; ++i) {
      if (!(w.imag() >= floor_im)) {
        throw PrecisionError(
            "characteristic fell below the resolvable height 10*dt");
      }
      const double s0 = tau + static_cast<double>(i) * h;
      const ComplexPoint k1 = f(w, s0);
      const ComplexPoint k2 = f(w + 0.5 * h * k1, s0 + 0.5 * h);
      const ComplexPoint k3 = f(w + 0.5 * h * k2, s0 + 0.5 * h);
      const ComplexPoint k4 = f(w + h * k3, s0 + h);
      w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    tau = edge;
  }
  return w;
}

ComplexPoint solve_characteristic_fixed(ComplexPoint z, double t,
                                        const DrivingMeasure& measure, double dt) {
  return integrate_characteristic(z, t, dt, measure, /*backward=*/true);
}

ComplexPoint solve_characteristic(ComplexPoint z, double t,
                                  const DrivingMeasure& measure, double dt) {
  if (t == 0.0) return z;
  double h = dt;
  ComplexPoint coarse = integrate_characteristic(z, t, h, measure, true);
  while (true) {
    h *= 0.5;
    if (h < 1e-12) {
      throw PrecisionError("solve_characteristic: step halving did not converge");
    }
    const ComplexPoint fine = integrate_characteristic(z, t, h, measure, true);
    if (std::abs(fine - coarse) <= 1e-8) return fine;
    coarse = fine;
  }
}

ComplexPoint solve_inverse_characteristic(ComplexPoint z, double t,
                                          const DrivingMeasure& measure, double dt) {
  return integrate_characteristic(z, t, dt, measure, /*backward=*/false);
}

ComplexPoint deterministic_map(ComplexPoint z, double t, std::uint64_t n, double dt) {
  const double logn = std::log(static_cast<double>(n));
  const DrivingMeasure measure = DrivingMeasure::uniform(
      [logn](double s) { return 0.5 * std::sqrt(s * logn); });
  return solve_characteristic(z, t, measure, dt);
}

ComplexPoint empirical_map_exact(std::span<const double> attachments,
                                 std::uint64_t n, double t, ComplexPoint z) {
  if (!(t >= 0.0)) throw std::invalid_argument("empirical_map_exact: t must be >= 0");
  const double nd = static_cast<double>(n);
  const double total = t * nd;
  auto completed = static_cast<std::uint64_t>(total);
  if (completed > attachments.size()) completed = attachments.size();
  const double frac =
      completed < attachments.size() ? total - static_cast<double>(completed) : 0.0;

  // Innermost map first: the fractional slit of capacity frac/(2n), then the
  // completed particles from the latest back to the first.
  if (frac > 0.0) {
    z = slit_forward(z, attachments[completed], std::sqrt(frac / nd));
  }
  const double h = std::sqrt(1.0 / nd);
  for (std::uint64_t j = completed; j-- > 0;) {
    z = slit_forward(z, attachments[j], h);
  }
  return z;
}

double flow_capacity_estimate(const DrivingMeasure& measure, double t, double y,
                              double dt) {
  if (!(y > 0.0)) throw std::invalid_argument("flow_capacity_estimate: y must be > 0");
  const auto estimate_at = [&](double height) {
    const ComplexPoint iy(0.0, height);
    const ComplexPoint g = solve_inverse_characteristic(iy, t, measure, dt);
    return (iy * (g - iy)).real();
  };
  return 2.0 * estimate_at(2.0 * y) - estimate_at(y);
}

std::vector<DiscrepancyRow> discrepancy_report(std::span<const double> attachments,
                                               std::uint64_t n, double t,
                                               std::span<const ComplexPoint> grid,
                                               double dt) {
  for (const auto& z : grid) {
    if (!(z.imag() >= 0.1)) {
      throw std::invalid_argument("discrepancy_report: grid needs Im(z) >= 0.1");
    }
  }
  const auto particles =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(t * static_cast<double>(n)),
                              attachments.size());
  std::vector<DiscrepancyRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const ComplexPoint z = grid[i];
      const ComplexPoint phi =
          compose_forward(z, attachments.subspan(0, particles), n);
      const ComplexPoint f = deterministic_map(z, t, n, dt);
      rows[i] = DiscrepancyRow{z, std::abs(phi - f), std::abs(f - z)};
    }
  });
  return rows;
}

}  // namespace chl
