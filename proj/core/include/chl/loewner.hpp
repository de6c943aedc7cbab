#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chl/complex_maps.hpp"

namespace chl {

/// Raised when a characteristic sinks below the resolvable height 10*dt (or
/// the step-halving control runs out of headroom). Reported, never silently
/// continued.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Family of boundary measures driving a Loewner-Kufarev evolution.
///
/// Kinds:
///  - point_mass(p): unit mass at p, for all times.
///  - uniform(a):    unit mass spread over [-a(s), a(s)] at time s.
///  - empirical(xs, n): the attachment atoms of a run; atom x_k is active on
///    the time interval [(k-1)/n, k/n) and carries mass 1/2, so each
///    interval deposits capacity 1/(2n) and the flow at time k/n equals the
///    k-particle composed map. (Unit-mass atoms would give every particle
///    capacity 1/n, which contradicts the slit normalization.)
class DrivingMeasure {
 public:
  static DrivingMeasure point_mass(double position);
  static DrivingMeasure uniform(std::function<double(double)> half_width);
  static DrivingMeasure empirical(std::vector<double> attachments, std::uint64_t n);

  /// Integral of 1/(x - z) against the measure at time s (times the atom
  /// mass for the empirical kind). Throws std::invalid_argument for
  /// Im(z) <= 0, where the integrand is singular on the support.
  ComplexPoint drift(ComplexPoint z, double s) const;

  /// Atom switch times in (0, t), ascending; empty for smooth kinds.
  std::vector<double> switch_times(double t) const;

  bool is_empirical() const { return kind_ == Kind::Empirical; }
  const std::vector<double>& attachments() const { return attachments_; }
  std::uint64_t n() const { return n_; }

 private:
  enum class Kind { PointMass, Uniform, Empirical };

  ComplexPoint drift_unchecked(ComplexPoint z, double s) const;
  friend ComplexPoint integrate_characteristic(ComplexPoint, double, double,
                                               const DrivingMeasure&, bool);

  Kind kind_ = Kind::PointMass;
  double position_ = 0.0;
  std::function<double(double)> half_width_;
  std::vector<double> attachments_;
  std::uint64_t n_ = 1;
};

/// Free-function form of the drift.
inline ComplexPoint driver_drift(ComplexPoint z, const DrivingMeasure& measure,
                                 double s) {
  return measure.drift(z, s);
}

/// f_t(z) by backward characteristics with classical RK4 at fixed step dt
/// (integration is split exactly at atom switch times). The fixed-step form
/// exists so convergence order can be measured directly.
ComplexPoint solve_characteristic_fixed(ComplexPoint z, double t,
                                        const DrivingMeasure& measure, double dt);

/// f_t(z) with step-halving error control: halves dt until two successive
/// results agree to 1e-8, then returns the finer one.
ComplexPoint solve_characteristic(ComplexPoint z, double t,
                                  const DrivingMeasure& measure, double dt);

/// g_t(z) = f_t^{-1}(z) by the forward characteristic from z.
ComplexPoint solve_inverse_characteristic(ComplexPoint z, double t,
                                          const DrivingMeasure& measure, double dt);

/// The deterministic comparison map: the flow driven by the uniform measure
/// of half-width a(s) = sqrt(s log n)/2. The s = 0 endpoint is regular (the
/// drift degenerates to the point-mass limit -1/z).
ComplexPoint deterministic_map(ComplexPoint z, double t, std::uint64_t n, double dt);

/// Default integrator step for a horizon t: 1e-4 * max(1, t).
inline double default_dt(double t) { return 1e-4 * (t > 1.0 ? t : 1.0); }

/// Exact evaluation of the empirical flow at time t: composition of the
/// completed slit maps with one partial-capacity slit for the fractional
/// atom interval. This is the production path for empirical drivers; the
/// numeric integrator is kept for validation.
ComplexPoint empirical_map_exact(std::span<const double> attachments,
                                 std::uint64_t n, double t, ComplexPoint z);

/// Capacity of the flow at time t: Richardson-extrapolated
/// Re(iy (g_t(iy) - iy)) using the inverse characteristic direction.
/// Equals t for a unit-mass driver.
double flow_capacity_estimate(const DrivingMeasure& measure, double t, double y,
                              double dt);

struct DiscrepancyRow {
  ComplexPoint z;
  double phi_minus_f = 0.0;  // |Phi_{floor(nt)}(z) - f_t(z)|
  double f_minus_id = 0.0;   // |f_t(z) - z|
};

/// Per-grid-point discrepancy between the random cluster map and the
/// deterministic comparison flow. Emitted as data; no threshold is attached.
/// Grid points must satisfy Im(z) >= 0.1.
std::vector<DiscrepancyRow> discrepancy_report(std::span<const double> attachments,
                                               std::uint64_t n, double t,
                                               std::span<const ComplexPoint> grid,
                                               double dt);

}  // namespace chl
