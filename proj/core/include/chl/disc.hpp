#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chl/complex_maps.hpp"
#include "chl/growth.hpp"

namespace chl {

/// Mobius map i(z-1)/(z+1): exterior of the unit disc onto the upper
/// half-plane, unit circle to the real line, infinity to i, and the seed
/// boundary point 1 to 0. The pole z = -1 returns the explicit point at
/// infinity (inf, inf).
ComplexPoint mobius_to_halfplane(ComplexPoint z);

/// Inverse Mobius map (w + i)/(i - w).
ComplexPoint mobius_from_halfplane(ComplexPoint w);

/// Disc angle of the pullback of a half-plane boundary point: -2 atan(u).
double boundary_angle(double u);

/// Disc angle of the pullback of any half-plane point, in (-pi, pi].
double pullback_angle(ComplexPoint w);

/// Asymptotic first-arrival prediction 4 pi^2 n (1-alpha)^2 / log n.
/// Requires n >= 2 and alpha in (0, 1).
double tau_alpha_prediction(std::uint64_t n, double alpha);

/// Disc-variant state: the validated half-plane engine conjugated through
/// the Mobius map. Each particle carries half-plane capacity 1/(2n); the
/// mapped-out cluster is the boundary arc [arc_lo, arc_hi] around the seed
/// angle 0, pulled back from the interval [-L, R].
class DiscState {
 public:
  DiscState(std::uint64_t n, std::uint64_t seed);

  /// Advances one particle; returns its mapped-out attachment coordinate.
  double step();

  std::uint64_t n() const { return engine_.n(); }
  std::uint64_t k() const { return engine_.k(); }
  double left() const { return engine_.left(); }
  double right() const { return engine_.right(); }
  double arc_lo() const { return boundary_angle(right()); }
  double arc_hi() const { return boundary_angle(-left()); }
  const std::vector<double>& attachments() const { return attachments_; }

  /// Exact disc angle of particle j's attachment point (the base of its
  /// slit, pulled back through the maps grown before it). O(j) map
  /// evaluations.
  double attachment_angle(std::uint64_t j) const;

  /// Physical boundary point of the current cluster over preimage s.
  ComplexPoint boundary_point(double s) const;

 private:
  GrowthState engine_;
  std::vector<double> attachments_;
};

struct DiscTraceRow {
  std::uint64_t k = 0;
  double theta = 0.0;
  double arc_lo = 0.0;
  double arc_hi = 0.0;
};

struct DiscRunOptions {
  bool record_trace = false;  // exact per-step angles; O(k) work per step
  bool force_exact = false;   // check every attachment exactly from step 1
  std::uint64_t exact_below = 100000;  // n at or below this always runs exact

  // Screened detection (used above exact_below). A boundary-angle table is
  // probed every probe_stride steps; attachments are screened against it
  // through the cheap inner suffix map, and only candidates within
  // filter_guard of the target edge get the full O(k) exact check.
  // Screening begins once the sampled boundary angle is within filter_start
  // of the edge.
  int probe_points = 192;        // uniform boundary samples per probe
  int refine_points = 96;        // extra samples near the angular maximum
  std::uint64_t probe_stride = 8192;
  double filter_start = 0.15;    // radians before the edge
  double filter_guard = 0.12;    // screening slack, radians
  std::uint64_t audit_stride = 0;  // testing: exact-check every j-th step too

  double collision_gap = 1e-3;  // abort when the arms get this close
};

struct DiscRunResult {
  std::optional<std::uint64_t> tau;  // empty = NOT_REACHED
  bool arm_collision = false;
  std::uint64_t steps = 0;
  std::uint64_t exact_checks = 0;    // exact angle evaluations performed
  std::vector<DiscTraceRow> trace;   // filled when record_trace
};

/// Runs the disc variant until the first attachment whose disc angle lies in
/// [pi(1-alpha), pi(1+alpha)], up to max_steps. Requires 0 < alpha < 1.
DiscRunResult disc_run(std::uint64_t n, std::uint64_t seed, double alpha,
                       std::uint64_t max_steps, const DiscRunOptions& opts = {});

}  // namespace chl
