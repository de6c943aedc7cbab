#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chl/complex_maps.hpp"

namespace chl {

/// Image of the horizontal line Im = eps under the composed cluster map,
/// sampled at m preimage points spanning the allowed interval [-L_K, R_K].
/// Points are ordered by the real preimage coordinate.
struct EnvelopePolyline {
  std::vector<double> s;            // preimage coordinates
  std::vector<ComplexPoint> points; // images of s_i + i*eps
  double eps = 0.0;
  std::uint64_t k = 0;              // particle count
  std::uint64_t n = 1;
};

/// Evaluates the envelope of the cluster grown by `attachments`. Endpoints
/// L_K, R_K come from replaying the closed-form recursion. Grid points are
/// evaluated concurrently; the result is ordered by s and deterministic.
/// Cost O(m * K). Requires eps > 0 and m >= 2.
EnvelopePolyline envelope(std::span<const double> attachments, std::uint64_t n,
                          double eps, int m);

/// Maximum pairwise distance over the envelope points, via convex hull and
/// rotating calipers. Lower-bounds the true cluster diameter; converges as
/// eps -> 0 and m -> infinity. Throws on fewer than two points.
double diameter(const EnvelopePolyline& env);

/// Largest imaginary part over the envelope points. For a cluster of
/// capacity t = k/(2n) this never exceeds sqrt(2t) + eps + numerical slack.
double max_height(const EnvelopePolyline& env);

/// Half-plane capacity estimate of the cluster: Richardson-extrapolated
/// Re(iy (Gamma(iy) - iy)) at heights y and 2y. Equals k/(2n) up to
/// O(1/y^2). Requires y >= 100 * max(1, lambda_K).
double hcap_estimate(std::span<const double> attachments, std::uint64_t n, double y);

struct GeometrySummary {
  double diameter = 0.0;
  double max_height = 0.0;
  double hcap = 0.0;
  double t = 0.0;  // capacity clock k/(2n)
};

/// Convenience bundle: envelope-based diameter and height plus the capacity
/// estimate at y = 100 * max(1, lambda_K).
GeometrySummary summarize_geometry(std::span<const double> attachments,
                                   std::uint64_t n, double eps, int m);

}  // namespace chl
