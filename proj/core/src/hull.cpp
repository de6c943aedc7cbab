#include "chl/hull.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chl/growth.hpp"
#include "chl/parallel.hpp"

namespace chl {

namespace {

struct Pt {
  double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Andrew monotone chain; returns hull in counterclockwise order without the
/// repeated first point. Collinear points are dropped.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Pt> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double sq_dist(const Pt& a, const Pt& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Rotating calipers over a counterclockwise convex polygon.
double hull_diameter(const std::vector<Pt>& hull) {
  const std::size_t n = hull.size();
  if (n == 1) return 0.0;
  if (n == 2) return std::sqrt(sq_dist(hull[0], hull[1]));
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = hull[i];
    const Pt& b = hull[(i + 1) % n];
    const Pt edge{b.x - a.x, b.y - a.y};
    // Advance the antipodal point while it still moves away from edge i.
    while (true) {
      const Pt& c = hull[j];
      const Pt& d = hull[(j + 1) % n];
      if (edge.x * (d.y - c.y) - edge.y * (d.x - c.x) > 0) {
        j = (j + 1) % n;
      } else {
        break;
      }
    }
    best = std::max(best, sq_dist(a, hull[j]));
    best = std::max(best, sq_dist(b, hull[j]));
  }
  return std::sqrt(best);
}

/// Final (left, right) of the cluster by the closed-form recursion.
Endpoints final_endpoints(std::span<const double> attachments, std::uint64_t n) {
  if (attachments.empty()) return Endpoints{0.0, 0.0};
  const double h = std::sqrt(1.0 / static_cast<double>(n));
  Endpoints e{h, h};
  for (std::size_t k = 1; k < attachments.size(); ++k) {
    e = endpoint_update(e.left, e.right, attachments[k], n);
  }
  return e;
}

}  // namespace

EnvelopePolyline envelope(std::span<const double> attachments, std::uint64_t n,
                          double eps, int m) {
  if (!(eps > 0.0)) throw std::invalid_argument("envelope: eps must be > 0");
  if (m < 2) throw std::invalid_argument("envelope: need at least 2 grid points");

  const Endpoints ends = final_endpoints(attachments, n);

  EnvelopePolyline env;
  env.eps = eps;
  env.k = attachments.size();
  env.n = n;
  env.s.resize(m);
  env.points.resize(m);
  const double span = ends.left + ends.right;
  for (int i = 0; i < m; ++i) {
    env.s[i] = -ends.left + span * static_cast<double>(i) / static_cast<double>(m - 1);
  }
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      env.points[i] = compose_forward(ComplexPoint(env.s[i], eps), attachments, n);
    }
  });
  return env;
}

double diameter(const EnvelopePolyline& env) {
  if (env.points.size() < 2) {
    throw std::invalid_argument("diameter: need at least 2 envelope points");
  }
  std::vector<Pt> pts;
  pts.reserve(env.points.size());
  for (const auto& p : env.points) pts.push_back(Pt{p.real(), p.imag()});
  return hull_diameter(convex_hull(std::move(pts)));
}

double max_height(const EnvelopePolyline& env) {
  if (env.points.empty()) throw std::invalid_argument("max_height: empty envelope");
  double best = 0.0;
  for (const auto& p : env.points) best = std::max(best, p.imag());
  return best;
}

double hcap_estimate(std::span<const double> attachments, std::uint64_t n, double y) {
  const Endpoints ends = final_endpoints(attachments, n);
  const double lambda = ends.left + ends.right;
  if (!(y >= 100.0 * std::max(1.0, lambda))) {
    throw std::invalid_argument("hcap_estimate: y below 100 * max(1, lambda_K)");
  }
  const auto estimate_at = [&](double height) {
    const ComplexPoint iy(0.0, height);
    const ComplexPoint g = compose_inverse(iy, attachments, n);
    return (iy * (g - iy)).real();
  };
  // One Richardson step kills the 1/y term of the expansion.
  return 2.0 * estimate_at(2.0 * y) - estimate_at(y);
}

GeometrySummary summarize_geometry(std::span<const double> attachments,
                                   std::uint64_t n, double eps, int m) {
  const EnvelopePolyline env = envelope(attachments, n, eps, m);
  GeometrySummary summary;
  summary.diameter = diameter(env);
  summary.max_height = max_height(env);
  const double lambda = env.s.back() - env.s.front();
  summary.hcap = hcap_estimate(attachments, n, 100.0 * std::max(1.0, lambda));
  summary.t = static_cast<double>(attachments.size()) / (2.0 * static_cast<double>(n));
  return summary;
}

}  // namespace chl
