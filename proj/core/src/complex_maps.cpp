#include "chl/complex_maps.hpp"

#include <cmath>
#include <stdexcept>

namespace chl {

namespace {

/// Forward slit map with precomputed height h = 1/sqrt(n). The square-root
/// argument (z-x)^2 - h^2 is assembled from scalar parts: the real part in
/// the form factored at the branch points +-h, the imaginary part as the
/// single product 2 Re(d) Im(d), which keeps its sign down to denormals.
inline ComplexPoint slit_forward_h(ComplexPoint z, double x, double h) {
  const double dre = z.real() - x;
  const double dim = z.imag();
  if (dim == 0.0) {
    if (dre <= -h) return {x - std::sqrt((dre - h) * (dre + h)), 0.0};
    if (dre >= h) return {x + std::sqrt((dre - h) * (dre + h)), 0.0};
    // Inside the base interval: the point climbs onto the slit.
    return {x, std::sqrt((h - dre) * (h + dre))};
  }
  const ComplexPoint s =
      sqrt_upper({(dre - h) * (dre + h) - dim * dim, 2.0 * dre * dim});
  return {x + s.real(), s.imag()};
}

/// Inverse slit map with precomputed height h. Argument (w-x)^2 + h^2 with
/// the real part factored at the branch points +-ih.
inline ComplexPoint slit_inverse_h(ComplexPoint w, double x, double h) {
  const double dre = w.real() - x;
  const double dim = w.imag();
  if (dim == 0.0) {
    if (dre == 0.0) return {x, 0.0};  // seam between the two base prime ends
    const double m = std::sqrt(dre * dre + h * h);
    return {dre < 0.0 ? x - m : x + m, 0.0};
  }
  const double pre = dre * dre - (dim - h) * (dim + h);
  const double pim = 2.0 * dre * dim;
  if (pim == 0.0 && pre > 0.0) {
    // The map contracts heights near the seam quadratically, so Im(w) can
    // underflow out of the product. The positive-real root is ambiguous and
    // must keep the prime-end side of Re(d); from here on the orbit
    // continues on the boundary formulas. (Products on the negative real
    // axis are the points straight above the slit; sqrt_upper handles them.)
    const double m = std::sqrt(pre);
    return {dre < 0.0 ? x - m : x + m, 0.0};
  }
  const ComplexPoint s = sqrt_upper({pre, pim});
  return {x + s.real(), s.imag()};
}

}  // namespace

ComplexPoint sqrt_upper(ComplexPoint w) {
  const double a = w.real();
  const double b = w.imag();
  if (b == 0.0) {
    if (a >= 0.0) return {std::sqrt(a), 0.0};
    return {0.0, std::sqrt(-a)};
  }
  const double r = std::sqrt(a * a + b * b);
  // Split on sign(a) so the half-angle formula never cancels.
  if (a >= 0.0) {
    const double re = std::sqrt(0.5 * (r + a));
    const double im = 0.5 * b / re;
    return im < 0.0 ? ComplexPoint(-re, -im) : ComplexPoint(re, im);
  }
  const double im = std::sqrt(0.5 * (r - a));
  const double re = 0.5 * std::abs(b) / im;
  // Principal root carries sign(b) on the imaginary part; flip into Im >= 0.
  return b < 0.0 ? ComplexPoint(-re, im) : ComplexPoint(re, im);
}

ComplexPoint slit_forward(ComplexPoint z, const SlitParams& p) {
  return slit_forward_h(z, p.x, p.height());
}

ComplexPoint slit_inverse(ComplexPoint w, const SlitParams& p) {
  return slit_inverse_h(w, p.x, p.height());
}

ComplexPoint slit_forward(ComplexPoint z, double x, double height) {
  return slit_forward_h(z, x, height);
}

ComplexPoint slit_inverse(ComplexPoint w, double x, double height) {
  return slit_inverse_h(w, x, height);
}

ComplexPoint compose_forward(ComplexPoint z, std::span<const double> attachments,
                             std::uint64_t n) {
  const double h = std::sqrt(1.0 / static_cast<double>(n));
  std::size_t i = attachments.size();

  // Boundary orbits stay on the real axis until they enter a slit's base
  // window; run them through the plain real recursion until then. This is
  // the hot path of the disc-angle probes.
  if (z.imag() == 0.0) {
    double u = z.real();
    while (i > 0) {
      const double x = attachments[i - 1];
      const double d = u - x;
      if (d >= h) {
        u = x + std::sqrt((d - h) * (d + h));
      } else if (d <= -h) {
        u = x - std::sqrt((d - h) * (d + h));
      } else {
        break;  // climbs onto this slit; continue on the complex path
      }
      --i;
    }
    if (i == 0) return {u, 0.0};
    z = ComplexPoint(u, 0.0);
  }

  while (i > 0) {
    z = slit_forward_h(z, attachments[i - 1], h);
    --i;
  }
  return z;
}

ComplexPoint compose_inverse(ComplexPoint w, std::span<const double> attachments,
                             std::uint64_t n) {
  const double h = std::sqrt(1.0 / static_cast<double>(n));
  for (double x : attachments) {
    w = slit_inverse_h(w, x, h);
  }
  return w;
}

double front_push(double distance, std::uint64_t n) {
  const double c = 1.0 / static_cast<double>(n);
  return c / (std::sqrt(distance * distance + c) + distance);
}

Endpoints endpoint_update(double left, double right, double x, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("endpoint_update: n must be >= 1");
  if (!(x >= -left && x <= right)) {
    throw std::invalid_argument("endpoint_update: x outside [-left, right]");
  }
  // The two fronts use the same expression shape on mirrored inputs, which
  // makes endpoint_update(L,R,x,n) == swap(endpoint_update(R,L,-x,n)) exact.
  const double dist_right = right - x;
  const double dist_left = left + x;
  return Endpoints{left + front_push(dist_left, n),
                   right + front_push(dist_right, n)};
}

PushBounds push_bounds(double right, double x, std::uint64_t n) {
  const double nd = static_cast<double>(n);
  const double d = right - x;
  if (!(d >= std::sqrt(1.0 / nd))) {
    throw std::domain_error("push_bounds: requires right - x >= 1/sqrt(n)");
  }
  const double hi = 1.0 / (2.0 * nd * d);
  const double lo = hi - 0.125 / (nd * nd * d * d * d);
  return PushBounds{lo, hi};
}

}  // namespace chl
