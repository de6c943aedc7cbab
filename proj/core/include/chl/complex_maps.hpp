#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace chl {

/// Points of the closed upper half-plane. Forward and inverse slit maps take
/// and return values with Im >= 0; real-axis inputs are treated as boundary
/// points and get sign-preserving real formulas.
using ComplexPoint = std::complex<double>;

/// One elementary slit map: grows a vertical slit of height 1/sqrt(n) and
/// half-plane capacity 1/(2n) at the attachment point x on the real line.
struct SlitParams {
  double x = 0.0;
  std::uint64_t n = 1;

  double height() const { return std::sqrt(1.0 / static_cast<double>(n)); }
  double capacity() const { return 0.5 / static_cast<double>(n); }
};

/// Square root with the Im >= 0 branch; nonnegative real inputs get the
/// nonnegative real root. Total on all of C.
ComplexPoint sqrt_upper(ComplexPoint w);

/// Forward slit map x + sqrt((z-x)^2 - 1/n), mapping H conformally onto H
/// minus the vertical slit [x, x + i/sqrt(n)]. The argument of the square
/// root is always evaluated in factored form (z-x-h)(z-x+h), which is exact
/// near the branch points where the squared form cancels catastrophically.
ComplexPoint slit_forward(ComplexPoint z, const SlitParams& p);

/// Mapping-out function of a single slit: x + sqrt((w-x)^2 + 1/n) with the
/// Im >= 0 branch off the real axis and the sign-preserving real formula on
/// it. Inverse of slit_forward on the closure of H minus the open slit.
ComplexPoint slit_inverse(ComplexPoint w, const SlitParams& p);

/// Slit maps of arbitrary height (capacity height^2 / 2); the SlitParams
/// overloads forward here with height 1/sqrt(n).
ComplexPoint slit_forward(ComplexPoint z, double x, double height);
ComplexPoint slit_inverse(ComplexPoint w, double x, double height);

/// Composed cluster map: applies the slit maps innermost first (last
/// attachment first), so every intermediate value stays in the closed upper
/// half-plane and the branch choice is consistent throughout.
ComplexPoint compose_forward(ComplexPoint z, std::span<const double> attachments,
                             std::uint64_t n);

/// Composed mapping-out function: slit inverses outermost first (first
/// attachment first). Inputs inside the cluster hull are the caller's
/// responsibility; see the module contract.
ComplexPoint compose_inverse(ComplexPoint w, std::span<const double> attachments,
                             std::uint64_t n);

/// Interval endpoints after an attachment, as the pair (left, right), where
/// the allowed interval is [-left, right].
struct Endpoints {
  double left = 0.0;
  double right = 0.0;
};

/// Stable front push sqrt(d^2 + 1/n) - d for a front at distance d >= 0 from
/// the attachment. Computed as (1/n)/(sqrt(d^2+1/n)+d) so the value keeps
/// full relative precision even when d is large and the push is tiny.
double front_push(double distance, std::uint64_t n);

/// Closed-form endpoint recursion: right' = x + sqrt((right-x)^2 + 1/n) and
/// left' = -x + sqrt((left+x)^2 + 1/n). Both endpoints strictly increase and
/// each increases by at most 1/sqrt(n). The two sides are evaluated with
/// mirror-symmetric floating expressions, so
///   endpoint_update(L, R, x, n) == swap(endpoint_update(R, L, -x, n))
/// holds bitwise.
/// Throws std::invalid_argument when x lies outside [-left, right].
Endpoints endpoint_update(double left, double right, double x, std::uint64_t n);

/// Deterministic bracket for the front push of one particle at distance
/// d = right - x >= 1/sqrt(n):
///   hi = 1/(2nd),  lo = hi - (1/8)/(n^2 d^3),
/// valid because the Taylor series of sqrt(d^2 + 1/n) alternates for
/// d >= 1/sqrt(n). Throws std::domain_error when d < 1/sqrt(n).
struct PushBounds {
  double lo = 0.0;
  double hi = 0.0;
};
PushBounds push_bounds(double right, double x, std::uint64_t n);

}  // namespace chl
