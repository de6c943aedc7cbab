#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "chl/complex_maps.hpp"
#include "chl/rng.hpp"

using chl::ComplexPoint;
using chl::SlitParams;

namespace {

/// Independent oracle: square root by long-double polar decomposition with
/// the Im >= 0 branch selected afterwards. Never touches the library path.
ComplexPoint polar_sqrt_upper(ComplexPoint w) {
  const long double a = w.real();
  const long double b = w.imag();
  const long double r = std::sqrt(a * a + b * b);
  const long double mag = std::sqrt(r);
  const long double half = std::atan2(b, a) / 2.0L;
  long double re = mag * std::cos(half);
  long double im = mag * std::sin(half);
  if (im < 0.0L || (im == 0.0L && re < 0.0L)) {
    re = -re;
    im = -im;
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

double rel_err(ComplexPoint got, ComplexPoint want) {
  return std::abs(got - want) / (1.0 + std::abs(want));
}

}  // namespace

TEST_CASE("sqrt_upper picks the upper-half-plane root") {
  // Negative real axis lands on the positive imaginary axis.
  CHECK(rel_err(chl::sqrt_upper({-2.0, 0.0}), {0.0, std::sqrt(2.0)}) < 1e-15);
  // Nonnegative real input keeps the nonnegative real root.
  CHECK(chl::sqrt_upper({4.0, 0.0}) == ComplexPoint(2.0, 0.0));
  // Lower-half-plane argument: frozen from the polar oracle.
  const ComplexPoint frozen(-1.7320511924688429, 0.0011547002817793315);
  CHECK(rel_err(chl::sqrt_upper({3.0, -0.004}), frozen) < 1e-15);

  chl::Xoshiro256pp rng(2024);
  for (int i = 0; i < 5000; ++i) {
    const ComplexPoint w(-10.0 + 20.0 * rng.uniform(), -10.0 + 20.0 * rng.uniform());
    const ComplexPoint s = chl::sqrt_upper(w);
    CHECK(s.imag() >= 0.0);
    CHECK(std::abs(s * s - w) <= 1e-14 * (1.0 + std::abs(w)));
    CHECK(rel_err(s, polar_sqrt_upper(w)) < 1e-14);
  }
}

TEST_CASE("slit_forward maps the base point to the tip") {
  // Tip of the slit: height 1/sqrt(n).
  const ComplexPoint tip = chl::slit_forward({0.0, 0.0}, SlitParams{0.0, 4});
  CHECK(tip.real() == 0.0);
  CHECK(tip.imag() == doctest::Approx(0.5).epsilon(1e-15));

  // Imaginary axis maps to the imaginary axis by symmetry.
  const ComplexPoint up = chl::slit_forward({0.0, 1.0}, SlitParams{0.0, 1});
  CHECK(std::abs(up.real()) < 1e-15);
  CHECK(up.imag() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("slit_forward keeps the negative real branch near the axis") {
  // Continuity oracle: walk z(s) = -2 + is down to s = 1e-6. The image stays
  // in the third quadrant relative to the slit: a branch flip would throw it
  // across to positive real parts.
  const SlitParams p{0.0, 1};
  ComplexPoint prev = chl::slit_forward({-2.0, 4.0}, p);
  for (double s = 4.0; s >= 1e-6; s *= 0.8) {
    const ComplexPoint cur = chl::slit_forward({-2.0, s}, p);
    CHECK(cur.real() < 0.0);
    CHECK(cur.imag() > 0.0);
    CHECK(std::abs(cur - prev) < 0.3 * (1.0 + std::abs(prev)));
    prev = cur;
  }
  const ComplexPoint frozen(-1.7320508075689735, 1.1547005383791873e-6);
  CHECK(rel_err(chl::slit_forward({-2.0, 1e-6}, p), frozen) < 1e-14);
}

TEST_CASE("slit_inverse agrees with the sign-preserving real formula") {
  const SlitParams p{0.0, 1};
  // Slit tip back to the base.
  const ComplexPoint base = chl::slit_inverse({0.0, 1.0}, p);
  CHECK(std::abs(base) < 1e-12);

  // Real-axis formula, cross-checked through the forward map.
  const ComplexPoint g2 = chl::slit_inverse({2.0, 0.0}, p);
  CHECK(g2.imag() == 0.0);
  CHECK(g2.real() == doctest::Approx(2.2360679774997897).epsilon(1e-15));
  CHECK(std::abs(chl::slit_forward(g2, p) - ComplexPoint(2.0, 0.0)) < 1e-12);
  // Negative side mirrors.
  CHECK(chl::slit_inverse({-2.0, 0.0}, p).real() ==
        doctest::Approx(-2.2360679774997897).epsilon(1e-15));
}

TEST_CASE("slit maps invert each other") {
  chl::Xoshiro256pp rng(7);
  for (int i = 0; i < 1000; ++i) {
    const ComplexPoint z(-6.0 + 12.0 * rng.uniform(), 1e-3 + 6.0 * rng.uniform());
    const SlitParams p{-3.0 + 6.0 * rng.uniform(), 1 + (rng.next() % 100000)};
    const ComplexPoint back = chl::slit_inverse(chl::slit_forward(z, p), p);
    CHECK(std::abs(back - z) <= 1e-10 * (1.0 + std::abs(z)));
  }
  // The specific round trip named in the module contract.
  const ComplexPoint z(0.3, 0.7);
  for (const auto& [x, n] : {std::pair{0.0, std::uint64_t{1}},
                             std::pair{2.5, std::uint64_t{37}},
                             std::pair{-1.0, std::uint64_t{1000}}}) {
    const SlitParams p{x, n};
    CHECK(std::abs(chl::slit_inverse(chl::slit_forward(z, p), p) - z) <= 1e-12);
  }
}

TEST_CASE("branch consistency holds across the upper half-plane") {
  chl::Xoshiro256pp rng(99);
  for (int i = 0; i < 5000; ++i) {
    const ComplexPoint z(-8.0 + 16.0 * rng.uniform(), 1e-9 + 5.0 * rng.uniform());
    const SlitParams p{-4.0 + 8.0 * rng.uniform(), 1 + (rng.next() % 1000000)};
    CHECK(chl::slit_forward(z, p).imag() > 0.0);
    CHECK(chl::slit_inverse(z, p).imag() >= 0.0);
  }
}

TEST_CASE("hydrodynamic normalization recovers the capacity 1/(2n)") {
  for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{5}, std::uint64_t{100}}) {
    const SlitParams p{0.0, n};
    for (const double y : {1e3, 1e4}) {
      const ComplexPoint iy(0.0, y);
      const double est = (iy * (chl::slit_inverse(iy, p) - iy)).real();
      CHECK(std::abs(est - p.capacity()) <= 1e-2 * p.capacity());
    }
  }
}

TEST_CASE("compose_forward applies the innermost map first") {
  const std::vector<double> none;
  CHECK(chl::compose_forward({0.4, 1.3}, none, 5) == ComplexPoint(0.4, 1.3));

  const std::vector<double> one{0.0};
  CHECK(std::abs(chl::compose_forward({0.0, 0.0}, one, 1) - ComplexPoint(0.0, 1.0)) <
        1e-15);

  // Frozen from long-double evaluation of F_0(F_1(z)), n = 1:
  // z = 1 passes through the slit tip 1 + i of the inner map.
  const std::vector<double> two{0.0, 1.0};
  const ComplexPoint at_one = chl::compose_forward({1.0, 0.0}, two, 1);
  CHECK(rel_err(at_one, {0.7861513777574233, 1.272019649514069}) < 1e-14);
  // z = 0 lands on the real axis: F_1(0) = 1, F_0(1) = 0.
  CHECK(std::abs(chl::compose_forward({0.0, 0.0}, two, 1)) < 1e-15);
}

TEST_CASE("compose_inverse undoes compose_forward") {
  const std::vector<double> none;
  CHECK(chl::compose_inverse({2.0, 3.0}, none, 9) == ComplexPoint(2.0, 3.0));

  const std::vector<double> one{0.0};
  CHECK(std::abs(chl::compose_inverse({0.0, 1.0}, one, 1)) < 1e-12);

  chl::Xoshiro256pp rng(512);
  std::vector<double> attachments{0.0};
  double left = 0.1, right = 0.1;  // n = 100
  for (int k = 1; k < 200; ++k) {
    const double x = -left + (left + right) * rng.uniform();
    attachments.push_back(x);
    const chl::Endpoints e = chl::endpoint_update(left, right, x, 100);
    left = e.left;
    right = e.right;
  }
  const ComplexPoint z(0.2, 1.5);
  const ComplexPoint around =
      chl::compose_inverse(chl::compose_forward(z, attachments, 100), attachments, 100);
  CHECK(std::abs(around - z) <= 1e-9);
}

TEST_CASE("endpoint_update matches the closed forms") {
  using chl::endpoint_update;
  const chl::Endpoints sym = endpoint_update(1.0, 1.0, 0.0, 1);
  CHECK(sym.left == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sym.right == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const chl::Endpoints skew = endpoint_update(1.0, 1.0, 1.0, 1);
  CHECK(skew.right == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(skew.left == doctest::Approx(2.2360679774997897 - 1.0).epsilon(1e-14));

  CHECK_THROWS_AS(endpoint_update(1.0, 1.0, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(endpoint_update(1.0, 1.0, -1.0001, 1), std::invalid_argument);
}

TEST_CASE("endpoint pushes are monotone, capped, and mirror-symmetric") {
  chl::Xoshiro256pp rng(31337);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t n = 1 + (rng.next() % 1000000);
    const double L = 1e-4 + 4.0 * rng.uniform();
    const double R = 1e-4 + 4.0 * rng.uniform();
    const double x = -L + (L + R) * rng.uniform();
    const chl::Endpoints e = chl::endpoint_update(L, R, x, n);
    const double cap = std::sqrt(1.0 / static_cast<double>(n));
    CHECK(e.left > L);
    CHECK(e.right > R);
    CHECK(e.left - L <= cap * (1.0 + 1e-13));
    CHECK(e.right - R <= cap * (1.0 + 1e-13));

    const chl::Endpoints m = chl::endpoint_update(R, L, -x, n);
    CHECK(m.left == e.right);
    CHECK(m.right == e.left);
  }
  // Attaching exactly at the endpoint saturates the cap.
  const chl::Endpoints at_end = chl::endpoint_update(1.0, 1.0, 1.0, 16);
  CHECK(at_end.right - 1.0 == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("push_bounds brackets the true push") {
  const chl::PushBounds b = chl::push_bounds(1.0, 0.5, 4);
  CHECK(b.hi == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(b.lo == doctest::Approx(0.1875).epsilon(1e-15));
  const double push = chl::endpoint_update(10.0, 1.0, 0.5, 4).right - 1.0;
  CHECK(push == doctest::Approx(0.20710678118654752).epsilon(1e-15));
  CHECK(push >= b.lo);
  CHECK(push <= b.hi);

  // Far particles push vanishingly.
  const chl::PushBounds far = chl::push_bounds(1e7, 0.0, 3);
  CHECK(far.hi < 1e-6);
  CHECK(far.lo > 0.0);
  CHECK(far.lo <= far.hi);

  CHECK_THROWS_AS(chl::push_bounds(1.0, 0.9999, 4), std::domain_error);

  // Randomized bracketing of the production push kernel. The sampled
  // distances stay below 1e3/sqrt(n): past that the bracket is tighter than
  // double resolution and the comparisons turn into coin flips.
  chl::Xoshiro256pp rng(77);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t n = 1 + (rng.next() % 1000000000);
    const double h = std::sqrt(1.0 / static_cast<double>(n));
    const double d = h * std::exp(std::log(1e3) * rng.uniform());
    const double right = d + 10.0 * rng.uniform();
    const chl::PushBounds pb = chl::push_bounds(right, right - d, n);
    const double p = chl::front_push(d, n);
    CHECK(p >= pb.lo);
    CHECK(p <= pb.hi);
  }
}
