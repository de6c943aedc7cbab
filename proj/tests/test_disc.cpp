#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chl/disc.hpp"
#include "chl/hull.hpp"
#include "chl/rng.hpp"

using chl::ComplexPoint;

TEST_CASE("mobius map sends the exterior of the disc onto the half-plane") {
  // Unit circle to the real line: e^{i theta} -> -tan(theta/2).
  for (const double theta : {0.1, 1.0, 2.5, -0.7, -2.9}) {
    const ComplexPoint on_circle = std::polar(1.0, theta);
    const ComplexPoint image = chl::mobius_to_halfplane(on_circle);
    CHECK(std::abs(image.imag()) < 1e-14);
    CHECK(image.real() == doctest::Approx(-std::tan(theta / 2.0)).epsilon(1e-12));
  }

  // Seed point and infinity.
  CHECK(std::abs(chl::mobius_to_halfplane({1.0, 0.0})) < 1e-15);
  const ComplexPoint big = chl::mobius_to_halfplane({1e12, 0.0});
  CHECK(std::abs(big - ComplexPoint(0.0, 1.0)) < 1e-9);

  // Pole maps to the explicit point at infinity.
  const ComplexPoint pole = chl::mobius_to_halfplane({-1.0, 0.0});
  CHECK(std::isinf(pole.real()));
  CHECK(std::isinf(pole.imag()));

  // Round trips on random exterior points.
  chl::Xoshiro256pp rng(64);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = 1.0 + 5.0 * rng.uniform();
    const double theta =
        -std::numbers::pi + 2.0 * std::numbers::pi * rng.uniform();
    const ComplexPoint z = std::polar(r, theta);
    const ComplexPoint back = chl::mobius_from_halfplane(chl::mobius_to_halfplane(z));
    worst = std::max(worst, std::abs(back - z) / std::abs(z));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("pullback angles agree with the boundary formula") {
  for (const double u : {-3.0, -0.5, 0.0, 0.2, 4.0}) {
    CHECK(chl::pullback_angle({u, 0.0}) ==
          doctest::Approx(chl::boundary_angle(u)).epsilon(1e-12));
  }
  CHECK(chl::boundary_angle(0.0) == 0.0);
  CHECK(chl::boundary_angle(1.0) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("tau_alpha prediction arithmetic") {
  CHECK(chl::tau_alpha_prediction(10000, 0.5) ==
        doctest::Approx(10715.786824902893).epsilon(1e-12));
  CHECK(chl::tau_alpha_prediction(1000000, 0.5) ==
        doctest::Approx(714385.7883268595).epsilon(1e-12));
  // The (1-alpha)^2 factor kills the prediction as alpha -> 1.
  CHECK(chl::tau_alpha_prediction(10000, 0.999) <
        1e-4 * chl::tau_alpha_prediction(10000, 0.5));
  CHECK_THROWS_AS(chl::tau_alpha_prediction(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(chl::tau_alpha_prediction(100, 1.0), std::invalid_argument);
}

TEST_CASE("disc state tracks the mapped-out arc around the seed") {
  chl::DiscState state(100, 5);
  CHECK(state.k() == 1);
  CHECK(state.attachments().size() == 1);
  CHECK(state.attachments()[0] == 0.0);
  CHECK(state.attachment_angle(1) == 0.0);

  for (int i = 0; i < 500; ++i) state.step();
  CHECK(state.arc_lo() < 0.0);
  CHECK(state.arc_hi() > 0.0);
  CHECK(state.arc_lo() == doctest::Approx(-2.0 * std::atan(state.right())).epsilon(1e-15));
  CHECK(state.arc_hi() == doctest::Approx(2.0 * std::atan(state.left())).epsilon(1e-15));

  // One conjugated particle carries half-plane capacity 1/(2n).
  chl::DiscState single(64, 9);
  const std::vector<double>& atoms = single.attachments();
  CHECK(chl::hcap_estimate(atoms, 64, 1000.0) ==
        doctest::Approx(1.0 / 128.0).epsilon(1e-6));
}

TEST_CASE("disc runs are deterministic and detection modes agree") {
  chl::DiscRunOptions exact;
  exact.force_exact = true;
  chl::DiscRunOptions phased;
  phased.exact_below = 0;  // force screened detection

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const chl::DiscRunResult a = chl::disc_run(3000, seed, 0.5, 30000, exact);
    const chl::DiscRunResult b = chl::disc_run(3000, seed, 0.5, 30000, phased);
    const chl::DiscRunResult c = chl::disc_run(3000, seed, 0.5, 30000, exact);
    REQUIRE(a.tau.has_value());
    CHECK(a.tau == b.tau);
    CHECK(a.tau == c.tau);
    // Screening must skip most of the exact work to be worth having.
    CHECK(b.exact_checks < a.exact_checks / 2);
  }
}

TEST_CASE("screened detection matches exact detection at production scale") {
  // n = 5e4 sits above the exact_below cutoff in spirit: the screened path
  // must find the identical first arrival, and an audit pass (exact checks
  // on a stride through the non-candidates) must not discover anything the
  // screen missed.
  chl::DiscRunOptions exact;
  exact.force_exact = true;
  chl::DiscRunOptions audited;
  audited.exact_below = 0;
  audited.audit_stride = 17;

  for (std::uint64_t seed = 2; seed <= 3; ++seed) {
    const chl::DiscRunResult a = chl::disc_run(50000, seed, 0.5, 100000, exact);
    const chl::DiscRunResult b = chl::disc_run(50000, seed, 0.5, 100000, audited);
    REQUIRE(a.tau.has_value());
    CHECK(a.tau == b.tau);
  }
}

TEST_CASE("disc traces record angles and arcs") {
  chl::DiscRunOptions opts;
  opts.record_trace = true;
  const chl::DiscRunResult res = chl::disc_run(500, 3, 0.5, 5000, opts);
  REQUIRE(res.tau.has_value());
  REQUIRE(res.trace.size() == *res.tau);
  CHECK(res.trace.front().k == 1);
  CHECK(res.trace.front().theta == 0.0);
  // The last recorded angle is the first arrival inside the target arc.
  const double edge = std::numbers::pi * 0.5;
  CHECK(std::abs(res.trace.back().theta) >= edge);
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i) {
    CHECK(std::abs(res.trace[i].theta) < edge);
    CHECK(res.trace[i].arc_lo <= 0.0);
    CHECK(res.trace[i].arc_hi >= 0.0);
  }
}

TEST_CASE("wide target arcs are hit almost immediately") {
  // alpha close to 1: the target covers nearly the whole circle, so the
  // second particle is already inside it.
  const chl::DiscRunResult res = chl::disc_run(100, 11, 0.999, 100);
  REQUIRE(res.tau.has_value());
  CHECK(*res.tau <= 3);
}

TEST_CASE("unreachable targets report NOT_REACHED") {
  const chl::DiscRunResult res = chl::disc_run(10000, 2, 0.5, 50);
  CHECK(!res.tau.has_value());
  CHECK(res.steps == 50);
  CHECK_THROWS_AS(chl::disc_run(100, 1, 1.5, 10), std::invalid_argument);
}
