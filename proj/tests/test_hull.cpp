#include <cmath>

#include "doctest.h"

#include "chl/growth.hpp"
#include "chl/hull.hpp"

TEST_CASE("envelope of the identity map is the horizontal line") {
  const std::vector<double> none;
  const chl::EnvelopePolyline env = chl::envelope(none, 7, 0.25, 11);
  REQUIRE(env.points.size() == 11);
  for (std::size_t i = 0; i < env.points.size(); ++i) {
    CHECK(env.points[i].imag() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(env.points[i].real() == doctest::Approx(env.s[i]).epsilon(1e-15));
  }
}

TEST_CASE("envelope of a single slit hugs the segment") {
  const std::vector<double> one{0.0};
  const chl::EnvelopePolyline env = chl::envelope(one, 1, 1e-3, 101);
  // Midpoint of the grid is the base point s = 0, which maps to the tip.
  const chl::ComplexPoint mid = env.points[50];
  CHECK(std::abs(mid - chl::ComplexPoint(0.0, 1.0000004999998749)) < 1e-12);
  // All points stay near the segment [0, i]: small real part, Im <= tip.
  for (const auto& p : env.points) {
    CHECK(p.imag() >= 0.0);
    CHECK(p.imag() <= 1.0000006);
    CHECK(std::abs(p.real()) <= 1.0);
  }
  CHECK(chl::max_height(env) <= std::sqrt(2.0 * 0.5) + env.eps + 1e-6);
}

TEST_CASE("diameter of a thin slit envelope approaches its height") {
  const std::vector<double> one{0.0};
  // n = 4: slit height 0.5. Small eps makes the envelope a thin hairpin.
  const chl::EnvelopePolyline env = chl::envelope(one, 4, 1e-6, 401);
  CHECK(chl::diameter(env) == doctest::Approx(0.5).epsilon(1e-3));

  chl::EnvelopePolyline degenerate;
  degenerate.points.push_back({0.0, 0.0});
  CHECK_THROWS_AS(chl::diameter(degenerate), std::invalid_argument);
}

TEST_CASE("diameter never decreases under nested refinement") {
  const chl::Trace trace = chl::run_growth({100, 800, 5, 1, 4.0, false});
  double prev = 0.0;
  for (const int m : {101, 201, 401, 801}) {
    const chl::EnvelopePolyline env = chl::envelope(trace.attachments, 100, 1e-5, m);
    const double d = chl::diameter(env);
    CHECK(d >= prev - 1e-12);
    prev = d;
  }
}

TEST_CASE("max height respects the capacity bound on random runs") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const chl::Trace trace = chl::run_growth({100, 1000, seed, 1, 5.0, false});
    const chl::EnvelopePolyline env = chl::envelope(trace.attachments, 100, 1e-4, 501);
    const double t = 1000.0 / 200.0;  // k/(2n)
    CHECK(chl::max_height(env) <= std::sqrt(2.0 * t) + env.eps + 1e-6);
  }
}

TEST_CASE("single slit saturates the height bound") {
  const std::vector<double> one{0.0};
  const chl::EnvelopePolyline env = chl::envelope(one, 1, 1e-7, 3);
  const double t = 1.0 / 2.0;
  CHECK(chl::max_height(env) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(chl::max_height(env) <= std::sqrt(2.0 * t) + env.eps + 1e-6);
}

TEST_CASE("boundary endpoints anchor to the real axis") {
  // Forward check on a short composition only: the endpoint orbit is a
  // repelling fixed path of the slit maps, so roundoff grows like
  // exp(pi sqrt(k/log n)) and forward evaluation at the endpoints is
  // meaningful just for small k.
  const chl::Trace small = chl::run_growth({100, 30, 12, 1, 1.0, false});
  const chl::EnvelopePolyline env = chl::envelope(small.attachments, 100, 1e-5, 11);
  const chl::ComplexPoint left_img =
      chl::compose_forward({env.s.front(), 0.0}, small.attachments, 100);
  const chl::ComplexPoint right_img =
      chl::compose_forward({env.s.back(), 0.0}, small.attachments, 100);
  CHECK(std::abs(left_img.imag()) <= 2.0 * env.eps);
  CHECK(std::abs(right_img.imag()) <= 2.0 * env.eps);

  // Long compositions go through the contracting direction instead: the
  // mapping-out function carries the seed-base prime ends to the interval
  // endpoints.
  const chl::Trace big = chl::run_growth({100, 600, 12, 1, 3.0, false});
  const chl::ComplexPoint seam_r(1e-14, 1e-14);
  const chl::ComplexPoint seam_l(-1e-14, 1e-14);
  CHECK(std::abs(chl::compose_inverse(seam_r, big.attachments, 100).real() -
                 big.final_right()) <= 1e-9);
  CHECK(std::abs(chl::compose_inverse(seam_l, big.attachments, 100).real() +
                 big.final_left()) <= 1e-9);
}

TEST_CASE("hcap estimate recovers the capacity clock") {
  const std::vector<double> none;
  CHECK(chl::hcap_estimate(none, 1, 100.0) == doctest::Approx(0.0).epsilon(1e-9));

  const std::vector<double> one{0.0};
  CHECK(chl::hcap_estimate(one, 1, 500.0) == doctest::Approx(0.5).epsilon(1e-4));

  const chl::Trace trace = chl::run_growth({100, 200, 31, 1, 1.0, false});
  const double est = chl::hcap_estimate(trace.attachments, 100, 1000.0);
  CHECK(std::abs(est - 1.0) <= 0.01);

  CHECK_THROWS_AS(chl::hcap_estimate(one, 1, 50.0), std::invalid_argument);
}

TEST_CASE("envelope rejects bad parameters") {
  const std::vector<double> one{0.0};
  CHECK_THROWS_AS(chl::envelope(one, 1, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(chl::envelope(one, 1, 1e-5, 1), std::invalid_argument);
}
