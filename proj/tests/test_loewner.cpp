#include <cmath>
#include <complex>

#include "doctest.h"

#include "chl/complex_maps.hpp"
#include "chl/loewner.hpp"

using chl::ComplexPoint;
using chl::DrivingMeasure;

namespace {

/// Analytic flow of the constant point-mass driver at the origin.
ComplexPoint point_mass_exact(ComplexPoint z, double t) {
  const double root = std::sqrt(2.0 * t);
  return chl::sqrt_upper((z - root) * (z + root));
}

}  // namespace

TEST_CASE("driver drift: point mass and uniform kinds") {
  const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
  const ComplexPoint at_i = chl::driver_drift({0.0, 1.0}, pm, 0.0);
  CHECK(std::abs(at_i - ComplexPoint(0.0, 1.0)) < 1e-15);  // 1/(0 - i) = i

  const DrivingMeasure uni = DrivingMeasure::uniform([](double) { return 1.0; });
  const ComplexPoint drift = chl::driver_drift({0.0, 1.0}, uni, 0.0);
  CHECK(std::abs(drift - ComplexPoint(0.0, 0.7853981633974483)) < 1e-14);  // i pi/4

  // Shrinking width converges to the point-mass drift -1/z.
  const ComplexPoint z(1.3, 0.8);
  for (const double a : {1e-2, 1e-5, 1e-9}) {
    const DrivingMeasure tiny = DrivingMeasure::uniform([a](double) { return a; });
    const ComplexPoint expect = -1.0 / z;
    CHECK(std::abs(chl::driver_drift(z, tiny, 0.0) - expect) <= 2e-3 * a + 1e-14);
  }

  CHECK_THROWS_AS(chl::driver_drift({0.0, 0.0}, pm, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(chl::driver_drift({0.0, -1.0}, pm, 0.0), std::invalid_argument);
}

TEST_CASE("point-mass characteristics match sqrt(z^2 - 2t)") {
  const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
  CHECK(chl::solve_characteristic({2.0, 1.0}, 0.0, pm, 1e-3) == ComplexPoint(2.0, 1.0));

  // f_1(2i) = i sqrt(6).
  const ComplexPoint f1 = chl::solve_characteristic({0.0, 2.0}, 1.0, pm, 1e-4);
  CHECK(std::abs(f1 - ComplexPoint(0.0, 2.449489742783178)) < 1e-9);

  double worst = 0.0;
  for (int ix = 0; ix < 10; ++ix) {
    for (int iy = 0; iy < 10; ++iy) {
      const ComplexPoint z(-3.0 + 6.0 * ix / 9.0, 0.5 + 4.5 * iy / 9.0);
      const ComplexPoint num = chl::solve_characteristic(z, 1.0, pm, 1e-4);
      const ComplexPoint exact = point_mass_exact(z, 1.0);
      worst = std::max(worst, std::abs(num - exact) / std::abs(exact));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("fixed-step integrator shows fourth-order convergence") {
  const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
  double max_err[3] = {0.0, 0.0, 0.0};
  for (const ComplexPoint z : {ComplexPoint(0.6, 0.7), ComplexPoint(-1.4, 1.1),
                               ComplexPoint(2.2, 0.5)}) {
    const ComplexPoint exact = point_mass_exact(z, 1.0);
    double h = 0.04;
    for (int i = 0; i < 3; ++i, h *= 0.5) {
      const double err = std::abs(chl::solve_characteristic_fixed(z, 1.0, pm, h) - exact);
      max_err[i] = std::max(max_err[i], err);
    }
  }
  const double r1 = max_err[0] / max_err[1];
  const double r2 = max_err[1] / max_err[2];
  CHECK(r1 >= 12.0);
  CHECK(r1 <= 20.0);
  CHECK(r2 >= 12.0);
  CHECK(r2 <= 20.0);
}

TEST_CASE("one empirical atom reproduces the elementary slit map") {
  const std::vector<double> atoms{0.0};
  const DrivingMeasure emp = DrivingMeasure::empirical(atoms, 4);
  const chl::SlitParams p{0.0, 4};
  for (const ComplexPoint z : {ComplexPoint(0.3, 0.8), ComplexPoint(-1.2, 0.5),
                               ComplexPoint(2.0, 2.0), ComplexPoint(0.0, 1.0)}) {
    const ComplexPoint numeric = chl::solve_characteristic_fixed(z, 0.25, emp, 1e-4);
    CHECK(std::abs(numeric - chl::slit_forward(z, p)) <= 1e-8);
  }
}

TEST_CASE("empirical exact map composes completed and fractional slits") {
  const std::vector<double> atoms{0.0, 0.7, -0.4};
  const std::uint64_t n = 6;  // t n is exact for the sampled times
  const ComplexPoint z(0.5, 1.2);

  // At whole atom counts the flow equals the composed cluster map.
  const ComplexPoint full = chl::empirical_map_exact(atoms, n, 0.5, z);
  CHECK(full == chl::compose_forward(z, atoms, n));

  // Half way through atom 2 the innermost slit carries capacity 1/(4n).
  const ComplexPoint half = chl::empirical_map_exact(atoms, n, 0.25, z);
  const ComplexPoint inner = chl::slit_forward(z, atoms[1], std::sqrt(0.5 / 6.0));
  const std::vector<double> first_only{atoms[0]};
  CHECK(std::abs(half - chl::compose_forward(inner, first_only, n)) < 1e-15);

  // The numeric integrator agrees across the atom switch.
  const DrivingMeasure emp = DrivingMeasure::empirical(atoms, n);
  const ComplexPoint numeric = chl::solve_characteristic_fixed(z, 0.25, emp, 1e-4);
  CHECK(std::abs(numeric - half) <= 1e-8);

  // Past the last atom the flow freezes.
  CHECK(chl::empirical_map_exact(atoms, n, 10.0, z) ==
        chl::empirical_map_exact(atoms, n, 0.5, z));
}

TEST_CASE("deterministic map stays within the far-field capacity bound") {
  // |f_t(z) - z| <= 2t / Im(z), from hcap(f_t) = t.
  const std::uint64_t n = 55;  // log n ~ 4
  for (const double t : {0.25, 1.0}) {
    const ComplexPoint z(0.0, 10.0);
    const ComplexPoint f = chl::deterministic_map(z, t, n, 1e-3);
    CHECK(std::abs(f - z) <= 2.0 * t / z.imag());
  }
  CHECK(chl::deterministic_map({1.0, 1.0}, 0.0, 55, 1e-3) == ComplexPoint(1.0, 1.0));
}

TEST_CASE("flow capacity equals elapsed time within one percent") {
  const double logn = std::log(1e4);
  const DrivingMeasure uni = DrivingMeasure::uniform(
      [logn](double s) { return 0.5 * std::sqrt(s * logn); });
  const double cap = chl::flow_capacity_estimate(uni, 1.0, 300.0, 1e-3);
  CHECK(std::abs(cap - 1.0) <= 0.01);

  // Inverse characteristics undo the forward flow.
  const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
  const ComplexPoint z(1.0, 2.0);
  const ComplexPoint f = chl::solve_characteristic(z, 0.7, pm, 1e-4);
  const ComplexPoint back = chl::solve_inverse_characteristic(f, 0.7, pm, 1e-4);
  CHECK(std::abs(back - z) <= 1e-7);
}

TEST_CASE("characteristics that sink below the resolvable height fail loudly") {
  const DrivingMeasure pm = DrivingMeasure::point_mass(0.0);
  // Backward integration raises Im, so force the failure through the inverse
  // direction, which drags points toward the axis.
  CHECK_THROWS_AS(
      chl::solve_inverse_characteristic({0.0, 1e-4}, 1.0, pm, 1e-3),
      chl::PrecisionError);
}

TEST_CASE("discrepancy report emits the two distances") {
  const std::vector<double> none;
  const std::vector<ComplexPoint> grid{{0.0, 1.0}, {1.0, 0.5}};
  const auto rows = chl::discrepancy_report(none, 50, 0.0, grid, 1e-3);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.phi_minus_f == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row.f_minus_id == doctest::Approx(0.0).epsilon(1e-12));
  }

  const std::vector<double> atoms{0.0, 0.3};
  const auto live = chl::discrepancy_report(atoms, 2, 1.0, grid, 1e-3);
  for (const auto& row : live) {
    CHECK(std::isfinite(row.phi_minus_f));
    CHECK(row.f_minus_id > 0.0);
  }

  const std::vector<ComplexPoint> low{{0.0, 0.05}};
  CHECK_THROWS_AS(chl::discrepancy_report(atoms, 2, 1.0, low, 1e-3),
                  std::invalid_argument);
}
