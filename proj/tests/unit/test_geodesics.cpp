#include "sublap/geodesics.hpp"
#include "sublap/models.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sublap;

TEST_SUITE("geodesics") {
  TEST_CASE("zero vertical covector gives a straight line") {
    const Structure h = heisenberg3().structure;
    const auto r = exp_map(Vec::Zero(3), CovectorCoords{make_vec({1, 0, 0})}, 0.7, h);
    CHECK(r.q(0) == doctest::Approx(0.7));
    CHECK(std::abs(r.q(1)) < 1e-12);
    CHECK(std::abs(r.q(2)) < 1e-12);
    CHECK(r.arc_length == doctest::Approx(0.7));
  }

  TEST_CASE("Heisenberg geodesic with h3 = 2 pi closes on a circle of unit length") {
    const Structure h = heisenberg3().structure;
    const double h3 = 2 * std::numbers::pi;
    const auto r = exp_map(Vec::Zero(3), CovectorCoords{make_vec({1, 0, h3})}, 1.0, h, 1e-3);
    CHECK(std::abs(r.q(0)) < 1e-9);
    CHECK(std::abs(r.q(1)) < 1e-9);
    CHECK(std::abs(r.q(2)) == doctest::Approx(1.0 / (4 * std::numbers::pi)).epsilon(1e-9));
  }

  TEST_CASE("unit cylinder normalizes the horizontal part only") {
    const auto c = CovectorCoords::unit_cylinder(make_vec({3, 4, 7}), 2);
    CHECK(c.h(0) == doctest::Approx(0.6));
    CHECK(c.h(1) == doctest::Approx(0.8));
    CHECK(c.h(2) == doctest::Approx(7.0));
    CHECK(hamiltonian(c, 2) == doctest::Approx(0.5));
  }

  TEST_CASE("energy is conserved on a perturbed contact structure") {
    const Structure s = contact3_perturbed().structure;
    const auto c = CovectorCoords::unit_cylinder(make_vec({0.2, -0.9, 1.7}), 2);
    const auto r = exp_map(make_vec({0.1, 0.2, 0.3}), c, 1.0, s);
    CHECK(r.energy_drift < 1e-10);
    CHECK(r.arc_length == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("observer sees the first and last state") {
    const Structure h = heisenberg3().structure;
    int calls = 0;
    double last = -1.0;
    exp_map(Vec::Zero(3), CovectorCoords{make_vec({0, 1, 0.5})}, 0.5, h, 0.1,
            [&](const GeodesicState& st, double) {
              ++calls;
              last = st.t;
            });
    CHECK(calls == 6);
    CHECK(last == doctest::Approx(0.5));
  }

  TEST_CASE("zero duration returns the start point") {
    const Structure h = heisenberg3().structure;
    const Vec q = make_vec({0.4, 0.5, 0.6});
    CHECK((exp_map(q, CovectorCoords{make_vec({1, 0, 0})}, 0.0, h).q - q).norm() == 0.0);
  }

  TEST_CASE("Taylor residual shrinks like t^3") {
    const Structure h = heisenberg3().structure;
    const auto phi = parse_function("z + x*y^2", 3);
    const auto c = CovectorCoords::unit_cylinder(make_vec({0.6, 0.8, 1.1}), 2);
    const double a = std::abs(taylor_residual(phi, Vec::Zero(3), c, 0.02, h));
    const double b = std::abs(taylor_residual(phi, Vec::Zero(3), c, 0.01, h));
    CHECK(a / b == doctest::Approx(8.0).epsilon(0.1));
  }

  TEST_CASE("walk integration step") {
    CHECK(walk_ode_step(1.0) == doctest::Approx(0.01));
    CHECK(walk_ode_step(1e-3) == doctest::Approx(1e-4));
  }
}
