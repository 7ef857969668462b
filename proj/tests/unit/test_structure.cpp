#include "sublap/models.hpp"
#include "sublap/structure.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace sublap;

TEST_SUITE("core-geometry") {
  TEST_CASE("Heisenberg bracket is the vertical field") {
    const Structure h = heisenberg3().structure;
    const Vec q = make_vec({0.7, -1.2, 0.4});
    const Vec b = lie_bracket(h, 0, 1, q);
    CHECK(b(0) == doctest::Approx(0.0));
    CHECK(b(1) == doctest::Approx(0.0));
    CHECK(b(2) == doctest::Approx(1.0));
    const auto c = structural_functions(h, q);
    CHECK(c(0, 1, 2) == doctest::Approx(1.0));
    CHECK(c(1, 0, 2) == doctest::Approx(-1.0));
    CHECK(c(0, 1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("bracket of a field with itself vanishes") {
    const Structure s = contact3_perturbed().structure;
    const Vec q = make_vec({0.3, 0.5, -0.2});
    for (int a = 0; a < 3; ++a) CHECK(lie_bracket(s, a, a, q).norm() == 0.0);
  }

  TEST_CASE("skewed complement has x-dependent structural functions") {
    const Structure s = heisenberg3(1.0).structure;
    const Vec q = make_vec({0.5, 0.4, 0.0});
    const auto c = structural_functions(s, q);
    const double denom = 1.0 + 0.5 * 0.5 * 0.4;
    CHECK(c(0, 1, 2) == doctest::Approx(1.0 / denom));
    CHECK(c(0, 1, 0) == doctest::Approx(-0.5 / denom));
    CHECK(c(0, 1, 1) == doctest::Approx(0.0));
  }

  TEST_CASE("degenerate frame is rejected") {
    const VectorField dx{[](const Vec&) { return make_vec({1, 0, 0}); }, {}};
    const VectorField dz{[](const Vec&) { return make_vec({0, 0, 1}); }, {}};
    const Structure s("degenerate", 3, 2, {dx, dx, dz});
    try {
      structural_functions(s, Vec::Zero(3));
      FAIL("expected a degenerate-frame error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateFrame);
    }
  }

  TEST_CASE("non-finite field values are evaluation errors") {
    const VectorField bad{[](const Vec& q) { return make_vec({1.0 / q(0), 0, 0}); }, {}};
    const VectorField dy{[](const Vec&) { return make_vec({0, 1, 0}); }, {}};
    const VectorField dz{[](const Vec&) { return make_vec({0, 0, 1}); }, {}};
    const Structure s("singular", 3, 2, {bad, dy, dz});
    try {
      s.field_value(0, Vec::Zero(3));
      FAIL("expected an evaluation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Evaluation);
    }
  }

  TEST_CASE("horizontal gradient and second derivatives on Heisenberg") {
    const Structure h = heisenberg3().structure;
    const Vec q = make_vec({1.0, 2.0, -0.5});
    const Vec gz = grad_h(parse_function("z", 3), q, h);
    CHECK(gz(0) == doctest::Approx(-1.0));
    CHECK(gz(1) == doctest::Approx(0.5));
    CHECK(second_directional(parse_function("x^2", 3), 0, q, h) == doctest::Approx(2.0));
    CHECK(second_directional(parse_function("z^2", 3), 0, q, h) == doctest::Approx(2.0));
  }

  TEST_CASE("finite-difference Jacobian matches the analytic one") {
    const Structure s = contact3_perturbed().structure;
    const Vec q = make_vec({0.4, -0.3, 0.9});
    for (int a = 0; a < 3; ++a) {
      const Mat fd = fd_jacobian([&](const Vec& x) { return s.field_value(a, x); }, q);
      CHECK((fd - jacobian(s, a, q)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("theta and divergence for Lebesgue on Heisenberg") {
    const Structure h = heisenberg3().structure;
    const Vec q = make_vec({0.3, 0.1, 2.0});
    CHECK(get_theta(VolumeForm::lebesgue(), q, h) == doctest::Approx(0.0));
    for (int i = 0; i < 2; ++i) CHECK(std::abs(div_omega(i, VolumeForm::lebesgue(), q, h)) < 1e-9);
    const VolumeForm ex = VolumeForm::exp_times([](const Vec& y) { return 2.0 * y(1); }, VolumeForm::lebesgue());
    CHECK(theta_derivative(ex, 1, q, h) == doctest::Approx(2.0));
  }
}
