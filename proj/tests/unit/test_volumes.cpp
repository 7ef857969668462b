#include "sublap/models.hpp"
#include "sublap/volumes.hpp"

#include <doctest.h>

#include <cmath>

using namespace sublap;

TEST_SUITE("volumes") {
  TEST_CASE("Heisenberg normalization, Reeb field and Popp density") {
    const Model m = heisenberg3();
    const Vec q = make_vec({0.3, -0.6, 1.1});
    const JMatrix j = j_matrix(q, m.structure, m.annihilator());
    CHECK(j.scale == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(std::abs(j.m(0, 1)) == doctest::Approx(1.0));
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const Vec z = reeb(q, m.structure, unit);
    CHECK(std::abs(z(0)) < 1e-12);
    CHECK(std::abs(z(1)) < 1e-12);
    CHECK(z(2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(popp_corank1(q, m.structure, m.annihilator()) == doctest::Approx(1 / std::sqrt(2.0)));
  }

  TEST_CASE("normalized eta has unit J") {
    const Model m = contact3_perturbed();
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const Vec q = make_vec({0.5, 0.2, -0.4});
    CHECK(j_matrix(q, m.structure, unit).normalized().squaredNorm() == doctest::Approx(1.0));
    CHECK(j_matrix(q, m.structure, unit).scale == doctest::Approx(1.0));
  }

  TEST_CASE("symmetric perturbation is flagged") {
    Mat m(2, 2);
    m << 0.0, 1.0, -1.0 + 1e-3, 0.0;
    try {
      JMatrix::from_matrix(m);
      FAIL("expected a skew-symmetry violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SkewViolation);
    }
  }

  TEST_CASE("vanishing J is a step-2 violation") {
    try {
      JMatrix::from_matrix(Mat::Zero(2, 2));
      FAIL("expected a step-2 violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StepTwoViolation);
    }
  }

  TEST_CASE("eigenplanes of a 2x2 skew block") {
    Mat j(2, 2);
    j << 0.0, 2.0, -2.0, 0.0;
    const auto planes = eigen_planes(j);
    REQUIRE(planes.size() == 1);
    CHECK(planes[0].lambda == doctest::Approx(2.0));
    CHECK((j * planes[0].x + 2.0 * planes[0].y).norm() < 1e-12);
    CHECK((j * planes[0].y - 2.0 * planes[0].x).norm() < 1e-12);
  }

  TEST_CASE("quasi-contact R^4 Popp density is g^(5/2) / sqrt 2") {
    for (GrowthChoice choice : {GrowthChoice::Exp, GrowthChoice::LinearPositive}) {
      const Model m = quasicontact_r4(choice);
      for (double z : {-0.7, 0.0, 0.9}) {
        const Vec q = make_vec({0.3, -0.2, z, 0.5});
        const double g = choice == GrowthChoice::Exp ? std::exp(z) : 2.0 + z;
        CHECK(popp_corank1(q, m.structure, m.annihilator()) ==
              doctest::Approx(std::pow(g, 2.5) / std::sqrt(2.0)).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("linear growth is rejected where g is not positive") {
    const Model m = quasicontact_r4(GrowthChoice::LinearPositive);
    try {
      m.structure.field_value(0, make_vec({0, 0, -3, 0}));
      FAIL("expected an evaluation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Evaluation);
    }
  }

  TEST_CASE("quasi-Reeb field of the Carnot model") {
    const Model m = builtin_model("carnot-corank1");
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const Vec q = make_vec({0.4, -0.1, 0.7, 0.2});
    const auto r = quasi_reeb(0, q, m.structure, unit);
    CHECK(unit.at(q).dot(r.z) == doctest::Approx(1.0));
    CHECK(std::abs(d_eta(unit, r.z, r.x, q)) < 1e-8);
    CHECK(std::abs(d_eta(unit, r.z, r.y, q)) < 1e-8);
    CHECK((r.z + r.bracket / r.lambda).norm() < 1e-8);
  }

  TEST_CASE("Popp volume of a non-corank-1 structure is an error") {
    const VectorField dx{[](const Vec&) { return make_vec({1, 0, 0}); }, {}};
    const VectorField dy{[](const Vec&) { return make_vec({0, 1, 0}); }, {}};
    const VectorField dz{[](const Vec&) { return make_vec({0, 0, 1}); }, {}};
    const Structure s("riemannian", 3, 3, {dx, dy, dz});
    CHECK_THROWS_AS(reconstruct_annihilator(s), Error);
  }
}
