#include "sublap/compatibility.hpp"
#include "sublap/forms.hpp"
#include "sublap/models.hpp"
#include "sublap/operators.hpp"

#include <doctest.h>

#include <cmath>

using namespace sublap;

TEST_SUITE("compatibility") {
  TEST_CASE("Heisenberg with Popp is solved by the Reeb field") {
    const Model m = heisenberg3();
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const VolumeForm popp = popp_volume(m.structure, m.annihilator());
    const Vec q = make_vec({0.2, 0.9, -0.3});
    const auto r = corank1_solve(popp, q, m.structure, unit);
    CHECK(r.status == Solvability::Unique);
    CHECK(r.dimension == 0);
    CHECK((r.complement - make_vec({0, 0, std::sqrt(2.0)})).norm() < 1e-8);
    CHECK((contact_complement(popp, q, m.structure, unit) - make_vec({0, 0, std::sqrt(2.0)})).norm() < 1e-8);
  }

  TEST_CASE("e^x Popp shifts the complement horizontally") {
    const Model m = heisenberg3();
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const VolumeForm ex = VolumeForm::exp_times([](const Vec& y) { return y(0); },
                                                popp_volume(m.structure, m.annihilator()));
    const Vec q = make_vec({0.1, 0.2, 0.3});
    const auto r = corank1_solve(ex, q, m.structure, unit);
    REQUIRE(r.status == Solvability::Unique);
    const Structure split = m.structure.with_complement({solved_complement_field(ex, m.structure, unit)});
    CHECK(chi(ex, q, split).norm() < 1e-6);
  }

  TEST_CASE("quasi-contact R^4 has no compatible complement") {
    const Model m = quasicontact_r4(GrowthChoice::Exp);
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const VolumeForm popp = popp_volume(m.structure, m.annihilator());
    const Vec q = make_vec({0.3, 0.1, 0.6, -0.2});
    const auto r = corank1_solve(popp, q, m.structure, unit);
    CHECK(r.status == Solvability::None);
    CHECK(r.certified);
    CHECK(r.residual == doctest::Approx(std::exp(-0.3)).epsilon(1e-6));
  }

  TEST_CASE("Carnot model with Popp is affine over ker J") {
    const Model m = builtin_model("carnot-corank1");
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const VolumeForm popp = popp_volume(m.structure, m.annihilator());
    const auto r = corank1_solve(popp, make_vec({0.2, -0.4, 0.1, 0.3}), m.structure, unit);
    CHECK(r.status == Solvability::Affine);
    CHECK(r.dimension == 1);
    CHECK(r.kernel.size() == 1);
  }

  TEST_CASE("Carnot complement dimension") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    CHECK(carnot_complements(CarnotSpec::corank1(a)).dimension == 1);
    Eigen::MatrixXd b(2, 2);
    b << 0, 1, -1, 0;
    CHECK(carnot_complements(CarnotSpec::corank1(b)).dimension == 0);
    const auto space = carnot_complements(CarnotSpec::corank1(a));
    Eigen::VectorXd along_kernel = Eigen::VectorXd::Zero(3);
    along_kernel(2) = 1.0;
    CHECK(space.contains(along_kernel));
    Eigen::VectorXd along_plane = Eigen::VectorXd::Zero(3);
    along_plane(0) = 1.0;
    CHECK_FALSE(space.contains(along_plane));
  }

  TEST_CASE("Jacobi violations are rejected") {
    CarnotSpec spec(4, 2);
    spec.set_bracket(0, 1, 2, 1.0);
    spec.set_bracket(1, 2, 3, 1.0);
    spec.set_bracket(0, 2, 2, 1.0);
    CHECK(spec.jacobi_defect() > 0.1);
    CHECK_THROWS_AS(spec.validate(), Error);
  }

  TEST_CASE("integrability of tilted complements on Heisenberg") {
    const Model m = heisenberg3();
    const OneForm unit = normalize(m.annihilator(), m.structure);
    const double eps = 0.1;
    const VectorField linear{[eps](const Vec& x) { return make_vec({eps * x(0), 0.0, 1.0 - 0.5 * eps * x(0) * x(1)}); }, {}};
    const VectorField vertical{[eps](const Vec& x) { return make_vec({eps * x(2), 0.0, 1.0 - 0.5 * eps * x(2) * x(1)}); }, {}};
    const auto pts = std::vector<Vec>{make_vec({0.1, 0.2, 0.3}), make_vec({-0.4, 0.3, 0.0})};
    CHECK(contact_integrability(m.structure, unit, linear, pts).integrable);
    const auto report = contact_integrability(m.structure, unit, vertical, {Vec::Zero(3)});
    CHECK_FALSE(report.integrable);
    CHECK(report.max_violation == doctest::Approx(3 * eps / std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("theta reconstruction is path independent for the Reeb complement") {
    const Model m = contact3_perturbed();
    const Structure& s = m.structure;
    const OneForm unit = normalize(m.annihilator(), s);
    const VectorField z{[s, unit](const Vec& x) { return reeb(x, s, unit); }, {}};
    const auto r = reconstruct_theta(s, unit, z, make_vec({0, 0, 0}), make_vec({0.3, -0.2, 0.4}));
    CHECK(r.discrepancy < 1e-6);
  }

  TEST_CASE("form algebra") {
    const Form dx = Form::one_form(make_vec({1, 0, 0}));
    const Form dy = Form::one_form(make_vec({0, 1, 0}));
    const Form w = wedge(dx, dy);
    CHECK(w.component({0, 1}) == 1.0);
    CHECK(w.component({1, 0}) == -1.0);
    CHECK(w.evaluate({make_vec({1, 0, 0}), make_vec({0, 1, 0})}) == 1.0);
    const Form i = interior(make_vec({0, 1, 0}), w);
    CHECK(i.component({0}) == -1.0);
    const Form d = exterior_d([](const Vec& q) { return Form::one_form(make_vec({0, q(0), 0})); }, make_vec({0.3, 0.4, 0.5}));
    CHECK(d.component({0, 1}) == doctest::Approx(1.0));
    const Form g = exterior_d_scalar([](const Vec& q) { return q(0) * q(2); }, make_vec({2, 0, 3}));
    CHECK(g.component({0}) == doctest::Approx(3.0));
    CHECK(g.component({2}) == doctest::Approx(2.0));
  }
}
