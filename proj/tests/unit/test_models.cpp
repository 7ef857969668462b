#include "sublap/models.hpp"
#include "sublap/volumes.hpp"

#include <doctest.h>

#include <cmath>

using namespace sublap;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Evaluation;
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("bare ids and structure files") {
    CHECK(parse_model("heisenberg3").structure.dim() == 3);
    const Model m = parse_model(R"({"name": "c", "n": 4, "k": 3, "model": {"builtin": "carnot-corank1"}})");
    CHECK(m.structure.rank() == 3);
    CHECK(kind_of([] { parse_model("nosuch"); }) == ErrorKind::Input);
    CHECK(kind_of([] { parse_model(R"({"model": {"builtin": "heisenberg3"}, "colour": 1})"); }) == ErrorKind::Input);
    CHECK(kind_of([] { parse_model(R"({"model": {"builtin": "heisenberg3"})"); }) == ErrorKind::Input);
    CHECK(kind_of([] { parse_model(R"({"n": 4, "model": {"builtin": "heisenberg3"}})"); }) == ErrorKind::Input);
    CHECK(kind_of([] { builtin_model("heisenberg3", R"({"twist": 1})"); }) == ErrorKind::Input);
  }

  TEST_CASE("polynomial structure matches the builtin perturbed contact model") {
    const Model p = parse_model(R"({"n": 3, "k": 2, "model": {"polynomial": [
        ["1", "0", "-0.5*y + 0.3*x^2"], ["0", "1", "0.5*x + 0.2*y*z"], ["0", "0", "1"]]},
        "eta": ["0.5*y - 0.3*x^2", "-0.5*x - 0.2*y*z", "1"]})");
    const Model b = contact3_perturbed(0.3, 0.2);
    const Vec q = make_vec({0.4, -0.7, 0.2});
    for (int a = 0; a < 3; ++a) {
      CHECK((p.structure.field_value(a, q) - b.structure.field_value(a, q)).norm() < 1e-14);
      CHECK((jacobian(p.structure, a, q) - jacobian(b.structure, a, q)).norm() < 1e-14);
    }
    CHECK(popp_corank1(q, p.structure, p.annihilator()) ==
          doctest::Approx(popp_corank1(q, b.structure, b.annihilator())));
  }

  TEST_CASE("dimension limits") {
    CHECK(kind_of([] { parse_model(R"({"n": 9, "k": 2, "model": {"polynomial": []}})"); }) == ErrorKind::Input);
    CHECK(kind_of([] { parse_model(R"({"n": 3, "k": 2, "model": {"polynomial": [["1", "0"]]}})"); }) != ErrorKind::Evaluation);
  }

  TEST_CASE("volume specs") {
    const Model m = heisenberg3();
    const Vec q = make_vec({1.0, 0.0, 0.0});
    CHECK(parse_volume("lebesgue", m).density(q) == 1.0);
    CHECK(parse_volume("popp", m).density(q) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(parse_volume("density:1+x^2", m).density(q) == doctest::Approx(2.0));
    CHECK(parse_volume(R"({"base": "lebesgue", "scale": 3, "exp": "x"})", m).density(q) ==
          doctest::Approx(3 * std::exp(1.0)));
    CHECK(kind_of([&] { parse_volume("haar-ish", m); }) == ErrorKind::Input);
    CHECK(kind_of([&] { parse_volume(R"({"scale": -1})", m); }) == ErrorKind::Input);
  }

  TEST_CASE("polynomial text") {
    const auto p = Polynomial::parse("x^2*z - 0.5*y + 3", 3);
    CHECK(p(make_vec({2, 4, 1})) == doctest::Approx(5.0));
    const Vec g = p.gradient(make_vec({2, 4, 1}));
    CHECK(g(0) == doctest::Approx(4.0));
    CHECK(g(1) == doctest::Approx(-0.5));
    CHECK(g(2) == doctest::Approx(4.0));
    CHECK(Polynomial::parse("q5^2", 5)(make_vec({0, 0, 0, 0, 3})) == doctest::Approx(9.0));
    CHECK_THROWS_AS(Polynomial::parse("x +", 3), Error);
    CHECK_THROWS_AS(Polynomial::parse("w", 3), Error);
  }

  TEST_CASE("coordinate names and battery") {
    CHECK(coordinate_names(4) == std::vector<std::string>{"x", "y", "z", "w"});
    CHECK(coordinate_names(5)[4] == "q5");
    CHECK(test_battery(3).size() == 8);
  }
}
