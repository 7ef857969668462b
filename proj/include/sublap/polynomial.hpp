#pragma once

#include "sublap/structure.hpp"

#include <string>
#include <vector>

namespace sublap {

struct Monomial {
  double coef = 0.0;
  std::vector<int> powers;
};

/// Real polynomial in the chart coordinates.
///
/// Text form: sums of products of numbers and variables with integer
/// powers, e.g. "x^2*z - 0.5*y + 3". Variables are x, y, z, w for the
/// first four coordinates, or q1..qn in any dimension.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int n, std::vector<Monomial> terms);

  static Polynomial parse(const std::string& text, int n);

  int dim() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double operator()(const Vec& q) const;
  Vec gradient(const Vec& q) const;
  ScalarFunction as_function() const;

 private:
  int n_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace sublap
