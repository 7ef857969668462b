#pragma once

#include "sublap/types.hpp"

#include <array>
#include <functional>
#include <initializer_list>
#include <vector>

namespace sublap {

/// Antisymmetric p-tensor at a point, stored on the basis dq_I for sorted
/// index sets I. Index sets are encoded as bitmasks, which bounds n by 8.
class Form {
 public:
  Form(int n, int degree);

  static Form one_form(const Vec& coeffs);
  /// From an antisymmetric matrix A: sum_{i<j} A_ij dq_i ^ dq_j.
  static Form two_form(const Mat& a);

  int dim() const { return n_; }
  int degree() const { return p_; }

  /// Component on an arbitrary ordered index list (0 on repeats, signed on permutations).
  double component(std::initializer_list<int> indices) const;
  double component(const std::vector<int>& indices) const;
  void set_component(const std::vector<int>& indices, double value);

  double at_mask(unsigned mask) const { return c_[mask]; }
  double& at_mask(unsigned mask) { return c_[mask]; }

  /// omega(v_1, ..., v_p).
  double evaluate(const std::vector<Vec>& vectors) const;

  /// Matrix A_ij = omega(e_i, e_j) of a 2-form.
  Mat to_matrix() const;

  double max_abs() const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(double s);

 private:
  int n_;
  int p_;
  std::array<double, 256> c_{};
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(double s, Form a);

Form wedge(const Form& a, const Form& b);

/// i_X omega.
Form interior(const Vec& x, const Form& omega);

using FormField = std::function<Form(const Vec&)>;

/// Coordinate exterior derivative by fourth-order central differences of the
/// coefficient functions; step is base_step * (1 + |q|_inf).
Form exterior_d(const FormField& field, const Vec& q, double base_step = 2e-3);

/// d of a scalar function.
Form exterior_d_scalar(const std::function<double(const Vec&)>& f, const Vec& q,
                       double base_step = 2e-3);

}  // namespace sublap
