#pragma once

#include "sublap/types.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace sublap {

using FieldFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;

/// A smooth vector field on the chart. `jacobian` is optional; when empty
/// the derivative is taken by finite differences.
struct VectorField {
  FieldFn value;
  JacobianFn jacobian;
};

/// Smooth real function on the chart with an optional coordinate gradient.
struct ScalarFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;

  double operator()(const Vec& q) const { return value(q); }
};

/// Sub-Riemannian structure on a single global chart, given by a frame.
///
/// The first `k` fields are orthonormal by declaration and define the
/// metric on the distribution; the remaining `n - k` span the complement V.
class Structure {
 public:
  Structure(std::string name, int n, int k, std::vector<VectorField> fields);

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  int rank() const { return k_; }
  const VectorField& field(int i) const { return fields_.at(static_cast<size_t>(i)); }
  const std::vector<VectorField>& fields() const { return fields_; }

  /// Field value with a finiteness check on every component.
  Vec field_value(int i, const Vec& q) const;

  /// n x n matrix whose columns are X_1(q), ..., X_n(q).
  Mat frame(const Vec& q) const;

  /// Same horizontal frame, different complement.
  Structure with_complement(std::vector<VectorField> complement, std::string name = {}) const;

 private:
  std::string name_;
  int n_;
  int k_;
  std::vector<VectorField> fields_;
};

/// c_ij^l at a point: [X_i, X_j] = sum_l c_ij^l X_l. Indices are 0-based.
class StructuralTensor {
 public:
  explicit StructuralTensor(int n) : n_(n) {}

  int dim() const { return n_; }
  double operator()(int i, int j, int l) const { return c_[index(i, j, l)]; }
  double& operator()(int i, int j, int l) { return c_[index(i, j, l)]; }

 private:
  size_t index(int i, int j, int l) const {
    return static_cast<size_t>((i * n_ + j) * n_ + l);
  }

  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> c_{};
};

/// Positive density against the coordinate n-form: omega = rho * dq_1 ^ ... ^ dq_n.
struct VolumeForm {
  std::function<double(const Vec&)> density;

  static VolumeForm lebesgue();
  static VolumeForm constant(double c);
  /// e^{g} * base
  static VolumeForm exp_times(std::function<double(const Vec&)> g, VolumeForm base);
  VolumeForm scaled(double c) const;
};

/// Step rule shared by the finite-difference stencils: base * (1 + |q|_inf).
double fd_step(const Vec& q, double base);

/// Fourth-order central first derivative of t -> f(t) at t = 0.
double central_diff(const std::function<double(double)>& f, double h);

Mat jacobian(const Structure& s, int field_index, const Vec& q);
Mat fd_jacobian(const FieldFn& f, const Vec& q);

/// [X_a, X_b](q) = DX_b X_a - DX_a X_b.
Vec lie_bracket(const Structure& s, int a, int b, const Vec& q);

StructuralTensor structural_functions(const Structure& s, const Vec& q);

/// Directional derivative of phi along the constant vector v at q.
double directional(const ScalarFunction& phi, const Vec& v, const Vec& q);

/// (X_1 phi, ..., X_k phi) at q.
Vec grad_h(const ScalarFunction& phi, const Vec& q, const Structure& s);

/// V(V phi)(q) for the frozen-coefficient field V = sum_a coeffs_a X_a,
/// taken as the second derivative of phi along the integral curve of V.
double second_along(const ScalarFunction& phi, const Vec& coeffs, const Vec& q,
                    const Structure& s);

/// X_i(X_i phi)(q).
double second_directional(const ScalarFunction& phi, int i, const Vec& q, const Structure& s);

/// theta = log |omega(X_1, ..., X_n)| = log(rho(q) |det Frame(q)|).
double get_theta(const VolumeForm& omega, const Vec& q, const Structure& s);

/// X_i(theta)(q).
double theta_derivative(const VolumeForm& omega, int i, const Vec& q, const Structure& s);

/// div_omega(X_i) = sum_alpha c_{alpha i}^alpha + X_i(theta).
double div_omega(int i, const VolumeForm& omega, const Vec& q, const Structure& s);

}  // namespace sublap
