#include "sublap/operators.hpp"

namespace sublap {

namespace {

double sum_of_squares(const ScalarFunction& phi, const Vec& q, const Structure& s) {
  double sum = 0.0;
  for (int i = 0; i < s.rank(); ++i) sum += second_directional(phi, i, q, s);
  return sum;
}

}  // namespace

OperatorValue macroscopic(const ScalarFunction& phi, const VolumeForm& omega, const Vec& q,
                          const Structure& s) {
  const int n = s.dim();
  const int k = s.rank();
  const auto c = structural_functions(s, q);
  const Vec grad = grad_h(phi, q, s);

  OperatorValue out;
  out.second_order = sum_of_squares(phi, q, s);
  for (int i = 0; i < k; ++i) {
    double trace = 0.0;
    for (int a = 0; a < n; ++a) trace += c(a, i, a);
    out.structural_drift += trace * grad(i);
    out.theta_drift += theta_derivative(omega, i, q, s) * grad(i);
  }
  out.value = out.second_order + out.structural_drift + out.theta_drift;
  return out;
}

OperatorValue microscopic(const ScalarFunction& phi, const Vec& q, const Structure& s) {
  const int k = s.rank();
  const auto c = structural_functions(s, q);
  const Vec grad = grad_h(phi, q, s);

  OperatorValue out;
  out.second_order = sum_of_squares(phi, q, s);
  for (int i = 0; i < k; ++i) {
    double trace = 0.0;
    for (int j = 0; j < k; ++j) trace += c(j, i, j);
    out.structural_drift += trace * grad(i);
  }
  out.value = out.second_order + out.structural_drift;
  return out;
}

double horizontal_divergence(int j, const Vec& q, const Structure& s) {
  const int k = s.rank();
  Eigen::PartialPivLU<Mat> lu(s.frame(q));
  if (!(lu.rcond() > 1e-12)) {
    throw Error(ErrorKind::DegenerateFrame, "frame not invertible at " + format_point(q));
  }
  // The horizontal k-form equals 1 on the orthonormal frame, so its horizontal
  // Lie derivative along X_j is -sum_i (X_i-coefficient of pi_D [X_j, X_i]).
  double div = 0.0;
  for (int i = 0; i < k; ++i) {
    if (i == j) continue;
    Vec coeffs = lu.solve(lie_bracket(s, j, i, q));
    div -= coeffs(i);
  }
  return div;
}

Vec chi(const VolumeForm& omega, const Vec& q, const Structure& s) {
  const int n = s.dim();
  const int k = s.rank();
  const auto c = structural_functions(s, q);
  Vec out(k);
  for (int i = 0; i < k; ++i) {
    double trace = 0.0;
    for (int j = k; j < n; ++j) trace += c(j, i, j);
    out(i) = trace + theta_derivative(omega, i, q, s);
  }
  return out;
}

Vec microscopic_drift(const Vec& q, const Structure& s) {
  const int k = s.rank();
  const auto c = structural_functions(s, q);
  Vec b = Vec::Zero(s.dim());
  for (int i = 0; i < k; ++i) {
    double trace = 0.0;
    for (int j = 0; j < k; ++j) trace += c(j, i, j);
    if (trace != 0.0) b += trace * s.field_value(i, q);
  }
  return b;
}

}  // namespace sublap
