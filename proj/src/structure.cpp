#include "sublap/structure.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace sublap {

std::string format_point(const Vec& q) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index i = 0; i < q.size(); ++i) out << (i ? ", " : "") << q(i);
  out << ")";
  return out.str();
}

Structure::Structure(std::string name, int n, int k, std::vector<VectorField> fields)
    : name_(std::move(name)), n_(n), k_(k), fields_(std::move(fields)) {
  if (n < 2 || n > kMaxDim) {
    throw Error(ErrorKind::InvalidSpec, "chart dimension " + std::to_string(n) +
                                            " outside [2, " + std::to_string(kMaxDim) + "]");
  }
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidSpec, "rank " + std::to_string(k) + " outside [1, n]");
  }
  if (static_cast<int>(fields_.size()) != n) {
    throw Error(ErrorKind::InvalidSpec, "expected " + std::to_string(n) + " frame fields, got " +
                                            std::to_string(fields_.size()));
  }
  for (const auto& f : fields_) {
    if (!f.value) throw Error(ErrorKind::InvalidSpec, "frame field without value map");
  }
}

Vec Structure::field_value(int i, const Vec& q) const {
  Vec v = fields_[static_cast<size_t>(i)].value(q);
  if (v.size() != n_) {
    throw Error(ErrorKind::Evaluation, "field " + std::to_string(i) + " returned " +
                                           std::to_string(v.size()) + " components");
  }
  for (int a = 0; a < n_; ++a) {
    if (!std::isfinite(v(a))) {
      throw Error(ErrorKind::Evaluation, "field " + std::to_string(i) + " component " +
                                             std::to_string(a) + " non-finite at " +
                                             format_point(q));
    }
  }
  return v;
}

Mat Structure::frame(const Vec& q) const {
  Mat f(n_, n_);
  for (int i = 0; i < n_; ++i) f.col(i) = field_value(i, q);
  return f;
}

Structure Structure::with_complement(std::vector<VectorField> complement, std::string name) const {
  std::vector<VectorField> all(fields_.begin(), fields_.begin() + k_);
  for (auto& f : complement) all.push_back(std::move(f));
  return Structure(name.empty() ? name_ : std::move(name), n_, k_, std::move(all));
}

VolumeForm VolumeForm::lebesgue() {
  return {[](const Vec&) { return 1.0; }};
}

VolumeForm VolumeForm::constant(double c) {
  return {[c](const Vec&) { return c; }};
}

VolumeForm VolumeForm::exp_times(std::function<double(const Vec&)> g, VolumeForm base) {
  return {[g = std::move(g), base = std::move(base)](const Vec& q) {
    return std::exp(g(q)) * base.density(q);
  }};
}

VolumeForm VolumeForm::scaled(double c) const {
  return {[c, d = density](const Vec& q) { return c * d(q); }};
}

double fd_step(const Vec& q, double base) {
  return base * (1.0 + (q.size() ? q.cwiseAbs().maxCoeff() : 0.0));
}

double central_diff(const std::function<double(double)>& f, double h) {
  return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h);
}

Mat fd_jacobian(const FieldFn& f, const Vec& q) {
  const auto n = q.size();
  const double h = fd_step(q, 1e-4);
  Mat jac(n, n);
  Vec x = q;
  for (Eigen::Index b = 0; b < n; ++b) {
    auto at = [&](double t) {
      x(b) = q(b) + t;
      Vec v = f(x);
      x(b) = q(b);
      return v;
    };
    Vec d = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (!std::isfinite(d(a))) {
        throw Error(ErrorKind::Evaluation, "non-finite derivative in coordinate " +
                                               std::to_string(b) + " at " + format_point(q));
      }
    }
    jac.col(b) = d;
  }
  return jac;
}

Mat jacobian(const Structure& s, int field_index, const Vec& q) {
  const auto& f = s.field(field_index);
  if (f.jacobian) return f.jacobian(q);
  return fd_jacobian(
      [&s, field_index](const Vec& x) { return s.field_value(field_index, x); }, q);
}

Vec lie_bracket(const Structure& s, int a, int b, const Vec& q) {
  return jacobian(s, b, q) * s.field_value(a, q) - jacobian(s, a, q) * s.field_value(b, q);
}

namespace {

Eigen::PartialPivLU<Mat> factor_frame(const Mat& frame, const Vec& q) {
  Eigen::PartialPivLU<Mat> lu(frame);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 1e-12 * pivots.maxCoeff())) {
    throw Error(ErrorKind::DegenerateFrame, "frame not invertible at " + format_point(q));
  }
  return lu;
}

}  // namespace

StructuralTensor structural_functions(const Structure& s, const Vec& q) {
  const int n = s.dim();
  Mat frame = s.frame(q);
  auto lu = factor_frame(frame, q);
  std::array<Mat, kMaxDim> jac;
  for (int a = 0; a < n; ++a) jac[static_cast<size_t>(a)] = jacobian(s, a, q);

  StructuralTensor c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vec bracket = jac[static_cast<size_t>(j)] * frame.col(i) -
                    jac[static_cast<size_t>(i)] * frame.col(j);
      Vec coeffs = lu.solve(bracket);
      for (int l = 0; l < n; ++l) {
        c(i, j, l) = coeffs(l);
        c(j, i, l) = -coeffs(l);
      }
    }
  }
  return c;
}

double directional(const ScalarFunction& phi, const Vec& v, const Vec& q) {
  if (phi.gradient) return phi.gradient(q).dot(v);
  const double h = fd_step(q, 1e-3);
  Vec x(q.size());
  double d = central_diff(
      [&](double t) {
        x = q + t * v;
        return phi(x);
      },
      h);
  if (!std::isfinite(d)) {
    throw Error(ErrorKind::Evaluation, "non-finite directional derivative at " + format_point(q));
  }
  return d;
}

Vec grad_h(const ScalarFunction& phi, const Vec& q, const Structure& s) {
  Vec g(s.rank());
  for (int i = 0; i < s.rank(); ++i) g(i) = directional(phi, s.field_value(i, q), q);
  return g;
}

namespace {

Vec combined_field(const Structure& s, const Vec& coeffs, const Vec& q) {
  Vec v = Vec::Zero(s.dim());
  for (Eigen::Index a = 0; a < coeffs.size(); ++a) {
    if (coeffs(a) != 0.0) v += coeffs(a) * s.field_value(static_cast<int>(a), q);
  }
  return v;
}

Vec flow(const Structure& s, const Vec& coeffs, const Vec& q, double duration, int substeps) {
  const double dt = duration / substeps;
  Vec x = q;
  for (int m = 0; m < substeps; ++m) {
    Vec k1 = combined_field(s, coeffs, x);
    Vec k2 = combined_field(s, coeffs, x + 0.5 * dt * k1);
    Vec k3 = combined_field(s, coeffs, x + 0.5 * dt * k2);
    Vec k4 = combined_field(s, coeffs, x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (!std::isfinite(x(a))) {
      throw Error(ErrorKind::Evaluation, "integral curve left the chart from " + format_point(q));
    }
  }
  return x;
}

}  // namespace

double second_along(const ScalarFunction& phi, const Vec& coeffs, const Vec& q,
                    const Structure& s) {
  const Vec v = combined_field(s, coeffs, q);
  const double speed = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (speed == 0.0) return 0.0;
  const double h = 1e-2 / std::max(1.0, speed);
  const double f0 = phi(q);
  auto second_difference = [&](double step) {
    double fp = phi(flow(s, coeffs, q, step, 4));
    double fm = phi(flow(s, coeffs, q, -step, 4));
    return (fp - 2 * f0 + fm) / (step * step);
  };
  // Richardson removes the h^2 term of the second difference.
  const double coarse = second_difference(h);
  const double fine = second_difference(h / 2);
  const double d = (4 * fine - coarse) / 3;
  if (!std::isfinite(d)) {
    throw Error(ErrorKind::Evaluation, "non-finite second derivative at " + format_point(q));
  }
  return d;
}

double second_directional(const ScalarFunction& phi, int i, const Vec& q, const Structure& s) {
  Vec coeffs = Vec::Zero(s.dim());
  coeffs(i) = 1.0;
  return second_along(phi, coeffs, q, s);
}

double get_theta(const VolumeForm& omega, const Vec& q, const Structure& s) {
  const double rho = omega.density(q);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorKind::InvalidVolume, "density " + std::to_string(rho) + " at " +
                                              format_point(q));
  }
  const double det = s.frame(q).determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorKind::DegenerateFrame, "frame determinant vanishes at " + format_point(q));
  }
  return std::log(rho * std::abs(det));
}

double theta_derivative(const VolumeForm& omega, int i, const Vec& q, const Structure& s) {
  ScalarFunction theta{[&](const Vec& x) { return get_theta(omega, x, s); }, {}};
  return directional(theta, s.field_value(i, q), q);
}

double div_omega(int i, const VolumeForm& omega, const Vec& q, const Structure& s) {
  const auto c = structural_functions(s, q);
  double sum = 0.0;
  for (int a = 0; a < s.dim(); ++a) sum += c(a, i, a);
  return sum + theta_derivative(omega, i, q, s);
}

}  // namespace sublap
