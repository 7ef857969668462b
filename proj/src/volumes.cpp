#include "sublap/volumes.hpp"

#include <algorithm>
#include <cmath>

namespace sublap {

namespace {

void require_corank1(const Structure& s) {
  if (s.dim() != s.rank() + 1) {
    throw Error(ErrorKind::InvalidSpec, "structure '" + s.name() + "' is not corank 1");
  }
}

Mat horizontal_frame(const Structure& s, const Vec& q) {
  Mat f(s.dim(), s.rank());
  for (int i = 0; i < s.rank(); ++i) f.col(i) = s.field_value(i, q);
  return f;
}

}  // namespace

Vec OneForm::at(const Vec& q) const {
  Vec v = coeffs(q);
  if (!v.allFinite()) throw Error(ErrorKind::Evaluation, "one-form non-finite at " + format_point(q));
  return v;
}

Mat OneForm::derivative(const Vec& q) const {
  if (jacobian) return jacobian(q);
  return fd_jacobian([this](const Vec& x) { return at(x); }, q);
}

Mat OneForm::d_matrix(const Vec& q) const {
  Mat d = derivative(q);
  return d.transpose() - d;
}

OneForm reconstruct_annihilator(const Structure& s) {
  require_corank1(s);
  return {[s](const Vec& q) {
            Eigen::PartialPivLU<Mat> lu(s.frame(q));
            if (!(lu.rcond() > 1e-12)) {
              throw Error(ErrorKind::DegenerateFrame, "frame not invertible at " + format_point(q));
            }
            Vec last = Vec::Zero(s.dim());
            last(s.dim() - 1) = 1.0;
            return Vec(lu.transpose().solve(last));
          },
          {}};
}

double d_eta(const OneForm& eta, const Vec& u, const Vec& v, const Vec& q) {
  return u.dot(eta.d_matrix(q) * v);
}

double d_eta_frame(const OneForm& eta, int a, int b, const Vec& q, const Structure& s) {
  ScalarFunction eta_b{[&](const Vec& x) { return eta.at(x).dot(s.field_value(b, x)); }, {}};
  ScalarFunction eta_a{[&](const Vec& x) { return eta.at(x).dot(s.field_value(a, x)); }, {}};
  return directional(eta_b, s.field_value(a, q), q) - directional(eta_a, s.field_value(b, q), q) -
         eta.at(q).dot(lie_bracket(s, a, b, q));
}

JMatrix JMatrix::from_matrix(const Mat& m, double skew_tol) {
  const double skew_error = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (!(skew_error < skew_tol)) {
    throw Error(ErrorKind::SkewViolation,
                "J matrix deviates from skew-symmetry by " + std::to_string(skew_error));
  }
  const double norm_sq = m.squaredNorm();
  if (!(norm_sq > 1e-20)) {
    throw Error(ErrorKind::StepTwoViolation, "J vanishes; distribution is not step 2");
  }
  return {m, 1.0 / std::sqrt(norm_sq)};
}

JMatrix j_matrix(const Vec& q, const Structure& s, const OneForm& eta) {
  require_corank1(s);
  const Mat f = horizontal_frame(s, q);
  return JMatrix::from_matrix(f.transpose() * eta.d_matrix(q) * f);
}

OneForm normalize(const OneForm& eta, const Structure& s) {
  auto scale = [eta, s](const Vec& q) { return j_matrix(q, s, eta).scale; };
  return {[eta, scale](const Vec& q) { return Vec(scale(q) * eta.at(q)); },
          [eta, scale](const Vec& q) {
            const double h = fd_step(q, 1e-3);
            Vec grad(q.size());
            Vec x = q;
            for (Eigen::Index b = 0; b < q.size(); ++b) {
              grad(b) = central_diff(
                  [&](double t) {
                    x(b) = q(b) + t;
                    double v = scale(x);
                    x(b) = q(b);
                    return v;
                  },
                  h);
            }
            return Mat(scale(q) * eta.derivative(q) + eta.at(q) * grad.transpose());
          }};
}

Vec reeb(const Vec& q, const Structure& s, const OneForm& eta) {
  require_corank1(s);
  const int n = s.dim();
  const int k = s.rank();
  const Mat f = horizontal_frame(s, q);
  const Mat a = eta.d_matrix(q);

  Eigen::JacobiSVD<Mat> svd(f.transpose() * a * f);
  if (!(svd.singularValues().minCoeff() > 1e-8)) {
    throw Error(ErrorKind::NotContact, "J is singular at " + format_point(q));
  }
  Mat system(n, n);
  for (int i = 0; i < k; ++i) system.row(i) = (a * f.col(i)).transpose();
  system.row(k) = eta.at(q).transpose();
  Vec rhs = Vec::Zero(n);
  rhs(k) = 1.0;
  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorKind::NotContact, "Reeb system singular at " + format_point(q));
  return lu.solve(rhs);
}

Vec transverse_unit(const Vec& q, const OneForm& eta) {
  const Vec e = eta.at(q);
  const double norm_sq = e.squaredNorm();
  if (!(norm_sq > 0.0)) throw Error(ErrorKind::Evaluation, "one-form vanishes at " + format_point(q));
  return e / norm_sq;
}

double popp_corank1(const Vec& q, const Structure& s, const OneForm& eta, const Vec& transverse) {
  require_corank1(s);
  const double scale = j_matrix(q, s, eta).scale;
  const double eta_t = scale * eta.at(q).dot(transverse);
  if (!(std::abs(eta_t) > 1e-14)) {
    throw Error(ErrorKind::Input, "transverse vector lies in the distribution");
  }
  Mat ext(s.dim(), s.dim());
  ext.leftCols(s.rank()) = horizontal_frame(s, q);
  ext.col(s.rank()) = transverse / eta_t;
  return 1.0 / std::abs(ext.determinant());
}

double popp_corank1(const Vec& q, const Structure& s, const OneForm& eta) {
  return popp_corank1(q, s, eta, eta.at(q));
}

VolumeForm popp_volume(const Structure& s, const OneForm& eta) {
  return {[s, eta](const Vec& q) { return popp_corank1(q, s, eta); }};
}

std::vector<EigenPlane> eigen_planes(const Mat& j, double gap) {
  const Eigen::MatrixXd m = j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.transpose() * m);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const int k = static_cast<int>(m.rows());

  int zeros = 0;
  while (zeros < k && std::sqrt(std::max(ev(zeros), 0.0)) < gap) ++zeros;
  if ((k - zeros) % 2 != 0) {
    throw Error(ErrorKind::QuasiReebUndefined, "kernel of J has the wrong parity");
  }
  std::vector<EigenPlane> planes;
  double previous = 0.0;
  for (int i = zeros; i + 1 < k; i += 2) {
    const double lambda = std::sqrt(0.5 * (ev(i) + ev(i + 1)));
    if (!(lambda - previous > gap)) {
      throw Error(ErrorKind::QuasiReebUndefined,
                  "eigenvalues of J cross (gap " + std::to_string(lambda - previous) + ")");
    }
    if (i + 2 < k && !(std::sqrt(std::max(ev(i + 2), 0.0)) - lambda > gap)) {
      throw Error(ErrorKind::QuasiReebUndefined, "eigenvalue of J is not simple");
    }
    previous = lambda;
    EigenPlane p;
    p.lambda = lambda;
    p.x = eig.eigenvectors().col(i);
    p.y = -(m * p.x) / lambda;
    p.y.normalize();
    planes.push_back(std::move(p));
  }
  return planes;
}

namespace {

// Generators of plane j at q, rotated so that x is as close as possible to
// `reference`. Produces a smooth local choice of (X_j, Y_j).
EigenPlane aligned_plane(int j, const Vec& q, const Structure& s, const OneForm& eta,
                         const Eigen::VectorXd& reference) {
  const Mat m = j_matrix(q, s, eta).m;
  auto planes = eigen_planes(m);
  if (j < 0 || j >= static_cast<int>(planes.size())) {
    throw Error(ErrorKind::Input, "eigenplane index " + std::to_string(j) + " out of range");
  }
  EigenPlane p = planes[static_cast<size_t>(j)];
  if (reference.size() == 0) return p;
  const double cx = reference.dot(p.x);
  const double cy = reference.dot(p.y);
  const double norm = std::hypot(cx, cy);
  if (!(norm > 1e-8)) throw Error(ErrorKind::QuasiReebUndefined, "eigenplane rotated away");
  Eigen::VectorXd x = (cx * p.x + cy * p.y) / norm;
  p.y = -(Eigen::MatrixXd(m) * x) / p.lambda;
  p.y.normalize();
  p.x = x;
  return p;
}

}  // namespace

QuasiReebResult quasi_reeb(int j, const Vec& q, const Structure& s, const OneForm& eta) {
  require_corank1(s);
  const int n = s.dim();
  const int k = s.rank();
  const EigenPlane base = aligned_plane(j, q, s, eta, {});
  const Mat f = horizontal_frame(s, q);
  const Vec xj = f * base.x;
  const Vec yj = f * base.y;

  // Derivatives of the generator coefficients along X_j and Y_j.
  auto coefficient_derivative = [&](const Vec& direction, bool want_y) {
    const double h = fd_step(q, 1e-4);
    auto at = [&](double t) {
      Vec x = q + t * direction;
      EigenPlane p = aligned_plane(j, x, s, eta, base.x);
      return Eigen::VectorXd(want_y ? p.y : p.x);
    };
    return Eigen::VectorXd((at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h));
  };
  const Eigen::VectorXd xj_of_v = coefficient_derivative(xj, true);
  const Eigen::VectorXd yj_of_u = coefficient_derivative(yj, false);

  // [X_j, Y_j] = sum u_a v_b [X_a, X_b] + sum_b X_j(v_b) X_b - sum_a Y_j(u_a) X_a
  Vec bracket = Vec::Zero(n);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double w = base.x(a) * base.y(b) - base.x(b) * base.y(a);
      if (w != 0.0) bracket += w * lie_bracket(s, a, b, q);
    }
    bracket += xj_of_v(a) * f.col(a) - yj_of_u(a) * f.col(a);
  }

  const double lambda = base.lambda;
  const double along_y = d_eta(eta, bracket, yj, q);
  const double along_x = d_eta(eta, bracket, xj, q);
  QuasiReebResult out;
  out.z = -bracket / lambda + (along_y / (lambda * lambda)) * xj - (along_x / (lambda * lambda)) * yj;
  out.x = xj;
  out.y = yj;
  out.bracket = bracket;
  out.lambda = lambda;
  return out;
}

}  // namespace sublap
