#include "sublap/compatibility.hpp"

#include <array>
#include <cmath>

namespace sublap {

const char* to_string(Solvability status) {
  switch (status) {
    case Solvability::Unique: return "unique";
    case Solvability::Affine: return "affine";
    case Solvability::None: return "none";
  }
  return "none";
}

namespace {

Mat horizontal_frame(const Structure& s, const Vec& q) {
  Mat f(s.dim(), s.rank());
  for (int i = 0; i < s.rank(); ++i) f.col(i) = s.field_value(i, q);
  return f;
}

// theta = log |omega(X_1, ..., X_k, Z)| for any Z with eta(Z) = 1.
double corank1_theta(const VolumeForm& omega, const Vec& q, const Structure& s,
                     const OneForm& eta) {
  const double rho = omega.density(q);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorKind::InvalidVolume, "density " + std::to_string(rho) + " at " + format_point(q));
  }
  Mat ext(s.dim(), s.dim());
  ext.leftCols(s.rank()) = horizontal_frame(s, q);
  ext.col(s.rank()) = transverse_unit(q, eta);
  return std::log(rho * std::abs(ext.determinant()));
}

Vec corank1_grad_theta(const VolumeForm& omega, const Vec& q, const Structure& s,
                       const OneForm& eta) {
  ScalarFunction theta{[&](const Vec& x) { return corank1_theta(omega, x, s, eta); }, {}};
  return grad_h(theta, q, s);
}

void require_corank1(const Structure& s) {
  if (s.dim() != s.rank() + 1) {
    throw Error(ErrorKind::InvalidSpec, "structure '" + s.name() + "' is not corank 1");
  }
}

}  // namespace

Vec contact_complement(const VolumeForm& omega, const Vec& q, const Structure& s,
                       const OneForm& eta) {
  require_corank1(s);
  const Mat m = j_matrix(q, s, eta).m;
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorKind::NotContact, "J is singular at " + format_point(q));
  const Vec z = reeb(q, s, eta);
  const Vec xi = -lu.solve(corank1_grad_theta(omega, q, s, eta));
  return z + horizontal_frame(s, q) * xi;
}

SolvabilityReport corank1_solve(const VolumeForm& omega, const Vec& q, const Structure& s,
                                const OneForm& eta, const SolveTolerances& tol) {
  require_corank1(s);
  const int k = s.rank();
  const Mat f = horizontal_frame(s, q);
  const Mat m = j_matrix(q, s, eta).m;
  const Mat a = eta.d_matrix(q);

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) rank += sigma(i) > tol.rank ? 1 : 0;
  svd.setThreshold(tol.rank / std::max(sigma(0), 1e-300));

  const Vec z = rank == k ? reeb(q, s, eta) : transverse_unit(q, eta);
  // Compatibility d eta(X_0, X_i) = X_i(theta) with X_0 = Z + sum xi_j X_j
  // reads J xi = d eta(Z, X_.) - grad(theta).
  Vec b(k);
  for (int i = 0; i < k; ++i) b(i) = z.dot(a * f.col(i));
  b -= corank1_grad_theta(omega, q, s, eta);

  SolvabilityReport out;
  const Vec xi = svd.solve(b);
  out.residual = (m * xi - b).norm();
  out.complement = z + f * xi;
  if (rank == k) {
    out.status = Solvability::Unique;
    return out;
  }
  if (out.residual < tol.consistent) {
    out.status = Solvability::Affine;
    out.dimension = k - rank;
    for (int i = rank; i < k; ++i) out.kernel.push_back(f * svd.matrixV().col(i));
    return out;
  }
  out.status = Solvability::None;
  out.certified = out.residual > tol.infeasible;
  return out;
}

VectorField solved_complement_field(const VolumeForm& omega, const Structure& s,
                                    const OneForm& eta, const SolveTolerances& tol) {
  return {[omega, s, eta, tol](const Vec& q) {
            auto report = corank1_solve(omega, q, s, eta, tol);
            if (report.status == Solvability::None) {
              throw Error(ErrorKind::Evaluation, "no compatible complement at " + format_point(q));
            }
            return report.complement;
          },
          {}};
}

CarnotSpec::CarnotSpec(int n, int k) : n_(n), k_(k), c_(static_cast<size_t>(n * n * n), 0.0) {
  if (n < 2 || k < 1 || k >= n) throw Error(ErrorKind::InvalidSpec, "Carnot dimensions");
}

CarnotSpec CarnotSpec::corank1(const Eigen::MatrixXd& a) {
  const int k = static_cast<int>(a.rows());
  if (a.cols() != k) throw Error(ErrorKind::InvalidSpec, "A must be square");
  if (!((a + a.transpose()).cwiseAbs().maxCoeff() < 1e-12)) {
    throw Error(ErrorKind::InvalidSpec, "A must be antisymmetric");
  }
  CarnotSpec spec(k + 1, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) spec.set_bracket(i, j, k, a(i, j));
  }
  return spec;
}

void CarnotSpec::set_bracket(int i, int j, int l, double value) {
  c_[index(i, j, l)] = value;
  c_[index(j, i, l)] = -value;
}

double CarnotSpec::jacobi_defect() const {
  double worst = 0.0;
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      for (int c = 0; c < n_; ++c) {
        for (int l = 0; l < n_; ++l) {
          double sum = 0.0;
          for (int m = 0; m < n_; ++m) {
            sum += (*this)(a, b, m) * (*this)(m, c, l) + (*this)(b, c, m) * (*this)(m, a, l) +
                   (*this)(c, a, m) * (*this)(m, b, l);
          }
          worst = std::max(worst, std::abs(sum));
        }
      }
    }
  }
  return worst;
}

void CarnotSpec::validate(double tol) const {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int l = 0; l < n_; ++l) {
        if (std::abs((*this)(i, j, l) + (*this)(j, i, l)) > tol) {
          throw Error(ErrorKind::InvalidSpec, "structure constants not antisymmetric");
        }
      }
    }
  }
  const double defect = jacobi_defect();
  if (defect > tol) {
    throw Error(ErrorKind::InvalidSpec, "Jacobi identity violated by " + std::to_string(defect));
  }
}

bool ComplementSpace::contains(const Eigen::VectorXd& ell, double tol) const {
  return (functionals * ell).cwiseAbs().maxCoeff() < tol;
}

ComplementSpace carnot_complements(const CarnotSpec& spec) {
  spec.validate();
  const int n = spec.dim();
  const int k = spec.rank();
  const int vertical = n - k;

  ComplementSpace out;
  out.functionals = Eigen::MatrixXd::Zero(k, k * vertical);
  // tr(l o ad_{X_i}) = sum_{a <= k, b > k} l_{ab} c_{ia}^b
  for (int i = 0; i < k; ++i) {
    for (int a = 0; a < k; ++a) {
      for (int b = k; b < n; ++b) out.functionals(i, a * vertical + (b - k)) = spec(i, a, b);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(out.functionals);
  lu.setThreshold(1e-10);
  out.basis = lu.kernel();
  out.dimension = k * vertical - static_cast<int>(lu.rank());
  if (out.dimension == 0) out.basis = Eigen::MatrixXd::Zero(k * vertical, 0);
  return out;
}

namespace {

Form power(const Form& f, int times) {
  Form out(f.dim(), 0);
  out.at_mask(0) = 1.0;
  for (int i = 0; i < times; ++i) out = wedge(out, f);
  return out;
}

Form alpha_form(const OneForm& eta, const VectorField& complement, const Vec& q) {
  const Vec x0 = complement.value(q);
  const double eta_x0 = eta.at(q).dot(x0);
  if (!(std::abs(eta_x0) > 1e-12)) {
    throw Error(ErrorKind::Input, "complement is tangent to the distribution at " + format_point(q));
  }
  return (1.0 / eta_x0) * interior(x0, eta.d_form(q));
}

double top_coefficient(const Form& f) { return f.at_mask((1u << f.dim()) - 1u); }

struct GParts {
  Form d_alpha;
  double g;
};

GParts g_function(const Structure& s, const OneForm& eta, const VectorField& complement,
                  const Vec& q) {
  const int d = (s.dim() - 1) / 2;
  Form d_alpha = exterior_d(
      [&](const Vec& x) { return alpha_form(eta, complement, x); }, q);
  const Form e = eta.as_form(q);
  const Form de = eta.d_form(q);
  const double denominator = top_coefficient(wedge(e, power(de, d)));
  if (!(std::abs(denominator) > 1e-12)) {
    throw Error(ErrorKind::NotContact, "eta ^ (d eta)^d vanishes at " + format_point(q));
  }
  const double numerator = top_coefficient(wedge(wedge(d_alpha, e), power(de, d - 1)));
  return {d_alpha, -numerator / denominator};
}

}  // namespace

Form theta_differential(const Structure& s, const OneForm& eta, const VectorField& complement,
                        const Vec& q) {
  const double g = g_function(s, eta, complement, q).g;
  return alpha_form(eta, complement, q) + g * eta.as_form(q);
}

IntegrabilityReport contact_integrability(const Structure& s, const OneForm& eta,
                                          const VectorField& complement,
                                          const std::vector<Vec>& points, double tol) {
  require_corank1(s);
  if (s.dim() % 2 == 0) throw Error(ErrorKind::NotContact, "contact structures are odd-dimensional");
  const int k = s.rank();

  IntegrabilityReport report;
  for (const Vec& q : points) {
    const GParts parts = g_function(s, eta, complement, q);
    const Form dg = exterior_d_scalar(
        [&](const Vec& x) { return g_function(s, eta, complement, x).g; }, q);
    const Form condition =
        parts.d_alpha + wedge(dg, eta.as_form(q)) + parts.g * eta.d_form(q);

    std::vector<Vec> frame;
    for (int i = 0; i < k; ++i) frame.push_back(s.field_value(i, q));
    frame.push_back(reeb(q, s, eta));
    double worst = 0.0;
    for (size_t a = 0; a < frame.size(); ++a) {
      for (size_t b = a + 1; b < frame.size(); ++b) {
        worst = std::max(worst, std::abs(condition.evaluate({frame[a], frame[b]})));
      }
    }
    report.g.push_back(parts.g);
    report.violation.push_back(worst);
    report.max_violation = std::max(report.max_violation, worst);

    if (k == 2) {
      // Three-dimensional shortcut: only the Reeb contraction can fail.
      auto ratio = [&](const Vec& x) {
        Form da = exterior_d([&](const Vec& y) { return alpha_form(eta, complement, y); }, x);
        const Vec x1 = s.field_value(0, x);
        const Vec x2 = s.field_value(1, x);
        return da.evaluate({x1, x2}) / d_eta(eta, x1, x2, x);
      };
      const Form d_ratio = exterior_d_scalar(ratio, q);
      const Form contraction = interior(frame[2], parts.d_alpha) + d_ratio;
      report.reeb_contraction.push_back(std::max(std::abs(contraction.evaluate({frame[0]})),
                                                 std::abs(contraction.evaluate({frame[1]}))));
    }
  }
  report.integrable = report.max_violation < tol;
  return report;
}

ThetaReconstruction reconstruct_theta(const Structure& s, const OneForm& eta,
                                      const VectorField& complement, const Vec& q0, const Vec& q1,
                                      int panels) {
  static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                                    0.5688888888888889, 0.4786286704993665,
                                                    0.2369268850561891};
  const int n = s.dim();

  auto staircase = [&](bool forward) {
    Vec x = q0;
    double total = 0.0;
    for (int step = 0; step < n; ++step) {
      const int b = forward ? step : n - 1 - step;
      const double from = q0(b);
      const double length = q1(b) - from;
      if (length != 0.0) {
        const double width = length / panels;
        for (int p = 0; p < panels; ++p) {
          const double mid = from + (p + 0.5) * width;
          for (size_t g = 0; g < nodes.size(); ++g) {
            x(b) = mid + 0.5 * width * nodes[g];
            const Form dtheta = theta_differential(s, eta, complement, x);
            total += 0.5 * width * weights[g] * dtheta.at_mask(1u << b);
          }
        }
      }
      x(b) = q1(b);
    }
    return total;
  };

  ThetaReconstruction out;
  out.along_first = staircase(true);
  out.along_second = staircase(false);
  out.discrepancy = std::abs(out.along_first - out.along_second);
  return out;
}

}  // namespace sublap
