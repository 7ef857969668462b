#pragma once

#include "sublap/forms.hpp"
#include "sublap/structure.hpp"

#include <functional>
#include <vector>

namespace sublap {

/// Coordinate one-form eta = sum_a eta_a dq_a.
struct OneForm {
  std::function<Vec(const Vec&)> coeffs;
  /// Optional; entry (a, b) is d eta_a / d q_b.
  std::function<Mat(const Vec&)> jacobian;

  Vec at(const Vec& q) const;
  Mat derivative(const Vec& q) const;
  /// A_ab = d eta(e_a, e_b) = d_a eta_b - d_b eta_a.
  Mat d_matrix(const Vec& q) const;
  Form as_form(const Vec& q) const { return Form::one_form(at(q)); }
  Form d_form(const Vec& q) const { return Form::two_form(d_matrix(q)); }
};

/// Annihilator of the horizontal frame, eta(X_i) = 0 for i < k and eta(X_n) = 1.
/// Corank 1 only.
OneForm reconstruct_annihilator(const Structure& s);

/// d eta(u, v) for vectors at q (constant extensions).
double d_eta(const OneForm& eta, const Vec& u, const Vec& v, const Vec& q);

/// d eta(X_a, X_b) by Cartan's formula X_a(eta(X_b)) - X_b(eta(X_a)) - eta([X_a, X_b]).
double d_eta_frame(const OneForm& eta, int a, int b, const Vec& q, const Structure& s);

/// Matrix of J in the orthonormal horizontal frame, m_ij = d eta(X_i, X_j).
struct JMatrix {
  Mat m;
  /// (sum m_ij^2)^{-1/2}; multiplying eta by it gives |J| = 1.
  double scale = 1.0;

  /// Validates skew-symmetry (|m_ij + m_ji| < tol) and the step-2 condition.
  static JMatrix from_matrix(const Mat& m, double skew_tol = 1e-8);
  Mat normalized() const { return scale * m; }
};

JMatrix j_matrix(const Vec& q, const Structure& s, const OneForm& eta);

/// scale(q) * eta with scale from j_matrix; the derivative includes d(scale).
OneForm normalize(const OneForm& eta, const Structure& s);

/// Unique Z with d eta(Z, .) = 0 and eta(Z) = 1. `eta` must be normalized.
Vec reeb(const Vec& q, const Structure& s, const OneForm& eta);

/// Some Z with eta(Z) = 1: the coordinate dual of eta, rescaled.
Vec transverse_unit(const Vec& q, const OneForm& eta);

/// Popp density at q (against the coordinate n-form), from the orthonormal
/// extension X_1..X_k, Z with normalized eta(Z) = 1. Corank 1, step 2.
double popp_corank1(const Vec& q, const Structure& s, const OneForm& eta);
/// Same with a caller-supplied transverse direction (rescaled internally).
double popp_corank1(const Vec& q, const Structure& s, const OneForm& eta, const Vec& transverse);

VolumeForm popp_volume(const Structure& s, const OneForm& eta);

/// Real generators of one eigenplane of a skew matrix, as frame coefficients:
/// J x = -lambda y, J y = lambda x.
struct EigenPlane {
  double lambda = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Eigenplanes sorted by increasing lambda > 0. Throws QuasiReebUndefined when
/// two nonzero eigenvalues are closer than `gap` or the kernel is not simple
/// where required.
std::vector<EigenPlane> eigen_planes(const Mat& j, double gap = 1e-6);

struct QuasiReebResult {
  Vec z;          ///< Z_j in coordinates
  Vec x;          ///< X_j in coordinates
  Vec y;          ///< Y_j in coordinates
  Vec bracket;    ///< [X_j, Y_j] in coordinates
  double lambda = 0.0;
};

/// Quasi-Reeb field Z_j of the j-th eigenplane (0-based, ordered by lambda).
/// `eta` must be normalized.
QuasiReebResult quasi_reeb(int j, const Vec& q, const Structure& s, const OneForm& eta);

}  // namespace sublap
