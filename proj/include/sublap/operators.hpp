#pragma once

#include "sublap/structure.hpp"

namespace sublap {

/// Value of a second-order operator at a point, split by origin.
struct OperatorValue {
  double value = 0.0;
  double second_order = 0.0;      ///< sum_i X_i^2 phi
  double structural_drift = 0.0;  ///< first-order terms from the structural functions
  double theta_drift = 0.0;       ///< sum_i X_i(theta) X_i(phi); zero for L^V
};

/// Delta_omega phi = sum_i X_i^2 phi + sum_i sum_alpha c_{alpha i}^alpha X_i phi
///                 + sum_i X_i(theta) X_i phi.
OperatorValue macroscopic(const ScalarFunction& phi, const VolumeForm& omega, const Vec& q,
                          const Structure& s);

/// L^V phi = sum_i X_i^2 phi + sum_{i,j <= k} c_{ji}^j X_i phi, in the frame adapted
/// to the complement carried by `s`.
OperatorValue microscopic(const ScalarFunction& phi, const Vec& q, const Structure& s);

/// div^V(X_j) = -sum_{i <= k} <pi_D [X_j, X_i], X_i>.
double horizontal_divergence(int j, const Vec& q, const Structure& s);

/// Frame coefficients of chi = Delta_omega - L^V:
///   chi_i = sum_{j > k} c_{ji}^j + X_i(theta).
Vec chi(const VolumeForm& omega, const Vec& q, const Structure& s);

/// Drift of the diffusion generated by L^V: sum_{i,j <= k} c_{ji}^j X_i, in coordinates.
Vec microscopic_drift(const Vec& q, const Structure& s);

}  // namespace sublap
