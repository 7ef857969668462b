#pragma once

#include "sublap/structure.hpp"

#include <functional>

namespace sublap {

/// Frame coordinates h_alpha = <lambda, X_alpha> of a covector at a base point.
struct CovectorCoords {
  Vec h;

  /// Unit-cylinder covector: the horizontal part is rescaled so that
  /// h_1^2 + ... + h_k^2 = 1; the vertical part is kept as given.
  static CovectorCoords unit_cylinder(const Vec& h, int k);
};

/// H = (1/2) sum_{i<k} h_i^2.
double hamiltonian(const CovectorCoords& c, int k);

struct GeodesicState {
  Vec q;
  Vec h;
  double t = 0.0;
};

struct StateDerivative {
  Vec dq;
  Vec dh;
};

/// Hamilton's equations in frame coordinates:
///   dq/dt = sum_i h_i X_i(q),
///   dh_alpha/dt = sum_i sum_beta h_i c_{i alpha}^beta h_beta.
StateDerivative geodesic_rhs(const GeodesicState& state, const Structure& s);

struct ExpMapResult {
  Vec q;
  Vec h;
  /// max over steps of |2H(t) - 2H(0)|
  double energy_drift = 0.0;
  /// sub-Riemannian length of the traced curve
  double arc_length = 0.0;
};

/// Integration step used by walks for a geodesic of the given duration.
double walk_ode_step(double duration);

inline constexpr double kDefaultOdeStep = 1e-3;

/// Fixed-step RK4 integration of the geodesic from (q, c) over [0, t].
/// The step is shrunk so that an integer number of steps lands on t.
/// `observer`, if set, sees every accepted state including the first.
ExpMapResult exp_map(const Vec& q, const CovectorCoords& c, double t, const Structure& s,
                     double step = kDefaultOdeStep,
                     const std::function<void(const GeodesicState&, double drift)>& observer = {});

/// phi(exp_q(t, c)) minus the zeroth, first and second order terms of the
/// frame Taylor expansion along the geodesic.
double taylor_residual(const ScalarFunction& phi, const Vec& q, const CovectorCoords& c, double t,
                       const Structure& s);

}  // namespace sublap
