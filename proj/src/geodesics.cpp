#include "sublap/geodesics.hpp"

#include <array>
#include <cmath>

namespace sublap {

CovectorCoords CovectorCoords::unit_cylinder(const Vec& h, int k) {
  const double norm = h.head(k).norm();
  if (norm == 0.0) throw Error(ErrorKind::Input, "horizontal part of covector is zero");
  CovectorCoords c{h};
  c.h.head(k) /= norm;
  return c;
}

double hamiltonian(const CovectorCoords& c, int k) { return 0.5 * c.h.head(k).squaredNorm(); }

StateDerivative geodesic_rhs(const GeodesicState& state, const Structure& s) {
  const int n = s.dim();
  const int k = s.rank();
  const Vec& q = state.q;
  const Vec& h = state.h;

  Mat frame = s.frame(q);
  Eigen::PartialPivLU<Mat> lu(frame);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 1e-12 * pivots.maxCoeff())) {
    throw Error(ErrorKind::DegenerateFrame, "frame not invertible at " + format_point(q));
  }

  // sum_i h_i c_{i alpha}^beta h_beta = <lambda, [V, X_alpha]> with V = sum_i h_i X_i
  // and lambda = Frame^{-T} h in coordinates.
  std::array<Mat, kMaxDim> jac;
  Vec velocity = Vec::Zero(n);
  Mat jac_velocity = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    jac[static_cast<size_t>(a)] = jacobian(s, a, q);
    if (a < k) {
      velocity += h(a) * frame.col(a);
      jac_velocity += h(a) * jac[static_cast<size_t>(a)];
    }
  }
  Vec covector = lu.transpose().solve(h);

  StateDerivative d{velocity, Vec(n)};
  for (int a = 0; a < n; ++a) {
    Vec bracket = jac[static_cast<size_t>(a)] * velocity - jac_velocity * frame.col(a);
    d.dh(a) = covector.dot(bracket);
  }
  return d;
}

double walk_ode_step(double duration) { return std::max(duration / 100.0, 1e-4); }

namespace {

void check_finite(const GeodesicState& st) {
  bool ok = st.q.allFinite() && st.h.allFinite() && st.q.cwiseAbs().maxCoeff() < 1e8;
  if (!ok) {
    throw Error(ErrorKind::Integration,
                "geodesic escaped or became non-finite at t = " + std::to_string(st.t));
  }
}

}  // namespace

ExpMapResult exp_map(const Vec& q, const CovectorCoords& c, double t, const Structure& s,
                     double step, const std::function<void(const GeodesicState&, double)>& observer) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Input, "negative geodesic duration");
  if (!(step > 0.0)) throw Error(ErrorKind::Input, "non-positive integration step");
  const int k = s.rank();

  GeodesicState st{q, c.h, 0.0};
  const double energy0 = st.h.head(k).squaredNorm();
  ExpMapResult out{q, c.h, 0.0, 0.0};
  if (observer) observer(st, 0.0);
  if (t == 0.0) return out;

  const long steps = std::max(1L, static_cast<long>(std::ceil(t / step - 1e-9)));
  const double dt = t / static_cast<double>(steps);
  double speed = std::sqrt(energy0);

  for (long m = 0; m < steps; ++m) {
    auto k1 = geodesic_rhs(st, s);
    GeodesicState tmp{st.q + 0.5 * dt * k1.dq, st.h + 0.5 * dt * k1.dh, st.t + 0.5 * dt};
    auto k2 = geodesic_rhs(tmp, s);
    tmp.q = st.q + 0.5 * dt * k2.dq;
    tmp.h = st.h + 0.5 * dt * k2.dh;
    auto k3 = geodesic_rhs(tmp, s);
    tmp.q = st.q + dt * k3.dq;
    tmp.h = st.h + dt * k3.dh;
    tmp.t = st.t + dt;
    auto k4 = geodesic_rhs(tmp, s);

    st.q += dt / 6.0 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
    st.h += dt / 6.0 * (k1.dh + 2 * k2.dh + 2 * k3.dh + k4.dh);
    st.t = static_cast<double>(m + 1) * dt;
    check_finite(st);

    const double energy = st.h.head(k).squaredNorm();
    const double next_speed = std::sqrt(energy);
    out.arc_length += 0.5 * dt * (speed + next_speed);
    speed = next_speed;
    out.energy_drift = std::max(out.energy_drift, std::abs(energy - energy0));
    if (observer) observer(st, out.energy_drift);
  }
  out.q = st.q;
  out.h = st.h;
  return out;
}

double taylor_residual(const ScalarFunction& phi, const Vec& q, const CovectorCoords& c, double t,
                       const Structure& s) {
  const int n = s.dim();
  const int k = s.rank();
  const Vec& h = c.h;
  if (t == 0.0) return 0.0;

  const double step = std::min(kDefaultOdeStep, t / 10.0);
  const Vec end = exp_map(q, c, t, s, step).q;

  const Vec first = grad_h(phi, q, s);
  const auto cs = structural_functions(s, q);

  double first_order = 0.0;
  for (int i = 0; i < k; ++i) first_order += h(i) * first(i);

  // h_j c_{ji}^alpha h_alpha X_i(phi) + h_i h_j X_j X_i(phi)
  double drift = 0.0;
  for (int i = 0; i < k; ++i) {
    double coeff = 0.0;
    for (int j = 0; j < k; ++j) {
      for (int a = 0; a < n; ++a) coeff += h(j) * cs(j, i, a) * h(a);
    }
    drift += coeff * first(i);
  }
  Vec horizontal = Vec::Zero(n);
  horizontal.head(k) = h.head(k);
  const double hessian = second_along(phi, horizontal, q, s);

  return phi(end) - (phi(q) + t * first_order + 0.5 * t * t * (drift + hessian));
}

}  // namespace sublap
