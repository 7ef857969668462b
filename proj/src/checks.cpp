#include "sublap/checks.hpp"

#include "sublap/compatibility.hpp"
#include "sublap/forms.hpp"
#include "sublap/geodesics.hpp"
#include "sublap/models.hpp"
#include "sublap/operators.hpp"
#include "sublap/randomwalk.hpp"
#include "sublap/volumes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace sublap {

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names = {"core-geometry", "geodesics",     "operators",
                                                 "volumes",       "compatibility", "randomwalk"};
  return names;
}

namespace {

class Recorder {
 public:
  Recorder(std::string suite, std::vector<CheckResult>& out) : suite_(std::move(suite)), out_(out) {}

  // passes when measured < tolerance
  void below(const std::string& name, double measured, double tolerance, std::string detail = {}) {
    out_.push_back({suite_, name, measured < tolerance, measured, tolerance, std::move(detail)});
  }
  void above(const std::string& name, double measured, double bound, std::string detail = {}) {
    out_.push_back({suite_, name, measured > bound, measured, bound, std::move(detail)});
  }
  void flag(const std::string& name, bool ok, std::string detail = {}) {
    out_.push_back({suite_, name, ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }

 private:
  std::string suite_;
  std::vector<CheckResult>& out_;
};

// Points where every builtin model is well away from its singular set.
std::vector<Vec> sample_points(int n, int count, double r, std::mt19937_64& rng) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) pts.push_back(random_point(n, r, rng));
  return pts;
}

CovectorCoords random_unit_covector(int n, int k, double vertical_sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec h(n);
  for (int a = 0; a < n; ++a) h(a) = normal(rng) * (a < k ? 1.0 : vertical_sigma);
  return CovectorCoords::unit_cylinder(h, k);
}

void core_geometry(Recorder& rec, std::mt19937_64& rng) {
  double antisym = 0.0, fd_gap = 0.0;
  for (const Model& m : builtin_models()) {
    const Structure& s = m.structure;
    const int n = s.dim();
    for (const Vec& q : sample_points(n, 100, 1.0, rng)) {
      const auto c = structural_functions(s, q);
      Eigen::PartialPivLU<Mat> lu(s.frame(q));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const Vec reverse = lu.solve(lie_bracket(s, j, i, q));
          for (int l = 0; l < n; ++l) antisym = std::max(antisym, std::abs(c(i, j, l) + reverse(l)));
        }
      }
    }
    for (const Vec& q : sample_points(n, 20, 1.0, rng)) {
      for (int a = 0; a < n; ++a) {
        const Mat fd = fd_jacobian([&](const Vec& x) { return s.field_value(a, x); }, q);
        fd_gap = std::max(fd_gap, (fd - jacobian(s, a, q)).cwiseAbs().maxCoeff());
      }
    }
  }
  rec.below("structural functions antisymmetric", antisym, 1e-8);
  rec.below("finite-difference Jacobians match analytic", fd_gap, 1e-8);

  const Structure h = heisenberg3().structure;
  double jacobi = 0.0;
  for (const Vec& q : sample_points(3, 20, 1.0, rng)) {
    const FieldFn b = [&](const Vec& x) { return lie_bracket(h, 0, 1, x); };
    const Vec nested = fd_jacobian(b, q) * h.field_value(0, q) - jacobian(h, 0, q) * b(q);
    jacobi = std::max(jacobi, nested.cwiseAbs().maxCoeff());
  }
  rec.below("Heisenberg [X1,[X1,X2]] vanishes", jacobi, 1e-6);

  double leibniz = 0.0;
  for (const Model& m : builtin_models()) {
    const int n = m.structure.dim();
    for (int trial = 0; trial < 20; ++trial) {
      const Polynomial p = random_polynomial(n, 2, rng);
      const Polynomial r = random_polynomial(n, 2, rng);
      const ScalarFunction product{[&](const Vec& x) { return p(x) * r(x); }, {}};
      const Vec q = random_point(n, 1.0, rng);
      const Vec lhs = grad_h(product, q, m.structure);
      const Vec rhs = p(q) * grad_h(r.as_function(), q, m.structure) +
                      r(q) * grad_h(p.as_function(), q, m.structure);
      leibniz = std::max(leibniz, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  rec.below("horizontal gradient obeys Leibniz", leibniz, 1e-5);
}

void geodesics(Recorder& rec, std::mt19937_64& rng) {
  double drift = 0.0, rescale = 0.0;
  for (const Model& m : builtin_models()) {
    const Structure& s = m.structure;
    for (int trial = 0; trial < 4; ++trial) {
      const Vec q = random_point(s.dim(), 0.5, rng);
      const CovectorCoords c = random_unit_covector(s.dim(), s.rank(), 1.0, rng);
      drift = std::max(drift, exp_map(q, c, 1.0, s).energy_drift);
      for (double alpha : {0.5, 2.0}) {
        const CovectorCoords scaled{alpha * c.h};
        const Vec a = exp_map(q, scaled, 0.5, s).q;
        const Vec b = exp_map(q, c, 0.5 * alpha, s).q;
        rescale = std::max(rescale, (a - b).cwiseAbs().maxCoeff());
      }
    }
  }
  rec.below("energy drift over unit time", drift, 1e-10);
  rec.below("rescaling identity", rescale, 1e-8);

  const Structure h = heisenberg3().structure;
  const CovectorCoords c = CovectorCoords::unit_cylinder(make_vec({0.6, 0.8, 1.5}), 2);
  const Vec origin = Vec::Zero(3);
  const Vec reference = exp_map(origin, c, 1.0, h, 0.0125).q;
  const double coarse = (exp_map(origin, c, 1.0, h, 0.1).q - reference).norm();
  const double fine = (exp_map(origin, c, 1.0, h, 0.05).q - reference).norm();
  const double ratio = coarse / fine;
  rec.flag("RK4 error ratio under step halving", ratio > 12.0 && ratio < 20.0,
           "ratio " + std::to_string(ratio));

  const ScalarFunction z = parse_function("z", 3);
  const CovectorCoords u = CovectorCoords::unit_cylinder(make_vec({0.6, 0.8, 1.3}), 2);
  std::vector<double> lt, lr;
  for (int m = 0; m <= 6; ++m) {
    const double t = 0.1 * std::pow(2.0, -m);
    lt.push_back(std::log(t));
    lr.push_back(std::log(std::abs(taylor_residual(z, origin, u, t, h))));
  }
  const double mt = std::accumulate(lt.begin(), lt.end(), 0.0) / lt.size();
  const double mr = std::accumulate(lr.begin(), lr.end(), 0.0) / lr.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < lt.size(); ++i) {
    sxy += (lt[i] - mt) * (lr[i] - mr);
    sxx += (lt[i] - mt) * (lt[i] - mt);
  }
  const double slope = sxy / sxx;
  rec.flag("Taylor residual is third order", slope >= 2.7 && slope <= 3.3,
           "slope " + std::to_string(slope));
}

struct VolumeCase {
  std::string name;
  VolumeForm omega;
};

std::vector<VolumeCase> volumes_for(const Model& m, std::mt19937_64& rng) {
  std::vector<VolumeCase> out = {{"lebesgue", VolumeForm::lebesgue()}};
  const Polynomial g = random_polynomial(m.structure.dim(), 2, rng);
  out.push_back({"exp-lebesgue", VolumeForm::exp_times([g](const Vec& q) { return 0.3 * g(q); },
                                                       VolumeForm::lebesgue())});
  if (m.corank1()) out.push_back({"popp", popp_volume(m.structure, m.annihilator())});
  return out;
}

void operators(Recorder& rec, std::mt19937_64& rng, bool mutate) {
  double gap = 0.0, change = 0.0, constant = 0.0, symbol = 0.0;
  for (const Model& m : builtin_models()) {
    const Structure& s = m.structure;
    const int n = s.dim();
    const int k = s.rank();
    const ScalarFunction one = parse_function("1", n);
    for (const auto& vol : volumes_for(m, rng)) {
      for (int trial = 0; trial < 12; ++trial) {
        const Vec q = random_point(n, 0.8, rng);
        const ScalarFunction phi = random_polynomial(n, 3, rng).as_function();
        const double delta = macroscopic(phi, vol.omega, q, s).value;
        const double micro = microscopic(phi, q, s).value;
        Vec x = chi(vol.omega, q, s);
        if (mutate) x = -x;
        gap = std::max(gap, std::abs(delta - micro - x.dot(grad_h(phi, q, s))));

        const Polynomial g = random_polynomial(n, 2, rng);
        const VolumeForm shifted =
            VolumeForm::exp_times([g](const Vec& y) { return g(y); }, vol.omega);
        const double lhs = macroscopic(phi, shifted, q, s).value - delta;
        change = std::max(change, std::abs(lhs - grad_h(g.as_function(), q, s).dot(grad_h(phi, q, s))));

        constant = std::max({constant, std::abs(macroscopic(one, vol.omega, q, s).value),
                             std::abs(microscopic(one, q, s).value)});
      }
    }
    for (int trial = 0; trial < 5; ++trial) {
      const Vec q = random_point(n, 0.8, rng);
      const Vec ell = random_point(n, 1.0, rng);
      auto exp_ell = [&](double sgn) {
        return ScalarFunction{[ell, sgn](const Vec& y) { return std::exp(sgn * ell.dot(y)); },
                              [ell, sgn](const Vec& y) {
                                return Vec(sgn * std::exp(sgn * ell.dot(y)) * ell);
                              }};
      };
      double expected = 0.0;
      for (int i = 0; i < k; ++i) expected += std::pow(ell.dot(s.field_value(i, q)), 2);
      const VolumeForm omega = m.corank1() ? popp_volume(s, m.annihilator()) : VolumeForm::lebesgue();
      const double w = std::exp(ell.dot(q));
      const double lead_micro =
          0.5 * (microscopic(exp_ell(1.0), q, s).value / w + microscopic(exp_ell(-1.0), q, s).value * w);
      const double lead_macro = 0.5 * (macroscopic(exp_ell(1.0), omega, q, s).value / w +
                                       macroscopic(exp_ell(-1.0), omega, q, s).value * w);
      const double scale = std::max(expected, 1e-3);
      symbol = std::max({symbol, std::abs(lead_micro - expected) / scale,
                         std::abs(lead_macro - expected) / scale});
    }
  }
  rec.below("chi is the first-order gap", gap, 1e-5);
  rec.below("change of volume adds grad(g)", change, 1e-5);
  rec.below("no zeroth-order term", constant, 1e-9);
  rec.below("principal symbols agree with 2H", symbol, 1e-4);

  const Structure h = heisenberg3().structure;
  const VolumeForm ex = VolumeForm::exp_times([](const Vec& y) { return y(0); }, VolumeForm::lebesgue());
  Vec x = chi(ex, make_vec({0.3, -0.2, 0.1}), h);
  if (mutate) x = -x;
  rec.below("chi of e^x volume is (1, 0)", (x - make_vec({1.0, 0.0})).norm(), 1e-6);
}

void volumes(Recorder& rec, std::mt19937_64& rng) {
  double annihilator = 0.0, idempotent = 0.0, popp_gap = 0.0, ortho = 0.0, curvature = 0.0;
  for (const Model& m : builtin_models()) {
    if (!m.corank1()) continue;
    const Structure& s = m.structure;
    const int n = s.dim();
    const int k = s.rank();
    const OneForm eta = m.annihilator();
    const OneForm unit = normalize(eta, s);
    for (const Vec& q : sample_points(n, 100, 1.0, rng)) {
      const Vec e = eta.at(q);
      for (int i = 0; i < k; ++i) annihilator = std::max(annihilator, std::abs(e.dot(s.field_value(i, q))));
    }
    for (const Vec& q : sample_points(n, 10, 0.8, rng)) {
      idempotent = std::max(idempotent, std::abs(j_matrix(q, s, unit).scale - 1.0));
      Vec other = transverse_unit(q, eta) * 3.0;
      for (int i = 0; i < k; ++i) other += (0.5 - i * 0.3) * s.field_value(i, q);
      const double a = popp_corank1(q, s, eta);
      const double b = popp_corank1(q, s, eta, other);
      popp_gap = std::max(popp_gap, std::abs(a - b) / std::max(1.0, a));
      for (const auto& p : eigen_planes(j_matrix(q, s, eta).normalized())) {
        ortho = std::max({ortho, std::abs(p.x.dot(p.y)), std::abs(p.x.norm() - 1.0),
                          std::abs(p.y.norm() - 1.0)});
      }
    }
    const Vec a = random_point(n, 0.8, rng);
    const Vec b = random_point(n, 0.8, rng);
    std::vector<double> rho;
    for (int i = 0; i <= 100; ++i) rho.push_back(popp_corank1(a + (b - a) * (i / 100.0), s, eta));
    for (size_t i = 1; i + 1 < rho.size(); ++i) {
      curvature = std::max(curvature, std::abs(rho[i + 1] - 2 * rho[i] + rho[i - 1]));
    }
  }
  rec.below("eta annihilates the distribution", annihilator, 1e-10);
  rec.below("normalization is idempotent", idempotent, 1e-12);
  rec.below("Popp density independent of transverse choice", popp_gap, 1e-10);
  rec.below("eigenplane generators orthonormal", ortho, 1e-10);
  rec.below("Popp density varies smoothly", curvature, 1e-3);

  double reeb_res = 0.0, reeb_norm = 0.0;
  for (const Model& m : {heisenberg3(), contact3_perturbed()}) {
    const Structure& s = m.structure;
    const OneForm unit = normalize(m.annihilator(), s);
    for (const Vec& q : sample_points(3, 20, 1.0, rng)) {
      const Vec z = reeb(q, s, unit);
      for (int i = 0; i < 2; ++i) reeb_res = std::max(reeb_res, std::abs(d_eta(unit, z, s.field_value(i, q), q)));
      reeb_norm = std::max(reeb_norm, std::abs(unit.at(q).dot(z) - 1.0));
    }
  }
  rec.below("Reeb field kills d eta", reeb_res, 1e-9);
  rec.below("Reeb field has eta = 1", reeb_norm, 1e-12);

  const Model carnot = builtin_models()[2];
  const OneForm unit = normalize(carnot.annihilator(), carnot.structure);
  double quasi = 0.0;
  for (const Vec& q : sample_points(4, 10, 1.0, rng)) {
    const auto r = quasi_reeb(0, q, carnot.structure, unit);
    quasi = std::max({quasi, std::abs(unit.at(q).dot(r.z) - 1.0), std::abs(d_eta(unit, r.z, r.x, q)),
                      std::abs(d_eta(unit, r.z, r.y, q))});
  }
  rec.below("quasi-Reeb defining residuals", quasi, 1e-8);
}

void compatibility(Recorder& rec, std::mt19937_64& rng) {
  const Model heis = heisenberg3();
  const Structure& h = heis.structure;
  const OneForm unit = normalize(heis.annihilator(), h);
  const VolumeForm popp = popp_volume(h, heis.annihilator());
  const VolumeForm ex = VolumeForm::exp_times([](const Vec& y) { return y(0); }, popp);

  double round_trip = 0.0;
  const Vec base = make_vec({0.2, -0.3, 0.4});
  const auto report = corank1_solve(ex, base, h, unit);
  rec.flag("e^x Popp on Heisenberg is uniquely solvable", report.status == Solvability::Unique);
  const Structure rebuilt = h.with_complement({solved_complement_field(ex, h, unit)});
  std::vector<Vec> near = {base};
  for (int i = 0; i < 20; ++i) near.push_back(base + random_point(3, 0.1, rng));
  for (const Vec& q : near) round_trip = std::max(round_trip, chi(ex, q, rebuilt).norm());
  rec.below("solved complement has chi = 0", round_trip, 1e-5);

  const Model carnot = builtin_models()[2];
  const OneForm cunit = normalize(carnot.annihilator(), carnot.structure);
  const VolumeForm cpopp = popp_volume(carnot.structure, carnot.annihilator());
  const Vec cq = make_vec({0.1, 0.2, -0.3, 0.5});
  const auto affine = corank1_solve(cpopp, cq, carnot.structure, cunit);
  rec.flag("quasi-contact Carnot with Popp is affine of dimension 1",
           affine.status == Solvability::Affine && affine.dimension == 1);
  const Structure crebuilt =
      carnot.structure.with_complement({solved_complement_field(cpopp, carnot.structure, cunit)});
  rec.below("affine particular solution has chi = 0", chi(cpopp, cq, crebuilt).norm(), 1e-5);

  const Structure standard = h.with_complement({{[](const Vec&) { return make_vec({0, 0, 1}); }, {}}});
  double scaling = 0.0, broken = 1e300;
  for (const Vec& q : sample_points(3, 10, 1.0, rng)) {
    scaling = std::max(scaling, (chi(popp.scaled(7.0), q, standard) - chi(popp, q, standard)).norm());
    broken = std::min(broken, chi(ex, q, standard).norm());
  }
  rec.below("constant rescaling keeps chi", scaling, 1e-10);
  rec.above("e^x rescaling breaks chi", broken, 0.5);

  bool law = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 5;
    const int r = 2 * static_cast<int>(rng() % static_cast<unsigned>(k / 2 + 1));
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i + 1 < r; i += 2) {
      const double l = 0.5 + (rng() % 100) / 50.0;
      block(i, i + 1) = l;
      block(i + 1, i) = -l;
    }
    const Eigen::MatrixXd rnd = Eigen::MatrixXd::Random(k, k);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(rnd);
    const Eigen::MatrixXd qm = qr.householderQ();
    Eigen::MatrixXd a = qm * block * qm.transpose();
    a = 0.5 * (a - a.transpose());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    int kernel = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) kernel += svd.singularValues()(i) < 1e-10;
    law = law && carnot_complements(CarnotSpec::corank1(a)).dimension == kernel;
  }
  rec.flag("Carnot complement dimension equals dim ker A", law);

  double dd = 0.0;
  for (int n : {3, 4}) {
    for (int p = 0; p <= n - 2; ++p) {
      std::vector<std::pair<unsigned, Polynomial>> coeffs;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) == p) coeffs.emplace_back(mask, random_polynomial(n, 3, rng));
      }
      const FormField omega = [&](const Vec& x) {
        Form f(n, p);
        for (const auto& [mask, poly] : coeffs) f.at_mask(mask) = poly(x);
        return f;
      };
      const Vec q = random_point(n, 1.0, rng);
      dd = std::max(dd, exterior_d([&](const Vec& x) { return exterior_d(omega, x); }, q).max_abs());
    }
  }
  rec.below("d^2 = 0 on polynomial forms", dd, 1e-7);

  double reeb_violation = 0.0;
  for (const Model& m : {heisenberg3(), contact3_perturbed()}) {
    const OneForm e = normalize(m.annihilator(), m.structure);
    const Structure& s = m.structure;
    const VectorField z{[s, e](const Vec& x) { return reeb(x, s, e); }, {}};
    reeb_violation = std::max(
        reeb_violation, contact_integrability(s, e, z, sample_points(3, 5, 0.8, rng)).max_violation);
  }
  rec.below("Reeb complement is integrable", reeb_violation, 1e-7);

  const double eps = 0.1;
  const VectorField linear{[eps](const Vec& x) { return make_vec({eps * x(0), 0.0, 1.0 - 0.5 * eps * x(0) * x(1)}); }, {}};
  const VectorField vertical{[eps](const Vec& x) { return make_vec({eps * x(2), 0.0, 1.0 - 0.5 * eps * x(2) * x(1)}); }, {}};
  const auto pts = sample_points(3, 5, 0.8, rng);
  rec.below("d_z + eps x X_1 is integrable", contact_integrability(h, unit, linear, pts).max_violation, 1e-6);
  const double violation = contact_integrability(h, unit, vertical, {Vec::Zero(3)}).max_violation;
  rec.below("d_z + eps z X_1 violation matches 3 eps / sqrt 2", std::abs(violation - 3 * eps / std::sqrt(2.0)), 1e-6);
}

void randomwalk(Recorder& rec, std::uint64_t seed, int workers) {
  const Model heis = heisenberg3();
  const Structure& h = heis.structure;
  Rng rng = derived_stream(seed, 7);
  const long draws = 1000000;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d fourth = Eigen::Matrix2d::Zero();
  double vertical = 0.0;
  for (long i = 0; i < draws; ++i) {
    const CovectorCoords c = sample_cylinder(h, VerticalLaw::dirac(), rng);
    const Eigen::Vector2d v(c.h(0), c.h(1));
    mean += v;
    const Eigen::Matrix2d outer = v * v.transpose();
    second += outer;
    fourth += outer.cwiseProduct(outer);
    vertical = std::max(vertical, std::abs(c.h(2)));
  }
  mean /= draws;
  second /= draws;
  fourth /= draws;
  rec.below("horizontal sphere mean", mean.cwiseAbs().maxCoeff(), 3e-3);
  double z_worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expect = i == j ? 0.5 : 0.0;
      const double sd = std::sqrt(std::max(fourth(i, j) - second(i, j) * second(i, j), 1e-300) / draws);
      z_worst = std::max(z_worst, std::abs(second(i, j) - expect) / sd);
    }
  }
  rec.below("second moments are delta / k", z_worst, 5.0, "in standard errors");
  rec.below("dirac vertical law is exactly zero", vertical, 1e-300);

  MeasureSpec spec{VerticalLaw::dirac(), seed};
  const ScalarFunction one = parse_function("1", 3);
  const Estimate constant = single_step_estimate(one, Vec::Zero(3), 0.01, 10000, h, spec, workers);
  rec.flag("constant function estimate is exactly zero", constant.mean == 0.0 && constant.std_error == 0.0);

  const Estimate x2 = single_step_estimate(parse_function("x^2", 3), Vec::Zero(3), 0.01, 100000, h, spec, workers);
  rec.below("single-step estimate of L x^2", std::abs(x2.mean - 2.0), 3 * x2.std_error + 0.05);

  WalkConfig cfg;
  cfg.t_step = 0.01;
  cfg.n_steps = 20;
  cfg.n_paths = 64;
  cfg.workers = 1;
  const WalkResult a = simulate_walk(Vec::Zero(3), cfg, h, spec);
  cfg.workers = 3;
  const WalkResult b = simulate_walk(Vec::Zero(3), cfg, h, spec);
  bool same = a.endpoints.size() == b.endpoints.size();
  for (size_t i = 0; same && i < a.endpoints.size(); ++i) same = a.endpoints[i] == b.endpoints[i];
  rec.flag("walk endpoints independent of worker count", same);
  rec.flag("dirac walk steps have the spatial scale length", a.irregular_steps == 0,
           "max ratio " + std::to_string(a.max_step_ratio));

  std::vector<VectorField> flat = {{[](const Vec&) { return make_vec({1, 0, 0}); }, {}},
                                   {[](const Vec&) { return make_vec({0, 1, 0}); }, {}},
                                   {[](const Vec&) { return make_vec({0, 0, 1}); }, {}}};
  const Structure commutative("commutative", 3, 2, flat);
  DiffusionConfig dc;
  dc.horizon = 1.0;
  dc.n_paths = 4000;
  dc.dt = 0.01;
  dc.seed = seed;
  dc.workers = workers;
  const auto d = reference_diffusion(Vec::Zero(3), dc, commutative);
  const Moment var = endpoint_moment(d.endpoints, parse_function("x^2", 3));
  rec.below("flat diffusion has variance 2T", std::abs(var.mean - 2.0), 4 * var.std_error);
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  for (const auto& name : options.suites) {
    if (std::find(check_suites().begin(), check_suites().end(), name) == check_suites().end()) {
      throw Error(ErrorKind::Input, "unknown suite '" + name + "'");
    }
  }
  auto wanted = [&](const std::string& name) {
    return options.suites.empty() ||
           std::find(options.suites.begin(), options.suites.end(), name) != options.suites.end();
  };
  std::vector<CheckResult> results;
  std::mt19937_64 rng(options.seed);
  const std::map<std::string, std::function<void(Recorder&)>> suites = {
      {"core-geometry", [&](Recorder& r) { core_geometry(r, rng); }},
      {"geodesics", [&](Recorder& r) { geodesics(r, rng); }},
      {"operators", [&](Recorder& r) { operators(r, rng, options.mutate_chi_sign); }},
      {"volumes", [&](Recorder& r) { volumes(r, rng); }},
      {"compatibility", [&](Recorder& r) { compatibility(r, rng); }},
      {"randomwalk", [&](Recorder& r) { randomwalk(r, options.seed, options.workers); }},
  };
  for (const auto& name : check_suites()) {
    if (!wanted(name)) continue;
    Recorder rec(name, results);
    try {
      suites.at(name)(rec);
    } catch (const Error& e) {
      rec.flag("suite completed", false, e.what());
    }
  }
  return results;
}

}  // namespace sublap
