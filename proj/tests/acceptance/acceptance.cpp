// Acceptance suite: one PASS/FAIL line per criterion, exit 1 on any failure.
//
// Usage: acceptance [criterion ...]   (default: all)

#include "sublap/compatibility.hpp"
#include "sublap/forms.hpp"
#include "sublap/geodesics.hpp"
#include "sublap/models.hpp"
#include "sublap/operators.hpp"
#include "sublap/randomwalk.hpp"
#include "sublap/volumes.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace sublap;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Vec> cube_points(int n, int count, std::mt19937_64& rng) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) pts.push_back(random_point(n, 1.0, rng));
  return pts;
}

Outcome heisenberg_compatibility() {
  const Model m = heisenberg3();
  const OneForm unit = normalize(m.annihilator(), m.structure);
  const Structure& base = m.structure;
  const Structure reeb_split =
      base.with_complement({{[base, unit](const Vec& q) { return reeb(q, base, unit); }, {}}});
  const VolumeForm popp = popp_volume(base, m.annihilator());
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  for (const Vec& q : cube_points(3, 100, rng)) worst = std::max(worst, chi(popp, q, reeb_split).norm());
  return {worst < 1e-5, "max |chi| " + num(worst)};
}

Outcome quasicontact_nonexistence() {
  const Model m = quasicontact_r4(GrowthChoice::Exp);
  const OneForm eta = m.annihilator();
  const OneForm unit = normalize(eta, m.structure);
  const VolumeForm popp = popp_volume(m.structure, eta);
  std::mt19937_64 rng(kSeed + 1);
  int none = 0;
  double min_residual = 1e300, det_gap = 0.0;
  const auto pts = cube_points(4, 50, rng);
  for (const Vec& q : pts) {
    const auto r = corank1_solve(popp, q, m.structure, unit);
    none += r.status == Solvability::None;
    min_residual = std::min(min_residual, r.residual);
    const double g = std::exp(q(2));
    const double expected = g * g * g * g / 4.0;
    det_gap = std::max(det_gap, std::abs(eta.d_matrix(q).determinant() - expected) / expected);
  }
  return {none == 50 && min_residual > 1e-3 && det_gap < 1e-6,
          std::to_string(none) + "/50 none, min residual " + num(min_residual) + ", det rel gap " +
              num(det_gap)};
}

int svd_kernel(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double top = std::max(svd.singularValues()(0), 1.0);
  int kernel = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) kernel += svd.singularValues()(i) < 1e-10 * top;
  return kernel;
}

Outcome carnot_kernel_law() {
  Eigen::MatrixXd contact = Eigen::MatrixXd::Zero(3, 3);
  contact(0, 1) = 1.0;
  contact(1, 0) = -1.0;
  Eigen::MatrixXd invertible(2, 2);
  invertible << 0.0, 2.5, -2.5, 0.0;
  Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(4, 4);
  wide(0, 1) = 1.0;
  wide(1, 0) = -1.0;
  const Eigen::MatrixXd rnd = Eigen::MatrixXd::Random(4, 4);
  const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(rnd).householderQ();
  wide = rot * wide * rot.transpose();
  wide = 0.5 * (wide - wide.transpose());

  bool ok = true;
  std::string detail;
  for (const Eigen::MatrixXd& a : {contact, invertible, wide}) {
    const int dim = carnot_complements(CarnotSpec::corank1(a)).dimension;
    const int kernel = svd_kernel(a);
    ok = ok && dim == kernel;
    detail += (detail.empty() ? "" : ", ") + std::to_string(dim) + " vs " + std::to_string(kernel);
  }
  return {ok, "dimension vs dim ker A: " + detail};
}

Outcome operator_identities() {
  std::mt19937_64 rng(kSeed + 3);
  double change = 0.0, gap = 0.0, constant = 0.0;
  for (const Model& m : builtin_models()) {
    const Structure& s = m.structure;
    const int n = s.dim();
    const VolumeForm omega = m.corank1() ? popp_volume(s, m.annihilator()) : VolumeForm::lebesgue();
    const ScalarFunction one = parse_function("1", n);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec q = random_point(n, 1.0, rng);
      const ScalarFunction phi = random_polynomial(n, 3, rng).as_function();
      const Polynomial g = random_polynomial(n, 2, rng);
      const VolumeForm shifted = VolumeForm::exp_times([g](const Vec& y) { return g(y); }, omega);
      const Vec dphi = grad_h(phi, q, s);
      const double delta = macroscopic(phi, omega, q, s).value;
      const double delta_shifted = macroscopic(phi, shifted, q, s).value;
      change = std::max(change, std::abs(delta_shifted - delta - grad_h(g.as_function(), q, s).dot(dphi)));
      const double micro = microscopic(phi, q, s).value;
      gap = std::max(gap, std::abs(delta - micro - chi(omega, q, s).dot(dphi)));
      constant = std::max({constant, std::abs(macroscopic(one, omega, q, s).value),
                           std::abs(microscopic(one, q, s).value)});
    }
  }
  return {change < 1e-5 && gap < 1e-5 && constant < 1e-9,
          "change-of-volume " + num(change) + ", chi gap " + num(gap) + ", constant " + num(constant)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Outcome geodesic_integrity() {
  std::mt19937_64 rng(kSeed + 4);
  std::normal_distribution<double> normal(0.0, 1.0);
  double drift = 0.0, rescale = 0.0;
  for (const Model& m : builtin_models()) {
    const Structure& s = m.structure;
    const int n = s.dim();
    for (int trial = 0; trial < 5; ++trial) {
      const Vec q = random_point(n, 0.5, rng);
      Vec h(n);
      for (int a = 0; a < n; ++a) h(a) = normal(rng);
      const CovectorCoords c = CovectorCoords::unit_cylinder(h, s.rank());
      drift = std::max(drift, exp_map(q, c, 1.0, s).energy_drift);
      for (double alpha : {0.25, 0.5, 2.0}) {
        const Vec a = exp_map(q, CovectorCoords{alpha * c.h}, 0.4, s).q;
        const Vec b = exp_map(q, c, 0.4 * alpha, s).q;
        rescale = std::max(rescale, (a - b).cwiseAbs().maxCoeff());
      }
    }
  }

  double slope_min = 1e300, slope_max = -1e300;
  const std::vector<std::pair<Model, std::string>> cases = {
      {heisenberg3(), "z + x*y + x^3"}, {contact3_perturbed(), "x*z + y^2 + z^3"}};
  for (const auto& [m, expr] : cases) {
    const ScalarFunction phi = parse_function(expr, 3);
    const Vec q = make_vec({0.2, -0.1, 0.3});
    const CovectorCoords c = CovectorCoords::unit_cylinder(make_vec({0.6, 0.8, 1.3}), 2);
    std::vector<double> lt, lr;
    for (int j = 0; j <= 6; ++j) {
      const double t = 0.1 * std::pow(2.0, -j);
      lt.push_back(std::log(t));
      lr.push_back(std::log(std::abs(taylor_residual(phi, q, c, t, m.structure))));
    }
    const double slope = loglog_slope(lt, lr);
    slope_min = std::min(slope_min, slope);
    slope_max = std::max(slope_max, slope);
  }
  return {drift < 1e-10 && rescale < 1e-8 && slope_min >= 2.7 && slope_max <= 3.3,
          "energy drift " + num(drift) + ", rescaling " + num(rescale) + ", Taylor slopes [" +
              num(slope_min) + ", " + num(slope_max) + "]"};
}

Outcome monte_carlo_operator(int workers) {
  const Model m = heisenberg3();
  const Structure& s = m.structure;
  const std::vector<std::string> names = {"x^2", "z", "x*z"};
  std::vector<ScalarFunction> phis;
  for (const auto& name : names) phis.push_back(parse_function(name, 3));
  const long draws = 1000000;
  const double t = 0.01;
  bool ok = true;
  std::string detail;
  for (const Vec& q : {Vec(Vec::Zero(3)), make_vec({0.5, -0.3, 0.2})}) {
    const auto dirac = single_step_estimate(phis, q, t, draws, s, {VerticalLaw::dirac(), kSeed}, workers);
    const auto gauss =
        single_step_estimate(phis, q, t, draws, s, {VerticalLaw::gaussian(1.0), kSeed + 1}, workers);
    detail += (detail.empty() ? "at " : " | at ") + format_point(q) + " ";
    for (size_t i = 0; i < phis.size(); ++i) {
      const double exact = microscopic(phis[i], q, s).value;
      const double err = std::abs(dirac[i].mean - exact);
      const double joint = std::hypot(dirac[i].std_error, gauss[i].std_error);
      const double law_gap = std::abs(dirac[i].mean - gauss[i].mean);
      ok = ok && err < 3 * dirac[i].std_error + 0.05 && law_gap < 3 * joint;
      detail += (i ? "; " : "") + names[i] + ": " + num(dirac[i].mean) + " vs " + num(exact) + " (se " +
                num(dirac[i].std_error) + "), laws " + num(law_gap / joint) + " sigma apart";
    }
  }
  return {ok, detail};
}

Outcome walk_to_diffusion(int workers) {
  const Model m = heisenberg3();
  const Structure& s = m.structure;
  WalkConfig cfg;
  cfg.t_step = 0.005;
  cfg.n_steps = 200;
  cfg.n_paths = 10000;
  cfg.workers = workers;
  const WalkResult walk = simulate_walk(Vec::Zero(3), cfg, s, {VerticalLaw::dirac(), kSeed});
  DiffusionConfig dc;
  dc.horizon = 1.0;
  dc.n_paths = 10000;
  dc.dt = 1e-3;
  dc.seed = kSeed + 7;
  dc.workers = workers;
  const DiffusionResult diff = reference_diffusion(Vec::Zero(3), dc, s);
  bool ok = true;
  std::string detail;
  for (const std::string name : {"x^2", "y^2", "z", "z^2"}) {
    const ScalarFunction phi = parse_function(name, 3);
    const Moment a = endpoint_moment(walk.endpoints, phi);
    const Moment b = endpoint_moment(diff.endpoints, phi);
    const double joint = std::hypot(a.std_error, b.std_error);
    const double gap = std::abs(a.mean - b.mean);
    ok = ok && gap < 3 * joint + 0.1;
    detail += (detail.empty() ? "" : "; ") + name + ": " + num(a.mean) + " vs " + num(b.mean) + " (3 sigma " +
              num(3 * joint) + ")";
  }
  return {ok, detail};
}

Outcome popp_invariance() {
  std::mt19937_64 rng(kSeed + 8);
  double transverse = 0.0;
  for (const Model& m : builtin_models()) {
    if (!m.corank1()) continue;
    const Structure& s = m.structure;
    const OneForm eta = m.annihilator();
    for (const Vec& q : cube_points(s.dim(), 20, rng)) {
      Vec other = 2.5 * transverse_unit(q, eta);
      for (int i = 0; i < s.rank(); ++i) other += (0.7 - 0.4 * i) * s.field_value(i, q);
      const double a = popp_corank1(q, s, eta);
      const double b = popp_corank1(q, s, eta, other);
      transverse = std::max(transverse, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  }
  const Model heis = heisenberg3();
  double heis_gap = 0.0;
  for (const Vec& q : cube_points(3, 20, rng)) {
    heis_gap = std::max(heis_gap, std::abs(popp_corank1(q, heis.structure, heis.annihilator()) - 1 / std::sqrt(2.0)));
  }
  const Model r4 = quasicontact_r4(GrowthChoice::Exp);
  double r4_gap = 0.0;
  for (const Vec& q : cube_points(4, 20, rng)) {
    const double expected = std::pow(std::exp(q(2)), 2.5) / std::sqrt(2.0);
    r4_gap = std::max(r4_gap, std::abs(popp_corank1(q, r4.structure, r4.annihilator()) - expected) / expected);
  }
  return {transverse < 1e-10 && heis_gap < 1e-10 && r4_gap < 1e-6,
          "transverse gap " + num(transverse) + ", Heisenberg " + num(heis_gap) + ", R^4 relative " + num(r4_gap)};
}

Outcome quasi_reeb_residuals() {
  const Model m = builtin_model("carnot-corank1");
  const Structure& s = m.structure;
  const OneForm unit = normalize(m.annihilator(), s);
  std::mt19937_64 rng(kSeed + 9);
  double residual = 0.0, shortcut = 0.0;
  for (const Vec& q : cube_points(4, 20, rng)) {
    const auto r = quasi_reeb(0, q, s, unit);
    residual = std::max({residual, std::abs(unit.at(q).dot(r.z) - 1.0), std::abs(d_eta(unit, r.z, r.x, q)),
                         std::abs(d_eta(unit, r.z, r.y, q))});
    shortcut = std::max(shortcut, (r.z + r.bracket / r.lambda).cwiseAbs().maxCoeff());
  }
  return {residual < 1e-8 && shortcut < 1e-8,
          "defining residuals " + num(residual) + ", shortcut gap " + num(shortcut)};
}

Outcome integrability_sanity() {
  std::mt19937_64 rng(kSeed + 10);
  double violation = 0.0;
  for (const Model& m : {heisenberg3(), contact3_perturbed()}) {
    const Structure& s = m.structure;
    const OneForm unit = normalize(m.annihilator(), s);
    const VectorField z{[s, unit](const Vec& x) { return reeb(x, s, unit); }, {}};
    violation = std::max(violation, contact_integrability(s, unit, z, cube_points(3, 10, rng)).max_violation);
  }
  double dd = 0.0;
  for (int n : {3, 4, 5}) {
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
  return {violation < 1e-7 && dd < 1e-7, "Reeb violation " + num(violation) + ", max |d d omega| " + num(dd)};
}

// Smooth bump supported in the ball of radius r around c.
ScalarFunction bump(const Vec& c, double r) {
  return {[c, r](const Vec& q) {
            const double s = (q - c).squaredNorm() / (r * r);
            return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
          },
          {}};
}

// |int (L phi) psi omega - int phi (L psi) omega| over [-2, 2]^3, relative to int |L phi psi| omega.
double symmetry_defect(const Structure& s, const VolumeForm& omega) {
  const ScalarFunction phi = bump(make_vec({0.3, 0.0, 0.1}), 1.4);
  const ScalarFunction psi = bump(make_vec({-0.3, 0.25, -0.1}), 1.4);
  const double h = 0.05;
  const int m = 80;
  double form = 0.0, scale = 0.0;
  Vec q(3);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      for (int l = 0; l <= m; ++l) {
        q << -2.0 + i * h, -2.0 + j * h, -2.0 + l * h;
        const double a = phi(q), b = psi(q);
        if (a == 0.0 && b == 0.0) continue;
        const double w = omega.density(q);
        const double lphi_psi = b == 0.0 ? 0.0 : microscopic(phi, q, s).value * b;
        const double phi_lpsi = a == 0.0 ? 0.0 : a * microscopic(psi, q, s).value;
        form += (lphi_psi - phi_lpsi) * w;
        scale += std::abs(lphi_psi) * w;
      }
    }
  }
  return std::abs(form) / scale;
}

Outcome symmetry_proxy() {
  const Structure h = heisenberg3().structure;
  const double compatible = symmetry_defect(h, VolumeForm::lebesgue());
  const double incompatible =
      symmetry_defect(h, VolumeForm::exp_times([](const Vec& y) { return y(0); }, VolumeForm::lebesgue()));
  return {compatible < 1e-6 && incompatible > 1e-2,
          "relative defect " + num(compatible) + " (Lebesgue) vs " + num(incompatible) + " (e^x)"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const int workers = resolve_workers(0);
  const std::vector<Criterion> criteria = {
      {1, "Heisenberg Reeb complement is compatible with Popp", 5, heisenberg_compatibility},
      {2, "quasi-contact R^4 admits no compatible complement", 10, quasicontact_nonexistence},
      {3, "Carnot complement dimension equals dim ker A", 60, carnot_kernel_law},
      {4, "operator identities on every builtin model", 30, operator_identities},
      {5, "geodesic integrity", 20, geodesic_integrity},
      {6, "microscopic formula vs Monte Carlo", 120, [&] { return monte_carlo_operator(workers); }},
      {7, "walk endpoints vs reference diffusion", 600, [&] { return walk_to_diffusion(workers); }},
      {8, "Popp density invariance and closed forms", 60, popp_invariance},
      {9, "quasi-Reeb defining residuals", 60, quasi_reeb_residuals},
      {10, "integrability sanity", 60, integrability_sanity},
      {11, "symmetry proxy on a quadrature grid", 300, symmetry_proxy},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool ok = out.passed && in_time;
    failed += !ok;
    std::printf("%s %2d  %s  [%s; %.2f s of %.0f s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%s: %d failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
