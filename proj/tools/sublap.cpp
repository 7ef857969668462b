// Command-line front end: report | geodesic | solve | walk | check.
//
// Exit codes: 0 success, 1 check-suite failure, 2 input error.

#include "sublap/checks.hpp"
#include "sublap/compatibility.hpp"
#include "sublap/geodesics.hpp"
#include "sublap/models.hpp"
#include "sublap/operators.hpp"
#include "sublap/randomwalk.hpp"
#include "sublap/volumes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sublap;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitSuiteFailure = 1;
constexpr int kExitInput = 2;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

json to_json(const OperatorValue& v) {
  return {{"value", v.value},
          {"second_order", v.second_order},
          {"structural_drift", v.structural_drift},
          {"theta_drift", v.theta_drift}};
}

Vec parse_vector(const std::string& text, int n, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw Error(ErrorKind::Input, what + ": cannot read '" + item + "' as a number");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != n) {
    throw Error(ErrorKind::Input, what + ": expected " + std::to_string(n) + " numbers, got " +
                                      std::to_string(values.size()));
  }
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = values[static_cast<size_t>(i)];
  return out;
}

/// "origin", "random:N[:radius]" or "a,b,c;d,e,f".
std::vector<Vec> parse_points(const std::string& spec, int n, std::uint64_t seed) {
  if (spec == "origin") return {Vec::Zero(n)};
  if (spec.rfind("random:", 0) == 0) {
    std::stringstream in(spec.substr(7));
    std::string count_text, radius_text;
    std::getline(in, count_text, ':');
    std::getline(in, radius_text, ':');
    char* end = nullptr;
    const long count = std::strtol(count_text.c_str(), &end, 10);
    if (end == count_text.c_str() || *end != '\0' || count < 1 || count > 1000000) {
      throw Error(ErrorKind::Input, "points: bad count '" + count_text + "'");
    }
    double radius = 1.0;
    if (!radius_text.empty()) {
      radius = std::strtod(radius_text.c_str(), &end);
      if (end == radius_text.c_str() || *end != '\0' || !(radius > 0.0)) {
        throw Error(ErrorKind::Input, "points: bad radius '" + radius_text + "'");
      }
    }
    std::mt19937_64 rng(seed);
    std::vector<Vec> pts;
    for (long i = 0; i < count; ++i) pts.push_back(random_point(n, radius, rng));
    return pts;
  }
  std::vector<Vec> pts;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ';')) pts.push_back(parse_vector(item, n, "points"));
  if (pts.empty()) throw Error(ErrorKind::Input, "points: empty specification");
  return pts;
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* env = std::getenv("SUBLAP_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw Error(ErrorKind::Input, std::string("SUBLAP_SEED: not an integer: ") + env);
  return v;
}

struct Tolerances {
  double rank = 1e-8;
  double consistent = 1e-8;
  double infeasible = 1e-4;
  double ode_step = kDefaultOdeStep;

  SolveTolerances solve() const { return {rank, consistent, infeasible}; }
  json to_json() const {
    return {{"rank", rank},
            {"consistent", consistent},
            {"infeasible", infeasible},
            {"ode_step", ode_step}};
  }
};

struct Common {
  std::string model = "heisenberg3";
  std::string params = "{}";
  std::string volume;
  std::string points = "origin";
  std::optional<std::uint64_t> seed_option;
  std::uint64_t seed = 0;
  int workers = 0;
  Tolerances tol;
};

Model load_model(const Common& c) {
  if (std::filesystem::is_regular_file(c.model)) {
    if (c.params != "{}") throw Error(ErrorKind::Input, "--params applies to builtin ids only");
    return load_model_file(c.model);
  }
  return builtin_model(c.model, c.params);
}

std::string default_volume(const Model& m) { return m.corank1() ? "popp" : "lebesgue"; }

json manifest(const std::string& command, const Model& m, const Common& c, const json& extra) {
  json out = {{"command", command},
              {"model", {{"id", m.id}, {"name", m.structure.name()}, {"params", json::parse(m.params)}}},
              {"seed", c.seed},
              {"workers", resolve_workers(c.workers)},
              {"tolerances", c.tol.to_json()},
              {"version", SUBLAP_VERSION}};
  for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Input, "cannot write '" + path + "'");
  out << text;
}

json solve_json(const SolvabilityReport& r) {
  json kernel = json::array();
  for (const Vec& v : r.kernel) kernel.push_back(to_json(v));
  return {{"status", to_string(r.status)},
          {"dimension", r.dimension},
          {"residual", r.residual},
          {"certified", r.certified},
          {"complement", to_json(r.complement)},
          {"kernel", kernel}};
}

json corank1_json(const Model& m, const VolumeForm& omega, const Vec& q, const Tolerances& tol) {
  const Structure& s = m.structure;
  const OneForm eta = m.annihilator();
  const OneForm unit = normalize(eta, s);
  const JMatrix j = j_matrix(q, s, eta);
  json out;
  out["J"] = to_json(j.normalized());
  out["popp_density"] = popp_corank1(q, s, eta);
  Eigen::JacobiSVD<Mat> svd(j.normalized());
  const bool contact = svd.singularValues().minCoeff() > 1e-8;
  out["contact"] = contact;
  try {
    json lambdas = json::array();
    for (const auto& p : eigen_planes(j.normalized())) lambdas.push_back(p.lambda);
    out["lambdas"] = lambdas;
  } catch (const Error& e) {
    out["lambdas"] = nullptr;
    out["lambdas_error"] = e.what();
  }
  if (contact) {
    out["reeb"] = to_json(reeb(q, s, unit));
  } else {
    try {
      out["quasi_reeb"] = to_json(quasi_reeb(0, q, s, unit).z);
    } catch (const Error& e) {
      out["quasi_reeb"] = nullptr;
      out["quasi_reeb_error"] = e.what();
    }
  }
  out["solve"] = solve_json(corank1_solve(omega, q, s, unit, tol.solve()));
  return out;
}

int cmd_report(const Common& c, const std::string& out_path) {
  const Model m = load_model(c);
  const std::string vol = c.volume.empty() ? default_volume(m) : c.volume;
  const VolumeForm omega = parse_volume(vol, m);
  const Structure& s = m.structure;
  const auto battery = test_battery(s.dim());
  json points = json::array();
  for (const Vec& q : parse_points(c.points, s.dim(), c.seed)) {
    json p;
    p["point"] = to_json(q);
    p["theta"] = get_theta(omega, q, s);
    p["chi"] = to_json(chi(omega, q, s));
    json ops = json::array();
    for (const auto& [name, phi] : battery) {
      ops.push_back({{"function", name},
                     {"delta_omega", to_json(macroscopic(phi, omega, q, s))},
                     {"l_v", to_json(microscopic(phi, q, s))}});
    }
    p["operators"] = ops;
    if (m.corank1()) p["corank1"] = corank1_json(m, omega, q, c.tol);
    points.push_back(p);
  }
  json doc = {{"manifest", manifest("report", m, c, {{"volume", vol}, {"points", c.points},
                                                      {"outputs", {{"report", out_path.empty() ? "-" : out_path}}}})},
              {"points", points}};
  emit(out_path, doc.dump(2) + "\n");
  return 0;
}

int cmd_solve(const Common& c, const std::string& out_path) {
  const Model m = load_model(c);
  if (!m.corank1()) throw Error(ErrorKind::Input, "solve needs a corank-1 structure");
  const std::string vol = c.volume.empty() ? default_volume(m) : c.volume;
  const VolumeForm omega = parse_volume(vol, m);
  const OneForm unit = normalize(m.annihilator(), m.structure);
  json points = json::array();
  std::string verdict;
  bool consistent = true;
  for (const Vec& q : parse_points(c.points, m.structure.dim(), c.seed)) {
    const auto r = corank1_solve(omega, q, m.structure, unit, c.tol.solve());
    json p = solve_json(r);
    p["point"] = to_json(q);
    points.push_back(p);
    const std::string status = to_string(r.status);
    if (verdict.empty()) verdict = status;
    if (status != verdict) consistent = false;
  }
  json doc = {{"manifest", manifest("solve", m, c, {{"volume", vol}, {"points", c.points},
                                                    {"outputs", {{"solve", out_path.empty() ? "-" : out_path}}}})},
              {"verdict", consistent ? verdict : "mixed"},
              {"consistent", consistent},
              {"points", points}};
  emit(out_path, doc.dump(2) + "\n");
  return 0;
}

struct GeodesicArgs {
  std::string point;
  std::string covector;
  double time = 1.0;
  int every = 1;
  bool unit = false;
  std::string out;
};

int cmd_geodesic(const Common& c, const GeodesicArgs& g) {
  const Model m = load_model(c);
  const Structure& s = m.structure;
  const int n = s.dim();
  const Vec q = g.point.empty() ? Vec(Vec::Zero(n)) : parse_vector(g.point, n, "--point");
  if (g.covector.empty()) throw Error(ErrorKind::Input, "--covector is required");
  Vec h = parse_vector(g.covector, n, "--covector");
  const CovectorCoords cov = g.unit ? CovectorCoords::unit_cylinder(h, s.rank()) : CovectorCoords{h};
  if (!(g.time >= 0.0)) throw Error(ErrorKind::Input, "--time must be non-negative");
  if (g.every < 1) throw Error(ErrorKind::Input, "--every must be positive");

  const json man = manifest("geodesic", m, c,
                            {{"point", to_json(q)}, {"covector", to_json(cov.h)}, {"time", g.time},
                             {"outputs", {{"trajectory", g.out.empty() ? "-" : g.out}}}});
  std::ostringstream csv;
  csv << "# manifest: " << man.dump() << "\n";
  csv << "t";
  const auto names = coordinate_names(n);
  for (const auto& name : names) csv << "," << name;
  for (int a = 0; a < n; ++a) csv << ",h" << (a + 1);
  csv << ",energy_drift\n";
  long index = 0;
  exp_map(q, cov, g.time, s, c.tol.ode_step, [&](const GeodesicState& st, double drift) {
    if (index++ % g.every != 0 && std::abs(st.t - g.time) > 1e-12) return;
    csv << fmt(st.t);
    for (int a = 0; a < n; ++a) csv << "," << fmt(st.q(a));
    for (int a = 0; a < n; ++a) csv << "," << fmt(st.h(a));
    csv << "," << fmt(drift) << "\n";
  });
  emit(g.out, csv.str());
  return 0;
}

struct WalkArgs {
  std::string point;
  double t_step = 0.01;
  int n_steps = 100;
  int n_paths = 1000;
  bool ode_step_given = false;
  std::string vertical = "dirac";
  std::vector<std::string> functions;
  std::string endpoints;
  std::string trajectories;
  std::string summary;
  bool diffusion = false;
  double dt = 1e-3;
};

json moments(const std::vector<Vec>& pts, const std::vector<std::string>& names, int n) {
  json out = json::array();
  for (const auto& name : names) {
    const Moment mo = endpoint_moment(pts, parse_function(name, n));
    out.push_back({{"function", name}, {"mean", mo.mean}, {"std_error", mo.std_error}});
  }
  return out;
}

int cmd_walk(Common c, const WalkArgs& w) {
  const Model m = load_model(c);
  const Structure& s = m.structure;
  const int n = s.dim();
  const Vec q = w.point.empty() ? Vec(Vec::Zero(n)) : parse_vector(w.point, n, "--point");
  std::vector<std::string> functions = w.functions;
  if (functions.empty()) {
    for (const auto& [name, phi] : test_battery(n)) functions.push_back(name);
  }
  for (const auto& f : functions) parse_function(f, n);

  WalkConfig cfg;
  cfg.t_step = w.t_step;
  cfg.n_steps = w.n_steps;
  cfg.n_paths = w.n_paths;
  cfg.ode_step = w.ode_step_given ? c.tol.ode_step : walk_ode_step(walk_spatial_scale(s.rank(), w.t_step));
  c.tol.ode_step = cfg.ode_step;
  cfg.keep_trajectories = !w.trajectories.empty();
  cfg.workers = c.workers;
  const MeasureSpec spec{VerticalLaw::parse(w.vertical), c.seed};

  json outputs = {{"summary", w.summary.empty() ? "-" : w.summary}};
  if (!w.endpoints.empty()) outputs["endpoints"] = w.endpoints;
  if (!w.trajectories.empty()) outputs["trajectories"] = w.trajectories;
  const json man = manifest(
      "walk", m, c,
      {{"point", to_json(q)},
       {"walk", {{"t_step", cfg.t_step}, {"n_steps", cfg.n_steps}, {"n_paths", cfg.n_paths},
                 {"spatial_scale", walk_spatial_scale(s.rank(), cfg.t_step)},
                 {"vertical", spec.vertical.describe()}}},
       {"diffusion", w.diffusion ? json{{"dt", w.dt}} : json(nullptr)},
       {"functions", functions},
       {"outputs", outputs}});

  const WalkResult r = simulate_walk(q, cfg, s, spec);
  json doc = {{"manifest", man},
              {"paths", r.endpoints.size()},
              {"discarded", r.discarded},
              {"regularity", {{"total_steps", r.total_steps},
                              {"irregular_steps", r.irregular_steps},
                              {"max_step_ratio", r.max_step_ratio},
                              {"max_energy_drift", r.max_energy_drift}}},
              {"walk", moments(r.endpoints, functions, n)}};
  if (w.diffusion) {
    DiffusionConfig dc;
    dc.horizon = cfg.t_step * cfg.n_steps;
    dc.n_paths = cfg.n_paths;
    dc.dt = w.dt;
    dc.seed = c.seed;
    dc.workers = c.workers;
    const auto d = reference_diffusion(q, dc, s);
    doc["diffusion"] = {{"paths", d.endpoints.size()}, {"discarded", d.discarded},
                        {"moments", moments(d.endpoints, functions, n)}};
  }

  const auto names = coordinate_names(n);
  std::string endpoints_csv, traj_csv;
  if (!w.endpoints.empty()) {
    std::ostringstream csv;
    csv << "# manifest: " << man.dump() << "\npath";
    for (const auto& name : names) csv << "," << name;
    csv << "\n";
    for (size_t i = 0; i < r.endpoints.size(); ++i) {
      csv << i;
      for (int a = 0; a < n; ++a) csv << "," << fmt(r.endpoints[i](a));
      csv << "\n";
    }
    endpoints_csv = csv.str();
  }
  if (!w.trajectories.empty()) {
    std::ostringstream csv;
    csv << "# manifest: " << man.dump() << "\npath,step";
    for (const auto& name : names) csv << "," << name;
    csv << "\n";
    for (size_t i = 0; i < r.trajectories.size(); ++i) {
      for (size_t k = 0; k < r.trajectories[i].size(); ++k) {
        csv << i << "," << k;
        for (int a = 0; a < n; ++a) csv << "," << fmt(r.trajectories[i][k](a));
        csv << "\n";
      }
    }
    traj_csv = csv.str();
  }
  if (!w.endpoints.empty()) emit(w.endpoints, endpoints_csv);
  if (!w.trajectories.empty()) emit(w.trajectories, traj_csv);
  emit(w.summary, doc.dump(2) + "\n");
  return 0;
}

int cmd_check(const Common& c, const std::vector<std::string>& suites, bool mutate,
              const std::string& out_path) {
  CheckOptions opt;
  opt.suites = suites;
  opt.seed = c.seed_option || std::getenv("SUBLAP_SEED") ? c.seed : opt.seed;
  opt.workers = c.workers;
  opt.mutate_chi_sign = mutate;
  const auto results = run_checks(opt);
  json list = json::array();
  int failed = 0;
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
    list.push_back({{"suite", r.suite},
                    {"name", r.name},
                    {"passed", r.passed},
                    {"measured", r.measured},
                    {"tolerance", r.tolerance},
                    {"detail", r.detail}});
  }
  json man = {{"command", "check"},
              {"suites", suites.empty() ? check_suites() : suites},
              {"seed", opt.seed},
              {"mutate_chi_sign", mutate},
              {"version", SUBLAP_VERSION}};
  json doc = {{"manifest", man},
              {"passed", failed == 0},
              {"failed", failed},
              {"total", results.size()},
              {"results", list}};
  emit(out_path, doc.dump(2) + "\n");
  return failed == 0 ? 0 : kExitSuiteFailure;
}

void add_run_options(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed_option, "Random seed (default: SUBLAP_SEED or 0)");
  app->add_option("--workers", c.workers, "Worker threads (default: SUBLAP_WORKERS or hardware)");
}

void add_common(CLI::App* app, Common& c, bool volume, bool points) {
  add_run_options(app, c);
  app->add_option("-m,--model", c.model, "Structure file or builtin id (heisenberg3, carnot-corank1, "
                                         "quasicontact-r4, contact3-perturbed)")
      ->capture_default_str();
  app->add_option("--params", c.params, "JSON parameters for a builtin id")->capture_default_str();
  if (volume) {
    app->add_option("--volume", c.volume,
                    "lebesgue | haar | popp | density:<polynomial> | {\"base\":..,\"scale\":..,\"exp\":..}; "
                    "default popp for corank 1, else lebesgue");
  }
  if (points) {
    app->add_option("--points", c.points, "origin | random:N[:radius] | x,y,z;x,y,z")->capture_default_str();
  }
  app->add_option("--tol-rank", c.tol.rank, "Singular values of J below this are zero")->capture_default_str();
  app->add_option("--tol-consistent", c.tol.consistent, "Residual accepted as a solution")->capture_default_str();
  app->add_option("--tol-infeasible", c.tol.infeasible, "Residual certifying no solution")->capture_default_str();
  app->add_option("--ode-step", c.tol.ode_step,
                  "Geodesic integration step (walk default: max(segment length / 100, 1e-4))")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Laplacians on frame-defined sub-Riemannian structures.\n"
               "Environment: SUBLAP_SEED (default seed), SUBLAP_WORKERS (default worker count)."};
  app.set_version_flag("--version", std::string(SUBLAP_VERSION));
  app.require_subcommand(1);

  Common c;

  std::string out;
  auto* report = app.add_subcommand("report", "Operators, chi and corank-1 data at sample points (JSON)");
  add_common(report, c, true, true);
  report->add_option("-o,--out", out, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Classify compatible complements for a volume (JSON)");
  add_common(solve, c, true, true);
  solve->add_option("-o,--out", out, "Output file (default stdout)");

  GeodesicArgs g;
  auto* geo = app.add_subcommand("geodesic", "Integrate a normal geodesic (CSV)");
  add_common(geo, c, false, false);
  geo->add_option("--point", g.point, "Start point, comma separated (default origin)");
  geo->add_option("--covector", g.covector, "Frame coordinates h_1..h_n, comma separated")->required();
  geo->add_option("--time", g.time, "Duration")->capture_default_str();
  geo->add_option("--every", g.every, "Emit every n-th step")->capture_default_str();
  geo->add_flag("--unit", g.unit, "Rescale the horizontal part to the unit cylinder");
  geo->add_option("-o,--out", g.out, "Output file (default stdout)");

  WalkArgs w;
  auto* walk = app.add_subcommand("walk", "Geodesic random walk endpoints and moments");
  add_common(walk, c, false, false);
  walk->add_option("--point", w.point, "Start point (default origin)");
  walk->add_option("--t-step", w.t_step, "Time per step")->capture_default_str();
  walk->add_option("--n-steps", w.n_steps, "Steps per path")->capture_default_str();
  walk->add_option("--n-paths", w.n_paths, "Number of paths")->capture_default_str();
  walk->add_option("--vertical", w.vertical, "dirac | gaussian:s | uniform:h")->capture_default_str();
  walk->add_option("--functions", w.functions, "Test polynomials, comma separated")->delimiter(',');
  walk->add_option("--endpoints", w.endpoints, "Endpoint CSV file");
  walk->add_option("--trajectories", w.trajectories, "Trajectory CSV file");
  walk->add_option("--summary", w.summary, "Summary JSON file (default stdout)");
  walk->add_flag("--diffusion", w.diffusion, "Also run the reference diffusion");
  walk->add_option("--dt", w.dt, "Diffusion time step")->capture_default_str();

  std::vector<std::string> suites;
  bool mutate = false;
  auto* check = app.add_subcommand("check", "Run the invariant suites (JSON); exit 1 on failure");
  check->add_option("--suite", suites, "Suite name, repeatable: core-geometry, geodesics, operators, "
                                       "volumes, compatibility, randomwalk");
  add_run_options(check, c);
  check->add_flag("--mutate-chi-sign", mutate, "Negative control: flip the sign of chi");
  check->add_option("-o,--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    c.seed = c.seed_option ? *c.seed_option : env_seed(0);
    if (*report) return cmd_report(c, out);
    if (*solve) return cmd_solve(c, out);
    if (*geo) return cmd_geodesic(c, g);
    if (*walk) {
      w.ode_step_given = walk->count("--ode-step") > 0;
      return cmd_walk(c, w);
    }
    if (*check) return cmd_check(c, suites, mutate, out);
  } catch (const Error& e) {
    std::cerr << "sublap: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "sublap: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
