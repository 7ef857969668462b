#include "sublap/models.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace sublap {

using nlohmann::json;

OneForm Model::annihilator() const {
  if (!corank1()) throw Error(ErrorKind::InvalidSpec, "model '" + id + "' is not corank 1");
  if (eta) return *eta;
  return reconstruct_annihilator(structure);
}

namespace {

VectorField constant_field(const Vec& v) {
  const int n = static_cast<int>(v.size());
  return {[v](const Vec&) { return v; }, [n](const Vec&) { return Mat(Mat::Zero(n, n)); }};
}

Vec unit(int n, int a) {
  Vec e = Vec::Zero(n);
  e(a) = 1.0;
  return e;
}

}  // namespace

Model heisenberg3(double skew) {
  std::vector<VectorField> f(3);
  f[0] = {[](const Vec& q) { return make_vec({1.0, 0.0, -0.5 * q(1)}); },
          [](const Vec&) {
            Mat j = Mat::Zero(3, 3);
            j(2, 1) = -0.5;
            return j;
          }};
  f[1] = {[](const Vec& q) { return make_vec({0.0, 1.0, 0.5 * q(0)}); },
          [](const Vec&) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = 0.5;
            return j;
          }};
  f[2] = {[skew](const Vec& q) { return make_vec({skew * q(0), 0.0, 1.0}); },
          [skew](const Vec&) {
            Mat j = Mat::Zero(3, 3);
            j(0, 0) = skew;
            return j;
          }};
  OneForm eta{[](const Vec& q) { return make_vec({0.5 * q(1), -0.5 * q(0), 1.0}); },
              [](const Vec&) {
                Mat d = Mat::Zero(3, 3);
                d(0, 1) = 0.5;
                d(1, 0) = -0.5;
                return d;
              }};
  json p = {{"skew", skew}};
  return {"heisenberg3", p.dump(), Structure("heisenberg3", 3, 2, std::move(f)), eta};
}

Model carnot_corank1(const Eigen::MatrixXd& a, const Eigen::VectorXd& ell) {
  const int k = static_cast<int>(a.rows());
  const int n = k + 1;
  if (a.cols() != k || k < 1 || n > kMaxDim) {
    throw Error(ErrorKind::InvalidSpec, "A must be square with at most " +
                                            std::to_string(kMaxDim - 1) + " rows");
  }
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::InvalidSpec, "A must be antisymmetric");
  }
  if (ell.size() != 0 && ell.size() != k) {
    throw Error(ErrorKind::InvalidSpec, "ell must have " + std::to_string(k) + " entries");
  }
  std::vector<VectorField> f;
  for (int i = 0; i < k; ++i) {
    f.push_back({[a, i, k, n](const Vec& q) {
                   Vec v = unit(n, i);
                   v(k) = -0.5 * a.row(i).dot(Eigen::VectorXd(q.head(k)));
                   return v;
                 },
                 [a, i, k, n](const Vec&) {
                   Mat j = Mat::Zero(n, n);
                   for (int b = 0; b < k; ++b) j(k, b) = -0.5 * a(i, b);
                   return j;
                 }});
  }
  Eigen::VectorXd l = ell.size() ? ell : Eigen::VectorXd::Zero(k);
  f.push_back({[a, l, k, n](const Vec& q) {
                 Vec v = unit(n, k);
                 const Eigen::VectorXd x = q.head(k);
                 for (int j = 0; j < k; ++j) {
                   v(j) += l(j);
                   v(k) -= 0.5 * l(j) * a.row(j).dot(x);
                 }
                 return v;
               },
               [a, l, k, n](const Vec&) {
                 Mat jac = Mat::Zero(n, n);
                 for (int j = 0; j < k; ++j) {
                   for (int b = 0; b < k; ++b) jac(k, b) -= 0.5 * l(j) * a(j, b);
                 }
                 return jac;
               }});
  OneForm eta{[a, k, n](const Vec& q) {
                Vec e = unit(n, k);
                e.head(k) = 0.5 * a * Eigen::VectorXd(q.head(k));
                return e;
              },
              [a, k, n](const Vec&) {
                Mat d = Mat::Zero(n, n);
                d.topLeftCorner(k, k) = 0.5 * a;
                return d;
              }};
  json p;
  p["A"] = json::array();
  for (int i = 0; i < k; ++i) {
    json row = json::array();
    for (int j = 0; j < k; ++j) row.push_back(a(i, j));
    p["A"].push_back(row);
  }
  if (ell.size()) p["ell"] = std::vector<double>(ell.data(), ell.data() + ell.size());
  return {"carnot-corank1", p.dump(), Structure("carnot-corank1", n, k, std::move(f)), eta};
}

Model quasicontact_r4(GrowthChoice choice, const Vec& complement) {
  const bool exp_g = choice == GrowthChoice::Exp;
  // g and its z-derivative
  auto g = [exp_g](double z) { return exp_g ? std::exp(z) : 2.0 + z; };
  auto dg = [exp_g](double z) { return exp_g ? std::exp(z) : 1.0; };
  auto domain = [exp_g, g](const Vec& q) {
    if (!exp_g && !(g(q(2)) > 0.0)) {
      throw Error(ErrorKind::Evaluation, "g = 2 + z is not positive at " + format_point(q));
    }
  };
  const Vec base_h[3] = {make_vec({1, 0, 0, 0}), make_vec({0, 1, 0, 0}), make_vec({0, 0, 1, 0})};
  std::vector<VectorField> f;
  for (int i = 0; i < 3; ++i) {
    f.push_back({[=](const Vec& q) {
                   domain(q);
                   Vec v = base_h[i];
                   if (i == 0) v(3) = 0.5 * q(1);
                   if (i == 1) v(3) = -0.5 * q(0);
                   return Vec(v / std::sqrt(g(q(2))));
                 },
                 [=](const Vec& q) {
                   domain(q);
                   const double s = 1.0 / std::sqrt(g(q(2)));
                   // d/dz g^{-1/2} = -g'/(2 g^{3/2})
                   const double ds = -0.5 * dg(q(2)) * s / g(q(2));
                   Vec v = base_h[i];
                   if (i == 0) v(3) = 0.5 * q(1);
                   if (i == 1) v(3) = -0.5 * q(0);
                   Mat j = Mat::Zero(4, 4);
                   j.col(2) = ds * v;
                   if (i == 0) j(3, 1) += 0.5 * s;
                   if (i == 1) j(3, 0) -= 0.5 * s;
                   return j;
                 }});
  }
  const Vec c = complement.size() ? complement : unit(4, 3);
  if (c.size() != 4) throw Error(ErrorKind::InvalidSpec, "complement must have 4 entries");
  f.push_back(constant_field(c));
  OneForm eta{[=](const Vec& q) {
                domain(q);
                return Vec(g(q(2)) / std::sqrt(2.0) * make_vec({-0.5 * q(1), 0.5 * q(0), 0.0, 1.0}));
              },
              [=](const Vec& q) {
                domain(q);
                const double r = 1.0 / std::sqrt(2.0);
                const Vec e = make_vec({-0.5 * q(1), 0.5 * q(0), 0.0, 1.0});
                Mat d = Mat::Zero(4, 4);
                d.col(2) = r * dg(q(2)) * e;
                d(0, 1) += -0.5 * r * g(q(2));
                d(1, 0) += 0.5 * r * g(q(2));
                return d;
              }};
  json p = {{"g", exp_g ? "exp" : "linear-positive"},
            {"complement", std::vector<double>(c.data(), c.data() + c.size())}};
  return {"quasicontact-r4", p.dump(), Structure("quasicontact-r4", 4, 3, std::move(f)), eta};
}

Model contact3_perturbed(double a, double b) {
  std::vector<VectorField> f(3);
  f[0] = {[a](const Vec& q) { return make_vec({1.0, 0.0, -0.5 * q(1) + a * q(0) * q(0)}); },
          [a](const Vec& q) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = 2.0 * a * q(0);
            j(2, 1) = -0.5;
            return j;
          }};
  f[1] = {[b](const Vec& q) { return make_vec({0.0, 1.0, 0.5 * q(0) + b * q(1) * q(2)}); },
          [b](const Vec& q) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = 0.5;
            j(2, 1) = b * q(2);
            j(2, 2) = b * q(1);
            return j;
          }};
  f[2] = constant_field(make_vec({0.0, 0.0, 1.0}));
  OneForm eta{[a, b](const Vec& q) {
                return make_vec({0.5 * q(1) - a * q(0) * q(0), -0.5 * q(0) - b * q(1) * q(2), 1.0});
              },
              [a, b](const Vec& q) {
                Mat d = Mat::Zero(3, 3);
                d(0, 0) = -2.0 * a * q(0);
                d(0, 1) = 0.5;
                d(1, 0) = -0.5;
                d(1, 1) = -b * q(2);
                d(1, 2) = -b * q(1);
                return d;
              }};
  json p = {{"a", a}, {"b", b}};
  return {"contact3-perturbed", p.dump(), Structure("contact3-perturbed", 3, 2, std::move(f)), eta};
}

Model polynomial_model(const std::string& name, int n, int k,
                       const std::vector<std::vector<Polynomial>>& fields,
                       const std::optional<std::vector<Polynomial>>& eta) {
  if (static_cast<int>(fields.size()) != n) {
    throw Error(ErrorKind::Input, "model: expected " + std::to_string(n) + " fields, got " +
                                      std::to_string(fields.size()));
  }
  std::vector<VectorField> f;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (static_cast<int>(fields[i].size()) != n) {
      throw Error(ErrorKind::Input, "model: field " + std::to_string(i + 1) + " has " +
                                        std::to_string(fields[i].size()) + " components");
    }
    const auto comps = fields[i];
    f.push_back({[comps, n](const Vec& q) {
                   Vec v(n);
                   for (int a = 0; a < n; ++a) v(a) = comps[static_cast<size_t>(a)](q);
                   return v;
                 },
                 [comps, n](const Vec& q) {
                   Mat j(n, n);
                   for (int a = 0; a < n; ++a) j.row(a) = comps[static_cast<size_t>(a)].gradient(q).transpose();
                   return j;
                 }});
  }
  std::optional<OneForm> form;
  if (eta) {
    if (static_cast<int>(eta->size()) != n) {
      throw Error(ErrorKind::Input, "eta: expected " + std::to_string(n) + " components");
    }
    const auto comps = *eta;
    form = OneForm{[comps, n](const Vec& q) {
                     Vec v(n);
                     for (int a = 0; a < n; ++a) v(a) = comps[static_cast<size_t>(a)](q);
                     return v;
                   },
                   [comps, n](const Vec& q) {
                     Mat d(n, n);
                     for (int a = 0; a < n; ++a) d.row(a) = comps[static_cast<size_t>(a)].gradient(q).transpose();
                     return d;
                   }};
  }
  return {"polynomial", "{}", Structure(name, n, k, std::move(f)), form};
}

namespace {

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorKind::Input, where + ": expected a number");
  return j.get<double>();
}

Eigen::MatrixXd matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Input, where + ": expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw Error(ErrorKind::Input, where + ": row " + std::to_string(i + 1) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      m(i, c) = number(row[static_cast<size_t>(c)], where);
    }
  }
  return m;
}

Eigen::VectorXd vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::Input, where + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw Error(ErrorKind::Input, where + ": unknown key '" + it.key() + "'");
  }
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Input, what + ": " + e.what());
  }
}

Model builtin_from_json(const std::string& id, const json& p) {
  if (!p.is_object()) throw Error(ErrorKind::Input, "params: expected an object");
  if (id == "heisenberg3") {
    reject_unknown(p, {"skew"}, "params");
    return heisenberg3(p.contains("skew") ? number(p["skew"], "params.skew") : 0.0);
  }
  if (id == "carnot-corank1") {
    reject_unknown(p, {"A", "ell"}, "params");
    Eigen::MatrixXd a(3, 3);
    a << 0, 1, 0, -1, 0, 0, 0, 0, 0;
    if (p.contains("A")) a = matrix(p["A"], "params.A");
    Eigen::VectorXd ell;
    if (p.contains("ell")) ell = vector(p["ell"], "params.ell");
    return carnot_corank1(a, ell);
  }
  if (id == "quasicontact-r4") {
    reject_unknown(p, {"g", "complement"}, "params");
    GrowthChoice g = GrowthChoice::Exp;
    if (p.contains("g")) {
      const std::string name = p["g"].is_string() ? p["g"].get<std::string>() : "";
      if (name == "exp") {
        g = GrowthChoice::Exp;
      } else if (name == "linear-positive") {
        g = GrowthChoice::LinearPositive;
      } else {
        throw Error(ErrorKind::Input, "params.g: expected \"exp\" or \"linear-positive\"");
      }
    }
    Vec c;
    if (p.contains("complement")) {
      Eigen::VectorXd v = vector(p["complement"], "params.complement");
      if (v.size() != 4) throw Error(ErrorKind::Input, "params.complement: expected 4 entries");
      c = v;
    }
    return quasicontact_r4(g, c);
  }
  if (id == "contact3-perturbed") {
    reject_unknown(p, {"a", "b"}, "params");
    return contact3_perturbed(p.contains("a") ? number(p["a"], "params.a") : 0.3,
                              p.contains("b") ? number(p["b"], "params.b") : 0.2);
  }
  throw Error(ErrorKind::Input, "unknown builtin model '" + id + "'");
}

std::vector<Polynomial> polynomials(const json& j, int n, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::Input, where + ": expected an array of expressions");
  std::vector<Polynomial> out;
  for (size_t a = 0; a < j.size(); ++a) {
    const std::string at = where + "[" + std::to_string(a) + "]";
    if (j[a].is_number()) {
      out.push_back(Polynomial(n, {{j[a].get<double>(), std::vector<int>(static_cast<size_t>(n), 0)}}));
      continue;
    }
    if (!j[a].is_string()) throw Error(ErrorKind::Input, at + ": expected a string");
    try {
      out.push_back(Polynomial::parse(j[a].get<std::string>(), n));
    } catch (const Error& e) {
      throw Error(ErrorKind::Input, at + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

Model builtin_model(const std::string& id, const std::string& params_json) {
  return builtin_from_json(id, parse_json(params_json.empty() ? "{}" : params_json, "params"));
}

std::vector<Model> builtin_models() {
  Eigen::MatrixXd a(3, 3);
  a << 0, 1, 0, -1, 0, 0, 0, 0, 0;
  return {heisenberg3(),
          heisenberg3(1.0),
          carnot_corank1(a),
          quasicontact_r4(GrowthChoice::Exp),
          quasicontact_r4(GrowthChoice::LinearPositive),
          contact3_perturbed()};
}

Model parse_model(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] != '{') {
    const auto last = text.find_last_not_of(" \t\r\n");
    return builtin_model(text.substr(first, last - first + 1));
  }
  const json j = parse_json(text, "structure file");
  if (!j.is_object()) throw Error(ErrorKind::Input, "structure file: expected an object");
  reject_unknown(j, {"name", "n", "k", "model", "eta"}, "structure file");
  if (!j.contains("model") || !j["model"].is_object()) {
    throw Error(ErrorKind::Input, "structure file: missing object 'model'");
  }
  const json& m = j["model"];
  if (m.contains("builtin")) {
    reject_unknown(m, {"builtin", "params"}, "model");
    if (!m["builtin"].is_string()) throw Error(ErrorKind::Input, "model.builtin: expected a string");
    Model model = builtin_from_json(m["builtin"].get<std::string>(),
                                    m.contains("params") ? m["params"] : json::object());
    auto check_dim = [&](const char* key, int value) {
      if (j.contains(key) && (!j[key].is_number_integer() || j[key].get<int>() != value)) {
        throw Error(ErrorKind::Input, std::string(key) + ": builtin '" + model.id + "' has " + key +
                                          " = " + std::to_string(value));
      }
    };
    check_dim("n", model.structure.dim());
    check_dim("k", model.structure.rank());
    if (j.contains("eta")) throw Error(ErrorKind::Input, "eta: builtin models ship their own");
    return model;
  }
  if (!m.contains("polynomial")) throw Error(ErrorKind::Input, "model: need 'builtin' or 'polynomial'");
  reject_unknown(m, {"polynomial"}, "model");
  for (const char* key : {"n", "k"}) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw Error(ErrorKind::Input, std::string(key) + ": expected an integer");
    }
  }
  const int n = j["n"].get<int>();
  const int k = j["k"].get<int>();
  if (n < 2 || n > kMaxDim) throw Error(ErrorKind::Input, "n: must be between 2 and " + std::to_string(kMaxDim));
  if (k < 1 || k > n) throw Error(ErrorKind::Input, "k: must be between 1 and n");
  const json& fields = m["polynomial"];
  if (!fields.is_array()) throw Error(ErrorKind::Input, "model.polynomial: expected an array of fields");
  std::vector<std::vector<Polynomial>> comps;
  for (size_t i = 0; i < fields.size(); ++i) {
    comps.push_back(polynomials(fields[i], n, "model.polynomial[" + std::to_string(i) + "]"));
  }
  std::optional<std::vector<Polynomial>> eta;
  if (j.contains("eta")) eta = polynomials(j["eta"], n, "eta");
  std::string name = "polynomial";
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw Error(ErrorKind::Input, "name: expected a string");
    name = j["name"].get<std::string>();
  }
  Model model = polynomial_model(name, n, k, comps, eta);
  model.params = m.dump();
  return model;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open structure file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

VolumeForm parse_volume(const std::string& spec, const Model& model) {
  auto base = [&](const std::string& name) -> VolumeForm {
    if (name == "lebesgue" || name == "haar") return VolumeForm::lebesgue();
    if (name == "popp") return popp_volume(model.structure, model.annihilator());
    throw Error(ErrorKind::Input, "volume: unknown base '" + name + "'");
  };
  const int n = model.structure.dim();
  if (spec.rfind("density:", 0) == 0) {
    const Polynomial rho = Polynomial::parse(spec.substr(8), n);
    return {[rho](const Vec& q) { return rho(q); }};
  }
  if (!spec.empty() && spec.front() == '{') {
    const json j = parse_json(spec, "volume");
    if (!j.is_object()) throw Error(ErrorKind::Input, "volume: expected an object");
    reject_unknown(j, {"base", "scale", "exp"}, "volume");
    VolumeForm v = base(j.contains("base") && j["base"].is_string() ? j["base"].get<std::string>()
                                                                     : "lebesgue");
    if (j.contains("exp")) {
      if (!j["exp"].is_string()) throw Error(ErrorKind::Input, "volume.exp: expected a string");
      const Polynomial g = Polynomial::parse(j["exp"].get<std::string>(), n);
      v = VolumeForm::exp_times([g](const Vec& q) { return g(q); }, v);
    }
    if (j.contains("scale")) {
      const double c = number(j["scale"], "volume.scale");
      if (!(c > 0.0)) throw Error(ErrorKind::Input, "volume.scale: must be positive");
      v = v.scaled(c);
    }
    return v;
  }
  return base(spec);
}

ScalarFunction parse_function(const std::string& text, int n) {
  return Polynomial::parse(text, n).as_function();
}

std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> names;
  for (int a = 0; a < n; ++a) {
    names.push_back(n <= 4 ? std::string(1, "xyzw"[a]) : "q" + std::to_string(a + 1));
  }
  return names;
}

std::vector<std::pair<std::string, ScalarFunction>> test_battery(int n) {
  const auto names = coordinate_names(n);
  std::vector<std::string> exprs;
  for (const auto& a : names) exprs.push_back(a);
  for (const auto& a : names) exprs.push_back(a + "^2");
  for (int a = 1; a < n; ++a) exprs.push_back(names[0] + "*" + names[static_cast<size_t>(a)]);
  std::vector<std::pair<std::string, ScalarFunction>> out;
  for (const auto& e : exprs) out.emplace_back(e, parse_function(e, n));
  return out;
}

Polynomial random_polynomial(int n, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<Monomial> terms;
  std::vector<int> powers(static_cast<size_t>(n), 0);
  // all exponent vectors with total degree <= degree
  std::function<void(int, int)> fill = [&](int a, int left) {
    if (a == n) {
      terms.push_back({coef(rng), powers});
      return;
    }
    for (int p = 0; p <= left; ++p) {
      powers[static_cast<size_t>(a)] = p;
      fill(a + 1, left - p);
    }
    powers[static_cast<size_t>(a)] = 0;
  };
  fill(0, degree);
  return Polynomial(n, std::move(terms));
}

Vec random_point(int n, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-r, r);
  Vec q(n);
  for (int a = 0; a < n; ++a) q(a) = u(rng);
  return q;
}

}  // namespace sublap
