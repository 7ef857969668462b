#pragma once

#include "sublap/polynomial.hpp"
#include "sublap/structure.hpp"
#include "sublap/volumes.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sublap {

/// A structure together with what the zoo knows about it.
struct Model {
  std::string id;
  /// Parameters as compact JSON text, for manifests.
  std::string params;
  Structure structure;
  /// Annihilator of the distribution (not normalized), corank 1 only.
  std::optional<OneForm> eta;

  bool corank1() const { return structure.dim() == structure.rank() + 1; }
  /// eta or a reconstructed annihilator. Throws InvalidSpec if not corank 1.
  OneForm annihilator() const;
};

/// X_1 = d_x - (y/2) d_z, X_2 = d_y + (x/2) d_z, X_3 = d_z + skew * x * d_x.
Model heisenberg3(double skew = 0.0);

/// X_i = d_i - (1/2) sum_j A_ij x_j d_z and X_n = d_z + sum_j ell_j X_j.
Model carnot_corank1(const Eigen::MatrixXd& a, const Eigen::VectorXd& ell = {});

enum class GrowthChoice { Exp, LinearPositive };

/// Quasi-contact structure on R^4, (x, y, z, w), with eta = (g / sqrt 2)(dw - (y/2) dx + (x/2) dy)
/// and frame g^{-1/2}(d_x + (y/2) d_w), g^{-1/2}(d_y - (x/2) d_w), g^{-1/2} d_z.
/// g = e^z or g = 2 + z; the complement is the constant vector `complement`.
Model quasicontact_r4(GrowthChoice g = GrowthChoice::Exp, const Vec& complement = {});

/// X_1 = d_x + (-y/2 + a x^2) d_z, X_2 = d_y + (x/2 + b y z) d_z, X_3 = d_z.
Model contact3_perturbed(double a = 0.3, double b = 0.2);

/// Fields given by polynomial components; Jacobians are analytic.
Model polynomial_model(const std::string& name, int n, int k,
                       const std::vector<std::vector<Polynomial>>& fields,
                       const std::optional<std::vector<Polynomial>>& eta = {});

/// Builtin ids: heisenberg3, carnot-corank1, quasicontact-r4, contact3-perturbed.
/// `params_json` is a JSON object (may be empty or "{}").
Model builtin_model(const std::string& id, const std::string& params_json = "{}");

/// Every builtin with its default parameters.
std::vector<Model> builtin_models();

/// Structure file contents:
///   {"name": ..., "n": ..., "k": ..., "model": {"builtin": id, "params": {...}}}
/// or {"model": {"polynomial": [[component expressions] per field]}, "eta": [...]}.
/// A bare builtin id is accepted too. Throws Input with the offending field.
Model parse_model(const std::string& text);
Model load_model_file(const std::string& path);

/// Volume spec: "lebesgue" | "haar" | "popp" | "density:<polynomial>" or a JSON
/// object {"base": "popp"|"lebesgue", "scale": c, "exp": "<polynomial>"}
/// meaning scale * e^{exp} * base.
VolumeForm parse_volume(const std::string& spec, const Model& model);

ScalarFunction parse_function(const std::string& text, int n);

/// Coordinate names used in parsing and output (x, y, z, w or q1..qn).
std::vector<std::string> coordinate_names(int n);

/// Canonical test functions: every coordinate, every square, and the
/// products of the first coordinate with the others.
std::vector<std::pair<std::string, ScalarFunction>> test_battery(int n);

/// Polynomial with random coefficients in [-1, 1] and total degree <= degree.
Polynomial random_polynomial(int n, int degree, std::mt19937_64& rng);

/// Uniform point in [-r, r]^n.
Vec random_point(int n, double r, std::mt19937_64& rng);

}  // namespace sublap
