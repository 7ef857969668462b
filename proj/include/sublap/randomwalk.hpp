#pragma once

#include "sublap/geodesics.hpp"
#include "sublap/structure.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sublap {

/// Law of the vertical coordinates h_{k+1..n} of an adapted measure.
struct VerticalLaw {
  enum class Kind { Dirac, Gaussian, Uniform };
  Kind kind = Kind::Dirac;
  /// sigma (gaussian) or half-width (uniform) per vertical coordinate; a
  /// single entry applies to all of them.
  std::vector<double> params;

  static VerticalLaw dirac() { return {Kind::Dirac, {}}; }
  static VerticalLaw gaussian(double sigma) { return {Kind::Gaussian, {sigma}}; }
  static VerticalLaw uniform(double half_width) { return {Kind::Uniform, {half_width}}; }
  /// "dirac", "gaussian:1", "uniform:0.5", "gaussian:1,2".
  static VerticalLaw parse(const std::string& text);
  std::string describe() const;

  double param(int vertical_index) const;
};

struct MeasureSpec {
  VerticalLaw vertical = VerticalLaw::dirac();
  std::uint64_t seed = 0;
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream); streams never depend on worker count.
Rng derived_stream(std::uint64_t seed, std::uint64_t stream);

/// Draw from the unit cylinder: uniform on the horizontal sphere S^{k-1},
/// vertical part from `law`.
CovectorCoords sample_cylinder(const Structure& s, const VerticalLaw& law, Rng& rng);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long used = 0;
  long discarded = 0;
};

inline constexpr long kDrawsPerStream = 4096;

/// (2k / t^2) * (mean of phi(exp_q(t, lambda)) - phi(q)) over `draws` cylinder
/// samples. All functions share the same draws; geodesics are integrated
/// with step min(1e-3, t / 10).
std::vector<Estimate> single_step_estimate(std::span<const ScalarFunction> phis, const Vec& q,
                                           double t, long draws, const Structure& s,
                                           const MeasureSpec& m, int workers = 0);

Estimate single_step_estimate(const ScalarFunction& phi, const Vec& q, double t, long draws,
                              const Structure& s, const MeasureSpec& m, int workers = 0);

struct WalkConfig {
  double t_step = 0.01;   ///< time per walk step
  int n_steps = 100;
  int n_paths = 1000;
  double ode_step = 0.0;  ///< 0 selects walk_ode_step(geodesic duration)
  bool keep_trajectories = false;
  int workers = 0;
};

/// Duration of each unit-speed geodesic segment: sqrt(2k * t_step).
double walk_spatial_scale(int k, double t_step);

struct WalkResult {
  std::vector<Vec> endpoints;
  std::vector<std::vector<Vec>> trajectories;
  long discarded = 0;
  long total_steps = 0;
  long irregular_steps = 0;       ///< steps longer than the spatial scale (1 + 1e-6)
  double max_step_ratio = 0.0;    ///< max arc length / spatial scale
  double max_energy_drift = 0.0;
};

WalkResult simulate_walk(const Vec& q0, const WalkConfig& cfg, const Structure& s,
                         const MeasureSpec& m);

struct DiffusionConfig {
  double horizon = 1.0;
  int n_paths = 1000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct DiffusionResult {
  std::vector<Vec> endpoints;
  long discarded = 0;
};

/// Stratonovich-Heun paths of dX = sqrt(2) sum_i X_i(X) o dW^i + b(X) dt with
/// b = sum_{i,j <= k} c_{ji}^j X_i, whose generator is L^V.
DiffusionResult reference_diffusion(const Vec& q0, const DiffusionConfig& cfg, const Structure& s);

struct Moment {
  double mean = 0.0;
  double std_error = 0.0;
};

Moment endpoint_moment(const std::vector<Vec>& endpoints, const ScalarFunction& phi);

/// Worker count: explicit value, else SUBLAP_WORKERS, else hardware concurrency.
int resolve_workers(int requested);

}  // namespace sublap
