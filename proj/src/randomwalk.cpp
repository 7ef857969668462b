#include "sublap/randomwalk.hpp"

#include "sublap/operators.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

namespace sublap {

VerticalLaw VerticalLaw::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  VerticalLaw law;
  if (kind == "dirac") {
    law.kind = Kind::Dirac;
  } else if (kind == "gaussian") {
    law.kind = Kind::Gaussian;
  } else if (kind == "uniform") {
    law.kind = Kind::Uniform;
  } else {
    throw Error(ErrorKind::Input, "unknown vertical law '" + text + "'");
  }
  if (law.kind != Kind::Dirac) {
    if (colon == std::string::npos) throw Error(ErrorKind::Input, "vertical law '" + text + "' needs a parameter");
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      char* end = nullptr;
      double v = std::strtod(item.c_str(), &end);
      if (end == item.c_str() || !(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::Input, "bad vertical law parameter '" + item + "'");
      }
      law.params.push_back(v);
    }
    if (law.params.empty()) throw Error(ErrorKind::Input, "vertical law '" + text + "' needs a parameter");
  }
  return law;
}

std::string VerticalLaw::describe() const {
  std::ostringstream out;
  out << (kind == Kind::Dirac ? "dirac" : kind == Kind::Gaussian ? "gaussian" : "uniform");
  for (size_t i = 0; i < params.size(); ++i) out << (i ? "," : ":") << params[i];
  return out.str();
}

double VerticalLaw::param(int vertical_index) const {
  if (params.empty()) return 0.0;
  if (params.size() == 1) return params[0];
  return params.at(static_cast<size_t>(vertical_index));
}

Rng derived_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

CovectorCoords sample_cylinder(const Structure& s, const VerticalLaw& law, Rng& rng) {
  const int n = s.dim();
  const int k = s.rank();
  std::normal_distribution<double> normal(0.0, 1.0);
  CovectorCoords c{Vec::Zero(n)};
  double norm = 0.0;
  while (!(norm > 1e-300)) {
    for (int i = 0; i < k; ++i) c.h(i) = normal(rng);
    norm = c.h.head(k).norm();
  }
  c.h.head(k) /= norm;
  for (int a = k; a < n; ++a) {
    const double p = law.param(a - k);
    switch (law.kind) {
      case VerticalLaw::Kind::Dirac: break;
      case VerticalLaw::Kind::Gaussian: c.h(a) = p * normal(rng); break;
      case VerticalLaw::Kind::Uniform:
        c.h(a) = std::uniform_real_distribution<double>(-p, p)(rng);
        break;
    }
  }
  return c;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUBLAP_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

// Runs body(block) for every block index on a pool of workers.
template <typename Body>
void parallel_blocks(long blocks, int workers, Body&& body) {
  workers = static_cast<int>(std::min<long>(resolve_workers(workers), std::max(1L, blocks)));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto run = [&] {
    try {
      for (long b = next++; b < blocks && !failed; b = next++) body(b);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

bool is_discardable(const Error& e) {
  return e.kind() == ErrorKind::Integration || e.kind() == ErrorKind::Evaluation;
}

void check_discards(long discarded, long total, const char* what) {
  if (discarded * 100 > total) {
    throw Error(ErrorKind::Integration, std::string(what) + ": " + std::to_string(discarded) +
                                            " of " + std::to_string(total) +
                                            " samples failed (more than 1%)");
  }
}

}  // namespace

std::vector<Estimate> single_step_estimate(std::span<const ScalarFunction> phis, const Vec& q,
                                           double t, long draws, const Structure& s,
                                           const MeasureSpec& m, int workers) {
  if (!(t > 0.0)) throw Error(ErrorKind::Input, "step duration must be positive");
  if (draws < 1) throw Error(ErrorKind::Input, "need at least one draw");
  const size_t nf = phis.size();
  const double norm = 2.0 * s.rank() / (t * t);
  const double step = std::min(kDefaultOdeStep, t / 10.0);

  std::vector<double> base(nf);
  for (size_t f = 0; f < nf; ++f) base[f] = phis[f](q);

  struct Block {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    long used = 0;
    long discarded = 0;
  };
  const long blocks = (draws + kDrawsPerStream - 1) / kDrawsPerStream;
  std::vector<Block> results(static_cast<size_t>(blocks));

  parallel_blocks(blocks, workers, [&](long b) {
    Block& out = results[static_cast<size_t>(b)];
    out.sum.assign(nf, 0.0);
    out.sum_sq.assign(nf, 0.0);
    Rng rng = derived_stream(m.seed, static_cast<std::uint64_t>(b));
    const long count = std::min(kDrawsPerStream, draws - b * kDrawsPerStream);
    for (long i = 0; i < count; ++i) {
      const CovectorCoords c = sample_cylinder(s, m.vertical, rng);
      Vec end;
      try {
        end = exp_map(q, c, t, s, step).q;
      } catch (const Error& e) {
        if (!is_discardable(e)) throw;
        ++out.discarded;
        continue;
      }
      for (size_t f = 0; f < nf; ++f) {
        const double y = norm * (phis[f](end) - base[f]);
        out.sum[f] += y;
        out.sum_sq[f] += y * y;
      }
      ++out.used;
    }
  });

  std::vector<Estimate> est(nf);
  std::vector<double> sum(nf, 0.0), sum_sq(nf, 0.0);
  long used = 0, discarded = 0;
  for (const auto& blk : results) {
    for (size_t f = 0; f < nf; ++f) {
      sum[f] += blk.sum[f];
      sum_sq[f] += blk.sum_sq[f];
    }
    used += blk.used;
    discarded += blk.discarded;
  }
  check_discards(discarded, draws, "single-step estimate");
  for (size_t f = 0; f < nf; ++f) {
    const double mean = sum[f] / static_cast<double>(used);
    const double var = used > 1 ? std::max(0.0, (sum_sq[f] - used * mean * mean) / (used - 1)) : 0.0;
    est[f] = {mean, std::sqrt(var / static_cast<double>(used)), used, discarded};
  }
  return est;
}

Estimate single_step_estimate(const ScalarFunction& phi, const Vec& q, double t, long draws,
                              const Structure& s, const MeasureSpec& m, int workers) {
  return single_step_estimate(std::span<const ScalarFunction>(&phi, 1), q, t, draws, s, m,
                              workers)[0];
}

double walk_spatial_scale(int k, double t_step) { return std::sqrt(2.0 * k * t_step); }

WalkResult simulate_walk(const Vec& q0, const WalkConfig& cfg, const Structure& s,
                         const MeasureSpec& m) {
  if (!(cfg.t_step > 0.0)) throw Error(ErrorKind::Input, "t_step must be positive");
  if (cfg.n_steps < 0 || cfg.n_paths < 1) throw Error(ErrorKind::Input, "bad walk size");
  const double scale = walk_spatial_scale(s.rank(), cfg.t_step);
  const double step = cfg.ode_step > 0.0 ? cfg.ode_step : walk_ode_step(scale);

  struct Path {
    std::optional<Vec> end;
    std::vector<Vec> trajectory;
    long irregular = 0;
    double max_ratio = 0.0;
    double max_drift = 0.0;
  };
  std::vector<Path> paths(static_cast<size_t>(cfg.n_paths));

  parallel_blocks(cfg.n_paths, cfg.workers, [&](long p) {
    Path& out = paths[static_cast<size_t>(p)];
    Rng rng = derived_stream(m.seed, static_cast<std::uint64_t>(p));
    Vec q = q0;
    if (cfg.keep_trajectories) out.trajectory.push_back(q);
    try {
      for (int i = 0; i < cfg.n_steps; ++i) {
        const CovectorCoords c = sample_cylinder(s, m.vertical, rng);
        const ExpMapResult r = exp_map(q, c, scale, s, step);
        const double ratio = r.arc_length / scale;
        out.max_ratio = std::max(out.max_ratio, ratio);
        out.max_drift = std::max(out.max_drift, r.energy_drift);
        if (ratio > 1.0 + 1e-6) ++out.irregular;
        q = r.q;
        if (cfg.keep_trajectories) out.trajectory.push_back(q);
      }
      out.end = q;
    } catch (const Error& e) {
      if (!is_discardable(e)) throw;
      out.trajectory.clear();
    }
  });

  WalkResult result;
  for (auto& p : paths) {
    if (!p.end) {
      ++result.discarded;
      continue;
    }
    result.endpoints.push_back(*p.end);
    if (cfg.keep_trajectories) result.trajectories.push_back(std::move(p.trajectory));
    result.irregular_steps += p.irregular;
    result.total_steps += cfg.n_steps;
    result.max_step_ratio = std::max(result.max_step_ratio, p.max_ratio);
    result.max_energy_drift = std::max(result.max_energy_drift, p.max_drift);
  }
  check_discards(result.discarded, cfg.n_paths, "random walk");
  return result;
}

DiffusionResult reference_diffusion(const Vec& q0, const DiffusionConfig& cfg, const Structure& s) {
  if (!(cfg.horizon >= 0.0) || !(cfg.dt > 0.0) || cfg.n_paths < 1) {
    throw Error(ErrorKind::Input, "bad diffusion configuration");
  }
  const int n = s.dim();
  const int k = s.rank();
  const long steps = cfg.horizon == 0.0
                         ? 0
                         : std::max(1L, static_cast<long>(std::ceil(cfg.horizon / cfg.dt - 1e-9)));
  const double dt = steps ? cfg.horizon / static_cast<double>(steps) : 0.0;
  const double sqrt_dt = std::sqrt(dt);
  const double noise = std::sqrt(2.0);
  // Brownian streams live in a separate index range from the walk streams.
  constexpr std::uint64_t kDiffusionStreams = 1ULL << 62;

  std::vector<std::optional<Vec>> ends(static_cast<size_t>(cfg.n_paths));
  parallel_blocks(cfg.n_paths, cfg.workers, [&](long p) {
    Rng rng = derived_stream(cfg.seed, kDiffusionStreams + static_cast<std::uint64_t>(p));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec x = q0;
    Vec dw(k);
    try {
      for (long i = 0; i < steps; ++i) {
        for (int a = 0; a < k; ++a) dw(a) = sqrt_dt * normal(rng);
        Vec diff0 = Vec::Zero(n);
        for (int a = 0; a < k; ++a) diff0 += dw(a) * s.field_value(a, x);
        const Vec drift0 = microscopic_drift(x, s);
        const Vec pred = x + drift0 * dt + noise * diff0;
        Vec diff1 = Vec::Zero(n);
        for (int a = 0; a < k; ++a) diff1 += dw(a) * s.field_value(a, pred);
        const Vec drift1 = microscopic_drift(pred, s);
        x += 0.5 * (drift0 + drift1) * dt + 0.5 * noise * (diff0 + diff1);
        if (!x.allFinite()) throw Error(ErrorKind::Integration, "diffusion path became non-finite");
      }
      ends[static_cast<size_t>(p)] = x;
    } catch (const Error& e) {
      if (!is_discardable(e) && e.kind() != ErrorKind::DegenerateFrame) throw;
    }
  });

  DiffusionResult result;
  for (auto& e : ends) {
    if (e) {
      result.endpoints.push_back(*e);
    } else {
      ++result.discarded;
    }
  }
  return result;
}

Moment endpoint_moment(const std::vector<Vec>& endpoints, const ScalarFunction& phi) {
  if (endpoints.empty()) throw Error(ErrorKind::Input, "no endpoints");
  double sum = 0.0, sum_sq = 0.0;
  for (const Vec& q : endpoints) {
    const double v = phi(q);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(endpoints.size());
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace sublap
