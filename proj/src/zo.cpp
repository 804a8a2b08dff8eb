#include "zoht/zo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zoht {

void ZoEstimatorConfig::validate() const {
  if (q < 1) throw DomainError("zo: q must be at least 1");
  if (s2 < 1 || s2 > d) {
    throw DomainError("zo: s2=" + std::to_string(s2) + " must lie in [1, d=" + std::to_string(d) + "]");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("zo: mu must be a positive finite number");
}

DenseVector sample_direction(std::size_t d, std::size_t s2, RngStream& rng) {
  if (s2 < 1 || s2 > d) {
    throw DomainError("sample_direction: s2=" + std::to_string(s2) + " must lie in [1, d=" + std::to_string(d) + "]");
  }
  DenseVector u(d);
  double sq = 0.0;
  // a zero normal vector has probability zero but would make the
  // normalization undefined
  while (sq == 0.0) {
    std::vector<std::size_t> coords(d);
    if (s2 == d) {
      std::iota(coords.begin(), coords.end(), std::size_t{0});
    } else {
      coords = rng.subset(d, s2);
    }
    u = DenseVector(d);
    for (std::size_t j : coords) {
      const double z = rng.normal();
      u[j] = z;
      sq += z * z;
    }
  }
  u *= 1.0 / std::sqrt(sq);
  return u;
}

std::vector<DenseVector> sample_directions(const ZoEstimatorConfig& cfg, RngStream& rng) {
  std::vector<DenseVector> dirs;
  dirs.reserve(cfg.q);
  for (std::size_t j = 0; j < cfg.q; ++j) dirs.push_back(sample_direction(cfg.d, cfg.s2, rng));
  return dirs;
}

ZoEstimate zo_gradient_with_directions(const FunctionOracle& oracle, std::size_t component,
                                       const DenseVector& theta, const ZoEstimatorConfig& cfg,
                                       std::span<const DenseVector> directions, QueryCounters& counters) {
  cfg.validate();
  if (theta.dim() != cfg.d || oracle.dim() != cfg.d) {
    throw DimensionError("zo_gradient: theta, oracle and config dimensions disagree");
  }
  if (cfg.mu < 1e-12 * (1.0 + theta.norm_inf())) {
    throw DomainError("zo_gradient: smoothing radius too small relative to |theta|_inf");
  }
  if (directions.empty()) throw DomainError("zo_gradient: no directions");

  const std::size_t d = cfg.d;
  const double base = oracle.eval_component(component, theta, counters);
  DenseVector grad(d);
  std::vector<std::size_t> touched;
  DenseVector probe = theta;
  for (const DenseVector& u : directions) {
    require_same_dim(u, theta);
    for (std::size_t j = 0; j < d; ++j) probe[j] = theta[j] + cfg.mu * u[j];
    const double diff = oracle.eval_component(component, probe, counters) - base;
    grad.axpy(diff, u);
    for (std::size_t j = 0; j < d; ++j) {
      if (u[j] != 0.0) touched.push_back(j);
    }
  }
  grad *= static_cast<double>(d) / (static_cast<double>(directions.size()) * cfg.mu);

  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  return {std::move(grad), directions.size() + 1, SupportSet(d, std::move(touched))};
}

ZoEstimate zo_gradient(const FunctionOracle& oracle, std::size_t component, const DenseVector& theta,
                       const ZoEstimatorConfig& cfg, RngStream& rng, QueryCounters& counters) {
  cfg.validate();
  const std::vector<DenseVector> dirs = sample_directions(cfg, rng);
  return zo_gradient_with_directions(oracle, component, theta, cfg, dirs, counters);
}

ZoEstimate zo_gradient(const ScalarFunction& f, const DenseVector& theta, const ZoEstimatorConfig& cfg,
                       RngStream& rng, QueryCounters& counters) {
  const ScalarOracle oracle(f, theta.dim());
  return zo_gradient(oracle, 0, theta, cfg, rng, counters);
}

ZoEstimate zo_full_gradient(const FunctionOracle& oracle, const DenseVector& theta, const ZoEstimatorConfig& cfg,
                            RngStream& rng, QueryCounters& counters) {
  const std::size_t n = oracle.size();
  DenseVector mean(theta.dim());
  SupportSet support(theta.dim(), {});
  std::uint64_t cost = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ZoEstimate e = zo_gradient(oracle, i, theta, cfg, rng, counters);
    mean += e.gradient;
    support = support.united(e.directions_support);
    cost += e.izo_cost;
  }
  mean *= 1.0 / static_cast<double>(n);
  return {std::move(mean), cost, std::move(support)};
}

}  // namespace zoht
