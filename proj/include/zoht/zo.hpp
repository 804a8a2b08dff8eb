#pragma once

#include <functional>
#include <span>
#include <vector>

#include "zoht/core.hpp"

namespace zoht {

/// Parameters of the random-direction forward-difference estimator.
struct ZoEstimatorConfig {
  std::size_t q = 1;   // directions per estimate
  std::size_t s2 = 1;  // support size of each direction
  double mu = 1e-4;    // smoothing radius
  std::size_t d = 1;   // ambient dimension

  /// Throws DomainError unless q >= 1, 1 <= s2 <= d and mu > 0.
  void validate() const;
  /// IZO units charged for one component estimate.
  std::uint64_t cost() const noexcept { return q + 1; }
};

struct ZoEstimate {
  DenseVector gradient;
  std::uint64_t izo_cost = 0;
  SupportSet directions_support;  // union over the sampled directions
};

/// Unit vector supported on a uniformly random s2-subset, uniform on that
/// subset's sphere.
DenseVector sample_direction(std::size_t d, std::size_t s2, RngStream& rng);

std::vector<DenseVector> sample_directions(const ZoEstimatorConfig& cfg, RngStream& rng);

/// (d / (q mu)) * sum_i (f_i(theta + mu u) - f_i(theta)) u over the given
/// directions. f_i(theta) is evaluated once; izo += directions.size() + 1.
ZoEstimate zo_gradient_with_directions(const FunctionOracle& oracle, std::size_t component,
                                       const DenseVector& theta, const ZoEstimatorConfig& cfg,
                                       std::span<const DenseVector> directions, QueryCounters& counters);

ZoEstimate zo_gradient(const FunctionOracle& oracle, std::size_t component, const DenseVector& theta,
                       const ZoEstimatorConfig& cfg, RngStream& rng, QueryCounters& counters);

using ScalarFunction = std::function<double(const DenseVector&)>;

/// Single-component oracle around a plain function handle.
class ScalarOracle final : public FunctionOracle {
 public:
  ScalarOracle(ScalarFunction f, std::size_t dim) : f_(std::move(f)), dim_(dim) {}
  std::size_t size() const override { return 1; }
  std::size_t dim() const override { return dim_; }

 protected:
  double component_value(std::size_t, const DenseVector& theta) const override { return f_(theta); }

 private:
  ScalarFunction f_;
  std::size_t dim_;
};

ZoEstimate zo_gradient(const ScalarFunction& f, const DenseVector& theta, const ZoEstimatorConfig& cfg,
                       RngStream& rng, QueryCounters& counters);

/// Mean of per-component estimates with fresh directions for every
/// component; izo += n (q + 1).
ZoEstimate zo_full_gradient(const FunctionOracle& oracle, const DenseVector& theta, const ZoEstimatorConfig& cfg,
                            RngStream& rng, QueryCounters& counters);

}  // namespace zoht
