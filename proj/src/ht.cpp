#include "zoht/ht.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zoht {

HtResult hard_threshold(const DenseVector& v, std::size_t k) {
  const std::size_t d = v.dim();
  if (k > d) {
    throw DomainError("hard_threshold: k=" + std::to_string(k) + " exceeds dimension " + std::to_string(d));
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto larger = [&v](std::size_t a, std::size_t b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma > mb || (ma == mb && a < b);
  };
  if (k < d) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), larger);
  }
  order.resize(k);
  std::erase_if(order, [&v](std::size_t i) { return v[i] == 0.0; });
  std::sort(order.begin(), order.end());

  DenseVector out(d);
  for (std::size_t i : order) out[i] = v[i];
  return {std::move(out), SupportSet(d, std::move(order))};
}

HtResult hard_threshold(const DenseVector& v, std::size_t k, QueryCounters& counters) {
  HtResult r = hard_threshold(v, k);
  ++counters.nht;
  return r;
}

double expansivity_ratio(const DenseVector& v, const DenseVector& target, std::size_t k) {
  require_same_dim(v, target);
  const std::size_t kstar = target.nnz();
  if (k <= kstar) {
    throw PreconditionError("expansivity_ratio requires k > nnz(target)");
  }
  const double denom = (v - target).squared_norm();
  if (denom == 0.0) throw DegenerateError("expansivity_ratio: v equals target");
  const DenseVector h = hard_threshold(v, k).vector;
  return (h - target).squared_norm() / denom;
}

}  // namespace zoht
