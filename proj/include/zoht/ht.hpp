#pragma once

#include "zoht/core.hpp"

namespace zoht {

struct HtResult {
  DenseVector vector;
  SupportSet kept;
};

/// Keeps the k largest-magnitude entries of v and zeroes the rest.
///
/// Ties at the k-th magnitude go to the lower index. Zero entries are never
/// reported in `kept`, so kept.size() < k when nnz(v) < k. Throws DomainError
/// when k > dim.
HtResult hard_threshold(const DenseVector& v, std::size_t k);

/// Same as above and counts one hard-thresholding operation.
HtResult hard_threshold(const DenseVector& v, std::size_t k, QueryCounters& counters);

/// ||H_k(v) - target||^2 / ||v - target||^2.
///
/// Requires k > nnz(target) and v != target.
double expansivity_ratio(const DenseVector& v, const DenseVector& target, std::size_t k);

}  // namespace zoht
