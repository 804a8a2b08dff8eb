#include "zoht/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace zoht {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// SupportSet

SupportSet::SupportSet(std::size_t dim, std::vector<std::size_t> indices)
    : dim_(dim), indices_(std::move(indices)) {
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    if (indices_[j] >= dim_) {
      throw DomainError("support index " + std::to_string(indices_[j]) + " out of range for dimension " +
                        std::to_string(dim_));
    }
    if (j > 0 && indices_[j] <= indices_[j - 1]) {
      throw DomainError("support indices must be strictly increasing");
    }
  }
}

bool SupportSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

SupportSet SupportSet::united(const SupportSet& other) const {
  if (dim_ != other.dim_) throw DimensionError("support sets over different dimensions");
  std::vector<std::size_t> out;
  out.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  return SupportSet(dim_, std::move(out));
}

SupportSet SupportSet::intersected(const SupportSet& other) const {
  if (dim_ != other.dim_) throw DimensionError("support sets over different dimensions");
  std::vector<std::size_t> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
  return SupportSet(dim_, std::move(out));
}

// ---------------------------------------------------------------------------
// DenseVector

void require_same_dim(const DenseVector& a, const DenseVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

DenseVector& DenseVector::operator+=(const DenseVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

DenseVector& DenseVector::operator-=(const DenseVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

DenseVector& DenseVector::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

DenseVector& DenseVector::axpy(double a, const DenseVector& x) {
  require_same_dim(*this, x);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

double DenseVector::dot(const DenseVector& other) const {
  require_same_dim(*this, other);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

double DenseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double DenseVector::norm2() const { return std::sqrt(squared_norm()); }

double DenseVector::norm_inf() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::size_t DenseVector::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return std::abs(v) > 0.0; }));
}

SupportSet DenseVector::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::abs(values_[i]) > 0.0) idx.push_back(i);
  }
  return SupportSet(values_.size(), std::move(idx));
}

DenseVector DenseVector::restrict_to(const SupportSet& s) const {
  if (s.dim() != dim()) throw DimensionError("support dimension does not match vector dimension");
  DenseVector out(dim());
  for (std::size_t i : s) out.values_[i] = values_[i];
  return out;
}

DenseVector operator+(DenseVector a, const DenseVector& b) { return a += b; }
DenseVector operator-(DenseVector a, const DenseVector& b) { return a -= b; }
DenseVector operator*(double a, DenseVector v) { return v *= a; }
DenseVector operator*(DenseVector v, double a) { return v *= a; }

// ---------------------------------------------------------------------------
// RngStream

RngStream::RngStream(std::uint64_t seed, std::string_view stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ fnv1a64(stream_id))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (spare_normal_) {
    double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  return r * std::cos(a);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw DomainError("uniform_index over an empty range");
  // rejection sampling on the largest multiple of n
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::vector<std::size_t> RngStream::subset(std::size_t n, std::size_t m) {
  if (m > n) throw DomainError("subset size exceeds population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(uniform_index(n - j));
    std::swap(pool[j], pool[r]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

RngStream spawn_stream(std::uint64_t seed, std::string_view stream_id) { return RngStream(seed, stream_id); }

// ---------------------------------------------------------------------------
// FunctionOracle

double FunctionOracle::eval_component(std::size_t i, const DenseVector& theta, QueryCounters& counters) const {
  ++counters.izo;
  const double v = component_value(i, theta);
  if (!std::isfinite(v)) {
    throw NumericError("non-finite value of component " + std::to_string(i), theta.raw());
  }
  return v;
}

double FunctionOracle::eval_mean(const DenseVector& theta, QueryCounters& counters) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += eval_component(i, theta, counters);
  return s / static_cast<double>(size());
}

double FunctionOracle::mean_value(const DenseVector& theta) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += component_value(i, theta);
  return s / static_cast<double>(size());
}

DenseVector FunctionOracle::exact_component_gradient(std::size_t, const DenseVector&) const {
  throw UnsupportedError("this oracle does not expose exact gradients");
}

DenseVector FunctionOracle::exact_mean_gradient(const DenseVector& theta) const {
  DenseVector g(dim());
  for (std::size_t i = 0; i < size(); ++i) g += exact_component_gradient(i, theta);
  g *= 1.0 / static_cast<double>(size());
  return g;
}

}  // namespace zoht
