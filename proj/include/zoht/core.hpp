#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zoht {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary operation on vectors of different length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (k > d, s2 > d, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Row and column are 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A function value that was NaN or infinite. Carries the query point.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::vector<double> point)
      : Error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

// ---------------------------------------------------------------------------
// SupportSet
// ---------------------------------------------------------------------------

/// Strictly increasing set of coordinate indices in [0, dim).
class SupportSet {
 public:
  SupportSet() = default;
  /// Throws DomainError unless `indices` is strictly increasing and < dim.
  SupportSet(std::size_t dim, std::vector<std::size_t> indices);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t i) const;
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  SupportSet united(const SupportSet& other) const;
  SupportSet intersected(const SupportSet& other) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> indices_;
};

// ---------------------------------------------------------------------------
// DenseVector
// ---------------------------------------------------------------------------

/// Fixed-length real vector. Length never changes after construction.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  explicit DenseVector(std::vector<double> values) : values_(std::move(values)) {}
  DenseVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& raw() const noexcept { return values_; }

  DenseVector& operator+=(const DenseVector& other);
  DenseVector& operator-=(const DenseVector& other);
  DenseVector& operator*=(double a);
  /// this += a * x
  DenseVector& axpy(double a, const DenseVector& x);

  double dot(const DenseVector& other) const;
  double norm2() const;
  double squared_norm() const;
  double norm_inf() const;
  /// Count of entries with |v_i| > 0 exactly.
  std::size_t nnz() const;
  SupportSet support() const;
  /// Copy with every coordinate outside `s` set to zero.
  DenseVector restrict_to(const SupportSet& s) const;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> values_;
};

DenseVector operator+(DenseVector a, const DenseVector& b);
DenseVector operator-(DenseVector a, const DenseVector& b);
DenseVector operator*(double a, DenseVector v);
DenseVector operator*(DenseVector v, double a);

/// Throws DimensionError when the lengths differ.
void require_same_dim(const DenseVector& a, const DenseVector& b);

// ---------------------------------------------------------------------------
// RngStream
// ---------------------------------------------------------------------------

namespace streams {
inline constexpr std::string_view kDataGen = "data-gen";
inline constexpr std::string_view kDirections = "directions";
inline constexpr std::string_view kIndices = "indices";
inline constexpr std::string_view kMemorySets = "memory-sets";
}  // namespace streams

/// Identifier recorded in experiment metadata.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 seeded by splitmix64(seed ^ fnv1a64(stream_id)); "
    "uniform = top 53 bits; normal = Box-Muller; int = rejection";

/// Deterministic random stream keyed by (seed, stream_id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here rather than taken from
/// <random> because the standard leaves those implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniformly random size-m subset of [0, n), sorted ascending.
  std::vector<std::size_t> subset(std::size_t n, std::size_t m);

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

RngStream spawn_stream(std::uint64_t seed, std::string_view stream_id);

// ---------------------------------------------------------------------------
// Query accounting
// ---------------------------------------------------------------------------

/// izo: single f_i evaluations. nht: hard-thresholding applications.
struct QueryCounters {
  std::uint64_t izo = 0;
  std::uint64_t nht = 0;
};

// ---------------------------------------------------------------------------
// FunctionOracle
// ---------------------------------------------------------------------------

/// Black-box finite sum F(theta) = (1/n) sum_i f_i(theta).
///
/// Counted evaluation goes through eval_component / eval_mean only; trace
/// measurement uses mean_value, which is free.
class FunctionOracle {
 public:
  virtual ~FunctionOracle() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;

  /// f_i(theta); izo += 1. Throws NumericError on a non-finite value.
  double eval_component(std::size_t i, const DenseVector& theta, QueryCounters& counters) const;
  /// F(theta); izo += n.
  double eval_mean(const DenseVector& theta, QueryCounters& counters) const;
  /// F(theta) without touching any counter.
  double mean_value(const DenseVector& theta) const;

  virtual bool has_exact_gradient() const { return false; }
  /// Throws UnsupportedError unless has_exact_gradient().
  virtual DenseVector exact_component_gradient(std::size_t i, const DenseVector& theta) const;
  DenseVector exact_mean_gradient(const DenseVector& theta) const;

  virtual std::optional<DenseVector> known_minimizer() const { return std::nullopt; }

 protected:
  virtual double component_value(std::size_t i, const DenseVector& theta) const = 0;
};

}  // namespace zoht
