#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "zoht/core.hpp"

namespace zoht::testing {

/// f_i(theta) = 0.5 theta^T A_i theta + b_i^T theta + c_i with exact gradients.
class QuadraticOracle final : public FunctionOracle {
 public:
  QuadraticOracle(std::vector<std::vector<double>> A, std::vector<DenseVector> b, std::vector<double> c)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

  /// n random convex quadratics on R^d: A_i = M M^T / d + shift I.
  static QuadraticOracle random(std::size_t n, std::size_t d, RngStream& rng, double shift = 0.1) {
    std::vector<std::vector<double>> A;
    std::vector<DenseVector> b;
    std::vector<double> c;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> M(d * d);
      for (auto& x : M) x = rng.normal();
      std::vector<double> Ai(d * d, 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t s = 0; s < d; ++s) {
          double acc = 0.0;
          for (std::size_t t = 0; t < d; ++t) acc += M[r * d + t] * M[s * d + t];
          Ai[r * d + s] = acc / static_cast<double>(d) + (r == s ? shift : 0.0);
        }
      }
      DenseVector bi(d);
      for (std::size_t j = 0; j < d; ++j) bi[j] = rng.normal();
      A.push_back(std::move(Ai));
      b.push_back(std::move(bi));
      c.push_back(rng.normal());
    }
    return QuadraticOracle(std::move(A), std::move(b), std::move(c));
  }

  std::size_t size() const override { return b_.size(); }
  std::size_t dim() const override { return b_.front().dim(); }
  bool has_exact_gradient() const override { return true; }

  DenseVector exact_component_gradient(std::size_t i, const DenseVector& theta) const override {
    const std::size_t d = dim();
    DenseVector g = b_[i];
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t s = 0; s < d; ++s) g[r] += A_[i][r * d + s] * theta[s];
    }
    return g;
  }

 protected:
  double component_value(std::size_t i, const DenseVector& theta) const override {
    const std::size_t d = dim();
    double v = c_[i] + b_[i].dot(theta);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t s = 0; s < d; ++s) v += 0.5 * theta[r] * A_[i][r * d + s] * theta[s];
    }
    return v;
  }

 private:
  std::vector<std::vector<double>> A_;
  std::vector<DenseVector> b_;
  std::vector<double> c_;
};

/// n identical components f_i(theta) = ||theta - center||^2.
class DistanceOracle final : public FunctionOracle {
 public:
  DistanceOracle(DenseVector center, std::size_t n) : center_(std::move(center)), n_(n) {}
  std::size_t size() const override { return n_; }
  std::size_t dim() const override { return center_.dim(); }
  bool has_exact_gradient() const override { return true; }
  DenseVector exact_component_gradient(std::size_t, const DenseVector& theta) const override {
    return 2.0 * (theta - center_);
  }
  std::optional<DenseVector> known_minimizer() const override { return center_; }

 protected:
  double component_value(std::size_t, const DenseVector& theta) const override {
    return (theta - center_).squared_norm();
  }

 private:
  DenseVector center_;
  std::size_t n_;
};

/// f_i(theta) = a_i . theta.
class LinearOracle final : public FunctionOracle {
 public:
  explicit LinearOracle(std::vector<DenseVector> a) : a_(std::move(a)) {}
  std::size_t size() const override { return a_.size(); }
  std::size_t dim() const override { return a_.front().dim(); }
  bool has_exact_gradient() const override { return true; }
  DenseVector exact_component_gradient(std::size_t i, const DenseVector&) const override { return a_[i]; }

 protected:
  double component_value(std::size_t i, const DenseVector& theta) const override { return a_[i].dot(theta); }

 private:
  std::vector<DenseVector> a_;
};

inline double max_abs_diff(const DenseVector& a, const DenseVector& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline DenseVector random_vector(std::size_t d, RngStream& rng, double scale = 1.0) {
  DenseVector v(d);
  for (std::size_t j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

}  // namespace zoht::testing
