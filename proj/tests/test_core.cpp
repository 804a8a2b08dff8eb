#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "helpers.hpp"
#include "zoht/core.hpp"

using namespace zoht;
using zoht::testing::QuadraticOracle;

TEST_SUITE("core") {
  TEST_CASE("vector norms and products") {
    CHECK(DenseVector{3, -5, 1}.norm_inf() == 5.0);
    CHECK(DenseVector{1, 2}.dot(DenseVector{3, 4}) == 11.0);
    CHECK(DenseVector{3, 4}.norm2() == 5.0);
    CHECK(DenseVector{3, 4}.squared_norm() == 25.0);
    CHECK(DenseVector(0).norm_inf() == 0.0);
  }

  TEST_CASE("restrict_to zeroes coordinates outside the support") {
    const SupportSet s(3, {0, 2});
    CHECK(DenseVector{1, 2, 3}.restrict_to(s) == DenseVector{1, 0, 3});
  }

  TEST_CASE("arithmetic") {
    const DenseVector a{1, 2, 3};
    const DenseVector b{0.5, -1, 2};
    CHECK(a + b == DenseVector{1.5, 1, 5});
    CHECK(a - b == DenseVector{0.5, 3, 1});
    CHECK(2.0 * a == DenseVector{2, 4, 6});
    CHECK(a * -1.0 == DenseVector{-1, -2, -3});
    DenseVector c = a;
    c.axpy(2.0, b);
    CHECK(c == DenseVector{2, 0, 7});
  }

  TEST_CASE("length mismatch raises a dimension error") {
    const DenseVector a{1, 2};
    const DenseVector b{1, 2, 3};
    CHECK_THROWS_AS(a.dot(b), DimensionError);
    CHECK_THROWS_AS(a + b, DimensionError);
    CHECK_THROWS_AS(a - b, DimensionError);
    DenseVector c = a;
    CHECK_THROWS_AS(c.axpy(1.0, b), DimensionError);
    CHECK_THROWS_AS(a.restrict_to(SupportSet(3, {0})), DimensionError);
  }

  TEST_CASE("nnz counts exact nonzeros and matches the support") {
    RngStream rng(11, "test");
    for (int trial = 0; trial < 200; ++trial) {
      DenseVector v(8);
      for (std::size_t j = 0; j < 8; ++j) v[j] = rng.uniform() < 0.4 ? 0.0 : rng.normal();
      CHECK(v.nnz() == v.support().size());
      for (std::size_t j : v.support()) CHECK(v[j] != 0.0);
    }
    CHECK(DenseVector{1e-300, 0.0, -0.0}.nnz() == 1);
  }

  TEST_CASE("support sets validate and combine") {
    CHECK_THROWS_AS(SupportSet(3, {0, 3}), DomainError);
    CHECK_THROWS_AS(SupportSet(3, {1, 1}), DomainError);
    CHECK_THROWS_AS(SupportSet(3, {2, 1}), DomainError);
    const SupportSet a(6, {0, 2, 4});
    const SupportSet b(6, {1, 2, 5});
    CHECK(a.united(b).indices() == std::vector<std::size_t>{0, 1, 2, 4, 5});
    CHECK(a.intersected(b).indices() == std::vector<std::size_t>{2});
    CHECK(a.contains(4));
    CHECK_FALSE(a.contains(3));
    CHECK_THROWS_AS(a.united(SupportSet(5, {0})), DimensionError);
  }

  TEST_CASE("streams are deterministic per (seed, id) and independent across ids") {
    auto a = spawn_stream(7, streams::kDirections);
    auto b = spawn_stream(7, streams::kDirections);
    auto c = spawn_stream(7, streams::kIndices);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      differs = differs || x != c.next_u64();
    }
    CHECK(differs);
    CHECK(a.seed() == 7);
    CHECK(a.stream_id() == "directions");
  }

  TEST_CASE("subset of the full range is the full range") {
    auto rng = spawn_stream(3, streams::kIndices);
    CHECK(rng.subset(5, 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(rng.subset(5, 0).empty());
    CHECK_THROWS_AS(rng.subset(3, 4), DomainError);
  }

  TEST_CASE("subsets are sorted, distinct and uniform in membership") {
    auto rng = spawn_stream(5, streams::kMemorySets);
    std::vector<int> hits(10, 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      const auto s = rng.subset(10, 3);
      REQUIRE(s.size() == 3);
      CHECK(std::is_sorted(s.begin(), s.end()));
      CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 3);
      for (auto j : s) ++hits[j];
    }
    // marginal 3/10, binomial 4-sigma band
    const double p = 0.3;
    const double sigma = std::sqrt(p * (1 - p) / trials);
    for (int h : hits) CHECK(std::abs(h / double(trials) - p) < 4 * sigma);
  }

  TEST_CASE("normal draws have mean near zero and unit variance") {
    auto rng = spawn_stream(1, streams::kDataGen);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.03);
  }

  TEST_CASE("uniform draws lie in [0, 1) and integers in range") {
    auto rng = spawn_stream(2, streams::kDataGen);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
      const double u = rng.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      const auto j = rng.uniform_index(7);
      REQUIRE(j < 7);
      ++counts[j];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 4 * std::sqrt(10000 * 6.0 / 7.0));
    CHECK_THROWS_AS(rng.uniform_index(0), DomainError);
  }

  TEST_CASE("eval_mean equals the mean of components and counts n") {
    auto rng = spawn_stream(4, streams::kDataGen);
    const auto oracle = QuadraticOracle::random(6, 4, rng);
    for (int t = 0; t < 20; ++t) {
      const DenseVector theta = zoht::testing::random_vector(4, rng);
      QueryCounters c;
      double sum = 0.0;
      for (std::size_t i = 0; i < 6; ++i) sum += oracle.eval_component(i, theta, c);
      CHECK(c.izo == 6);
      const double mean = oracle.eval_mean(theta, c);
      CHECK(c.izo == 12);
      CHECK(std::abs(mean - sum / 6) <= 1e-12 * 6 * std::max(1.0, std::abs(mean)));
      CHECK(oracle.mean_value(theta) == doctest::Approx(mean).epsilon(1e-14));
      CHECK(c.izo == 12);
      CHECK(c.nht == 0);
    }
  }

  TEST_CASE("exact mean gradient averages component gradients") {
    auto rng = spawn_stream(9, streams::kDataGen);
    const auto oracle = QuadraticOracle::random(5, 3, rng);
    const DenseVector theta{0.3, -1, 2};
    DenseVector expected(3);
    for (std::size_t i = 0; i < 5; ++i) expected.axpy(0.2, oracle.exact_component_gradient(i, theta));
    CHECK(zoht::testing::max_abs_diff(oracle.exact_mean_gradient(theta), expected) < 1e-14);
  }

  TEST_CASE("non-finite component value raises a numeric error carrying the point") {
    struct Bad final : FunctionOracle {
      std::size_t size() const override { return 1; }
      std::size_t dim() const override { return 2; }

     protected:
      double component_value(std::size_t, const DenseVector& theta) const override {
        return theta[0] > 0 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
      }
    } bad;
    QueryCounters c;
    CHECK(bad.eval_component(0, DenseVector{-1, 0}, c) == 1.0);
    try {
      bad.eval_component(0, DenseVector{1, 5}, c);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(e.point() == std::vector<double>{1, 5});
    }
    CHECK_THROWS_AS(bad.exact_component_gradient(0, DenseVector{0, 0}), UnsupportedError);
    CHECK_FALSE(bad.known_minimizer().has_value());
  }
}
