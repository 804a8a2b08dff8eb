#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "zoht/core.hpp"

namespace zoht {

// ---------------------------------------------------------------------------
// Ridge regression
// ---------------------------------------------------------------------------

/// f_i(theta) = (x_i^T theta - y_i)^2 + (lambda / 2) ||theta||^2.
class RidgeProblem final : public FunctionOracle {
 public:
  /// `features` is row-major n x d. `standardized` only records that the
  /// caller already standardized the columns.
  RidgeProblem(std::vector<double> features, std::vector<double> targets, std::size_t dim, double lambda,
               bool standardized = false);

  std::size_t size() const override { return targets_.size(); }
  std::size_t dim() const override { return dim_; }
  double lambda() const noexcept { return lambda_; }
  bool standardized() const noexcept { return standardized_; }

  std::span<const double> row(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }
  double target(std::size_t i) const { return targets_.at(i); }
  std::span<const double> targets() const noexcept { return targets_; }

  /// Centres every feature column and divides by its sample standard
  /// deviation (n - 1). Constant columns become zero and are reported in
  /// warnings(). Targets are left untouched.
  void standardize();

  bool has_exact_gradient() const override { return true; }
  DenseVector exact_component_gradient(std::size_t i, const DenseVector& theta) const override;

  std::optional<DenseVector> known_minimizer() const override { return minimizer_; }
  void set_known_minimizer(DenseVector theta) { minimizer_ = std::move(theta); }

  /// Minimizer of F over all supports of size kstar, by exhaustive
  /// enumeration with a restricted linear solve per support.
  DenseVector best_sparse_solution(std::size_t kstar) const;

  /// Extreme eigenvalues of (2/n) X^T X + lambda I, used as stand-ins for
  /// the restricted strong convexity / smoothness constants.
  std::pair<double, double> curvature_bounds() const;

  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  void set_column_names(std::vector<std::string> names) { column_names_ = std::move(names); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 protected:
  double component_value(std::size_t i, const DenseVector& theta) const override;

 private:
  double residual(std::size_t i, const DenseVector& theta) const;

  std::vector<double> features_;
  std::vector<double> targets_;
  std::size_t dim_;
  double lambda_;
  bool standardized_ = false;
  std::optional<DenseVector> minimizer_;
  std::vector<std::string> column_names_;
  std::vector<std::string> warnings_;
};

struct RidgeSyntheticOptions {
  /// When positive, the generating model keeps only its `sparsity` largest
  /// entries.
  std::size_t sparsity = 0;
};

/// n points uniform in the unit l2 ball of R^d, row-major: a normal
/// direction scaled to radius U^{1/d}. Consumes d normals then one uniform
/// per point.
std::vector<double> sample_unit_ball(std::size_t n, std::size_t d, RngStream& rng);

/// x_i from sample_unit_ball (normal direction times U^{1/d}), columns
/// standardized, theta* ~ N(0, I), y_i = x_i^T theta* on the standardized
/// features. The generating model is kept as known_minimizer(); it is the
/// true minimizer when lambda = 0.
RidgeProblem ridge_synthetic(std::size_t n, std::size_t d, double lambda, RngStream& rng,
                             RidgeSyntheticOptions options = {});

/// Comma-separated file with a header row; every other column is a feature.
/// Throws ParseError on a non-numeric cell and DomainError on a missing
/// target column or an empty body.
RidgeProblem ridge_from_csv(const std::filesystem::path& path, const std::string& target_column, double lambda);

// ---------------------------------------------------------------------------
// Black-box attack
// ---------------------------------------------------------------------------

/// Scores an input vector; exposes log-probabilities only.
class BlackBoxClassifier {
 public:
  virtual ~BlackBoxClassifier() = default;
  virtual std::size_t num_classes() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::vector<double> log_probs(std::span<const double> x) const = 0;
};

/// Fixed random linear scorer followed by log-softmax.
class SurrogateClassifier final : public BlackBoxClassifier {
 public:
  SurrogateClassifier(std::size_t input_dim, std::size_t num_classes, RngStream& rng);

  std::size_t num_classes() const override { return classes_; }
  std::size_t input_dim() const override { return dim_; }
  std::vector<double> log_probs(std::span<const double> x) const override;

 private:
  std::size_t dim_;
  std::size_t classes_;
  std::vector<double> weights_;  // classes x dim
  std::vector<double> bias_;
};

std::shared_ptr<const BlackBoxClassifier> surrogate_classifier(std::size_t input_dim, std::size_t num_classes,
                                                               RngStream& rng);

/// Universal perturbation objective:
/// f_i(theta) = max{F_y(clip(x_i + theta)) - max_{j != y} F_j(clip(x_i + theta)), 0}
/// with clip to [-0.5, 0.5].
class CwAttackProblem final : public FunctionOracle {
 public:
  static constexpr double kPixelMin = -0.5;
  static constexpr double kPixelMax = 0.5;

  CwAttackProblem(std::vector<DenseVector> images, std::vector<std::size_t> labels,
                  std::shared_ptr<const BlackBoxClassifier> classifier);

  std::size_t size() const override { return images_.size(); }
  std::size_t dim() const override { return classifier_->input_dim(); }

  const DenseVector& image(std::size_t i) const { return images_.at(i); }
  std::size_t label(std::size_t i) const { return labels_.at(i); }
  const BlackBoxClassifier& classifier() const { return *classifier_; }

  /// clip(x_i + theta).
  DenseVector attacked_image(std::size_t i, const DenseVector& theta) const;
  /// Uncounted loss; throws NumericError when the classifier output is not
  /// finite.
  double loss(std::size_t i, const DenseVector& theta) const;
  std::size_t predicted_class(std::size_t i, const DenseVector& theta) const;

 protected:
  double component_value(std::size_t i, const DenseVector& theta) const override { return loss(i, theta); }

 private:
  std::vector<DenseVector> images_;
  std::vector<std::size_t> labels_;
  std::shared_ptr<const BlackBoxClassifier> classifier_;
};

double cw_loss(const CwAttackProblem& problem, std::size_t i, const DenseVector& theta);

/// n random images in [-0.5, 0.5]^d labelled with the surrogate's own
/// prediction, so that every initial loss is positive.
CwAttackProblem attack_surrogate(std::size_t n, std::size_t d, std::size_t num_classes, RngStream& rng);

}  // namespace zoht
