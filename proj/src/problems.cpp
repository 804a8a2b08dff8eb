#include "zoht/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "zoht/ht.hpp"

namespace zoht {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_matrix(const std::vector<double>& features, std::size_t n, std::size_t d) {
  return {features.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// RidgeProblem
// ---------------------------------------------------------------------------

RidgeProblem::RidgeProblem(std::vector<double> features, std::vector<double> targets, std::size_t dim,
                           double lambda, bool standardized)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      dim_(dim),
      lambda_(lambda),
      standardized_(standardized) {
  if (dim_ == 0) throw DomainError("ridge problem needs at least one feature");
  if (targets_.empty()) throw DomainError("ridge problem needs at least one sample");
  if (features_.size() != targets_.size() * dim_) {
    throw DimensionError("feature matrix has " + std::to_string(features_.size()) + " entries, expected " +
                         std::to_string(targets_.size() * dim_));
  }
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw DomainError("lambda must be finite and >= 0");
}

void RidgeProblem::standardize() {
  const std::size_t n = size();
  for (std::size_t j = 0; j < dim_; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += features_[i * dim_ + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = features_[i * dim_ + j] - mean;
      ss += c * c;
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
    for (std::size_t i = 0; i < n; ++i) {
      double& x = features_[i * dim_ + j];
      x = constant ? 0.0 : (x - mean) / sd;
    }
    if (constant) {
      const std::string name = j < column_names_.size() ? column_names_[j] : "#" + std::to_string(j);
      warnings_.push_back("feature column '" + name + "' is constant; left at zero");
    }
  }
  standardized_ = true;
}

double RidgeProblem::residual(std::size_t i, const DenseVector& theta) const {
  const auto x = row(i);
  double r = -targets_[i];
  for (std::size_t j = 0; j < dim_; ++j) r += x[j] * theta[j];
  return r;
}

double RidgeProblem::component_value(std::size_t i, const DenseVector& theta) const {
  if (theta.dim() != dim_) throw DimensionError("theta has wrong dimension for ridge problem");
  const double r = residual(i, theta);
  return r * r + 0.5 * lambda_ * theta.squared_norm();
}

DenseVector RidgeProblem::exact_component_gradient(std::size_t i, const DenseVector& theta) const {
  if (theta.dim() != dim_) throw DimensionError("theta has wrong dimension for ridge problem");
  const double r2 = 2.0 * residual(i, theta);
  const auto x = row(i);
  DenseVector g(dim_);
  for (std::size_t j = 0; j < dim_; ++j) g[j] = r2 * x[j] + lambda_ * theta[j];
  return g;
}

DenseVector RidgeProblem::best_sparse_solution(std::size_t kstar) const {
  if (kstar == 0 || kstar > dim_) throw DomainError("kstar must lie in [1, d]");
  const std::size_t n = size();
  const auto X = as_matrix(features_, n, dim_);
  const Eigen::Map<const Eigen::VectorXd> y(targets_.data(), static_cast<Eigen::Index>(n));
  // F(theta) = (1/n)||X theta - y||^2 + (lambda/2)||theta||^2
  const Eigen::MatrixXd H = (2.0 / n) * X.transpose() * X +
                            lambda_ * Eigen::MatrixXd::Identity(dim_, dim_);
  const Eigen::VectorXd b = (2.0 / n) * X.transpose() * y;

  DenseVector best(dim_);
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<bool> mask(dim_, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(kstar), true);
  do {
    std::vector<Eigen::Index> idx;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (mask[j]) idx.push_back(static_cast<Eigen::Index>(j));
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Hs(k, k);
    Eigen::VectorXd bs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      bs(a) = b(idx[a]);
      for (Eigen::Index c = 0; c < k; ++c) Hs(a, c) = H(idx[a], idx[c]);
    }
    const Eigen::VectorXd ts = Hs.completeOrthogonalDecomposition().solve(bs);
    DenseVector candidate(dim_);
    for (Eigen::Index a = 0; a < k; ++a) candidate[static_cast<std::size_t>(idx[a])] = ts(a);
    const double value = mean_value(candidate);
    if (value < best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

std::pair<double, double> RidgeProblem::curvature_bounds() const {
  const std::size_t n = size();
  const auto X = as_matrix(features_, n, dim_);
  const Eigen::MatrixXd H = (2.0 / n) * X.transpose() * X +
                            lambda_ * Eigen::MatrixXd::Identity(dim_, dim_);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

std::vector<double> sample_unit_ball(std::size_t n, std::size_t d, RngStream& rng) {
  std::vector<double> points(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double z = rng.normal();
      points[i * d + j] = z;
      norm_sq += z * z;
    }
    const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    const double scale = norm_sq > 0.0 ? radius / std::sqrt(norm_sq) : 0.0;
    for (std::size_t j = 0; j < d; ++j) points[i * d + j] *= scale;
  }
  return points;
}

RidgeProblem ridge_synthetic(std::size_t n, std::size_t d, double lambda, RngStream& rng,
                             RidgeSyntheticOptions options) {
  if (n == 0 || d == 0) throw DomainError("ridge_synthetic needs n, d >= 1");
  if (options.sparsity > d) throw DomainError("sparsity exceeds dimension");
  std::vector<double> features = sample_unit_ball(n, d, rng);
  DenseVector theta_star(d);
  for (std::size_t j = 0; j < d; ++j) theta_star[j] = rng.normal();
  if (options.sparsity > 0) theta_star = hard_threshold(theta_star, options.sparsity).vector;

  // targets are generated from the standardized features so that theta*
  // stays an exact zero-residual point
  RidgeProblem scratch(std::move(features), std::vector<double>(n, 0.0), d, lambda);
  scratch.standardize();
  std::vector<double> standardized(scratch.row(0).data(), scratch.row(0).data() + n * d);
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = scratch.row(i);
    double y = 0.0;
    for (std::size_t j = 0; j < d; ++j) y += x[j] * theta_star[j];
    targets[i] = y;
  }
  RidgeProblem out(std::move(standardized), std::move(targets), d, lambda, true);
  out.set_known_minimizer(std::move(theta_star));
  return out;
}

RidgeProblem ridge_from_csv(const std::filesystem::path& path, const std::string& target_column, double lambda) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("'" + path.string() + "': missing header row", 0, 0);

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) {
    std::string available;
    for (const auto& h : header) available += (available.empty() ? "" : ", ") + h;
    throw DomainError("target column '" + target_column + "' not found in '" + path.string() +
                      "'; available: " + available);
  }
  const auto target_index = static_cast<std::size_t>(target_it - header.begin());
  if (header.size() < 2) throw DomainError("'" + path.string() + "' has no feature columns");

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_index) names.push_back(header[c]);
  }
  const std::size_t d = names.size();

  std::vector<double> features;
  std::vector<double> targets;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_fields(line);
    if (cells.size() != header.size()) {
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()),
                       line_no, 0);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = parse_number(cells[c]);
      if (!value) {
        throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ", column " +
                             std::to_string(c + 1) + " ('" + header[c] + "'): non-numeric cell '" + cells[c] + "'",
                         line_no, c + 1);
      }
      if (c == target_index) {
        targets.push_back(*value);
      } else {
        features.push_back(*value);
      }
    }
  }
  if (targets.empty()) throw DomainError("'" + path.string() + "': no data rows");

  RidgeProblem problem(std::move(features), std::move(targets), d, lambda);
  problem.set_column_names(std::move(names));
  problem.standardize();
  return problem;
}

// ---------------------------------------------------------------------------
// Attack
// ---------------------------------------------------------------------------

SurrogateClassifier::SurrogateClassifier(std::size_t input_dim, std::size_t num_classes, RngStream& rng)
    : dim_(input_dim), classes_(num_classes), weights_(input_dim * num_classes), bias_(num_classes) {
  if (dim_ == 0) throw DomainError("classifier input dimension must be positive");
  if (classes_ < 2) throw DomainError("classifier needs at least two classes");
  for (auto& w : weights_) w = rng.normal();
  for (auto& b : bias_) b = 0.1 * rng.normal();
}

std::vector<double> SurrogateClassifier::log_probs(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("classifier input has wrong dimension");
  std::vector<double> scores(bias_);
  for (std::size_t c = 0; c < classes_; ++c) {
    const double* w = weights_.data() + c * dim_;
    for (std::size_t j = 0; j < dim_; ++j) scores[c] += w[j] * x[j];
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  const double lse = top + std::log(sum);
  for (double& s : scores) s -= lse;
  return scores;
}

std::shared_ptr<const BlackBoxClassifier> surrogate_classifier(std::size_t input_dim, std::size_t num_classes,
                                                               RngStream& rng) {
  return std::make_shared<SurrogateClassifier>(input_dim, num_classes, rng);
}

CwAttackProblem::CwAttackProblem(std::vector<DenseVector> images, std::vector<std::size_t> labels,
                                 std::shared_ptr<const BlackBoxClassifier> classifier)
    : images_(std::move(images)), labels_(std::move(labels)), classifier_(std::move(classifier)) {
  if (!classifier_) throw DomainError("attack problem needs a classifier");
  if (images_.empty()) throw DomainError("attack problem needs at least one image");
  if (images_.size() != labels_.size()) throw DimensionError("images and labels differ in count");
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].dim() != classifier_->input_dim()) throw DimensionError("image dimension mismatch");
    for (double v : images_[i].values()) {
      if (!(v >= kPixelMin && v <= kPixelMax)) throw DomainError("image pixels must lie in [-0.5, 0.5]");
    }
    if (labels_[i] >= classifier_->num_classes()) throw DomainError("label out of range");
  }
}

DenseVector CwAttackProblem::attacked_image(std::size_t i, const DenseVector& theta) const {
  const DenseVector& x = images_.at(i);
  require_same_dim(x, theta);
  DenseVector out(x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j) out[j] = std::clamp(x[j] + theta[j], kPixelMin, kPixelMax);
  return out;
}

double CwAttackProblem::loss(std::size_t i, const DenseVector& theta) const {
  const DenseVector x = attacked_image(i, theta);
  const auto lp = classifier_->log_probs(x.values());
  if (lp.size() != classifier_->num_classes()) throw DimensionError("classifier returned wrong class count");
  for (double v : lp) {
    if (!std::isfinite(v)) throw NumericError("classifier returned a non-finite log-probability", theta.raw());
  }
  const std::size_t y = labels_[i];
  double other = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < lp.size(); ++c) {
    if (c != y) other = std::max(other, lp[c]);
  }
  return std::max(lp[y] - other, 0.0);
}

std::size_t CwAttackProblem::predicted_class(std::size_t i, const DenseVector& theta) const {
  const auto lp = classifier_->log_probs(attacked_image(i, theta).values());
  return static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
}

double cw_loss(const CwAttackProblem& problem, std::size_t i, const DenseVector& theta) {
  return problem.loss(i, theta);
}

CwAttackProblem attack_surrogate(std::size_t n, std::size_t d, std::size_t num_classes, RngStream& rng) {
  if (n == 0) throw DomainError("attack needs at least one image");
  auto classifier = surrogate_classifier(d, num_classes, rng);
  std::vector<DenseVector> images;
  std::vector<std::size_t> labels;
  images.reserve(n);
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DenseVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform() - 0.5;
    const auto lp = classifier->log_probs(x.values());
    labels.push_back(static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin()));
    images.push_back(std::move(x));
  }
  return CwAttackProblem(std::move(images), std::move(labels), std::move(classifier));
}

}  // namespace zoht
