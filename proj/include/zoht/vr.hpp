#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "zoht/core.hpp"
#include "zoht/zo.hpp"

namespace zoht {

/// Source of per-component gradient estimates used by the variance-reduced
/// constructors. Either the zeroth-order estimator or exact gradients (the
/// latter lets tests enumerate expectations exactly).
class GradientSource {
 public:
  virtual ~GradientSource() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  /// IZO charged per component estimate.
  virtual std::uint64_t component_cost() const = 0;

  virtual DenseVector component(std::size_t i, const DenseVector& theta, QueryCounters& counters) = 0;
  /// Estimates of grad f_i at `a` and at `b`. With `shared` both use the same
  /// random directions; otherwise the draws are independent.
  virtual std::pair<DenseVector, DenseVector> component_pair(std::size_t i, const DenseVector& a,
                                                             const DenseVector& b, bool shared,
                                                             QueryCounters& counters) = 0;
  /// Mean of component(i, theta) over all i.
  virtual DenseVector full(const DenseVector& theta, QueryCounters& counters);
};

class ZoGradientSource final : public GradientSource {
 public:
  ZoGradientSource(const FunctionOracle& oracle, ZoEstimatorConfig cfg, RngStream& directions);

  std::size_t size() const override { return oracle_.size(); }
  std::size_t dim() const override { return oracle_.dim(); }
  std::uint64_t component_cost() const override { return cfg_.cost(); }
  const ZoEstimatorConfig& config() const noexcept { return cfg_; }

  DenseVector component(std::size_t i, const DenseVector& theta, QueryCounters& counters) override;
  std::pair<DenseVector, DenseVector> component_pair(std::size_t i, const DenseVector& a, const DenseVector& b,
                                                     bool shared, QueryCounters& counters) override;
  DenseVector full(const DenseVector& theta, QueryCounters& counters) override;

 private:
  const FunctionOracle& oracle_;
  ZoEstimatorConfig cfg_;
  RngStream& rng_;
};

/// Exact component gradients; charges no IZO.
class ExactGradientSource final : public GradientSource {
 public:
  explicit ExactGradientSource(const FunctionOracle& oracle);

  std::size_t size() const override { return oracle_.size(); }
  std::size_t dim() const override { return oracle_.dim(); }
  std::uint64_t component_cost() const override { return 0; }

  DenseVector component(std::size_t i, const DenseVector& theta, QueryCounters& counters) override;
  std::pair<DenseVector, DenseVector> component_pair(std::size_t i, const DenseVector& a, const DenseVector& b,
                                                     bool shared, QueryCounters& counters) override;

 private:
  const FunctionOracle& oracle_;
};

// ---------------------------------------------------------------------------
// p-Memorization table
// ---------------------------------------------------------------------------

/// Distribution of the refreshed index set J. Both give every index the
/// marginal refresh probability p/n.
enum class UpdateLaw {
  PSaga,        // J uniform over the size-p subsets of [n]
  SvrgVariant,  // J = [n] with probability p/n, empty otherwise
};

std::string_view to_string(UpdateLaw law);
UpdateLaw parse_update_law(std::string_view name);

class GradientMemory {
 public:
  GradientMemory(UpdateLaw law, std::size_t p);

  /// Fills every entry with a fresh estimate at theta (one full pass).
  void initialize(GradientSource& source, const DenseVector& theta, QueryCounters& counters);
  bool initialized() const noexcept { return !table_.empty(); }

  std::vector<std::size_t> draw_update_set(RngStream& rng) const;
  /// Replaces the entries in J by fresh estimates at theta.
  void apply_update(std::span<const std::size_t> J, GradientSource& source, const DenseVector& theta,
                    QueryCounters& counters);

  std::size_t size() const noexcept { return table_.size(); }
  std::size_t p() const noexcept { return p_; }
  UpdateLaw law() const noexcept { return law_; }
  const DenseVector& entry(std::size_t j) const { return table_.at(j); }
  /// Incrementally maintained (1/n) sum_j entry(j).
  const DenseVector& mean() const noexcept { return mean_; }
  /// Mean recomputed from the table, for drift checks.
  DenseVector recomputed_mean() const;

 private:
  void resync();

  UpdateLaw law_;
  std::size_t p_;
  std::vector<DenseVector> table_;
  DenseVector mean_;
  std::size_t updates_since_sync_ = 0;
};

/// Draws J from the memory's law and refreshes those entries at theta.
/// izo += |J| (q + 1). Returns |J|.
std::size_t memory_update(GradientMemory& mem, const DenseVector& theta, GradientSource& source, RngStream& rng,
                          QueryCounters& counters);

/// grad_i(theta) - a_i + mean(a).
DenseVector pm_gradient(const GradientMemory& mem, const DenseVector& theta, std::size_t i,
                        GradientSource& source, QueryCounters& counters);

// ---------------------------------------------------------------------------
// SVRG snapshot
// ---------------------------------------------------------------------------

struct SvrgSnapshot {
  DenseVector anchor;
  DenseVector anchor_full_grad;
  std::size_t age = 0;
};

/// Full estimate at theta; izo += n (q + 1).
SvrgSnapshot refresh_snapshot(GradientSource& source, const DenseVector& theta, QueryCounters& counters);

/// grad_i(theta) - grad_i(anchor) + full_grad(anchor); izo += 2 (q + 1).
/// Increments snap.age.
DenseVector svrg_gradient(SvrgSnapshot& snap, const DenseVector& theta, std::size_t i, GradientSource& source,
                          bool shared_directions, QueryCounters& counters);

// ---------------------------------------------------------------------------
// SARAH recursion
// ---------------------------------------------------------------------------

struct SarahState {
  DenseVector g_prev;
  DenseVector theta_prev;
};

struct SarahStep {
  DenseVector gradient;
  SarahState next;
};

/// g = grad_i(theta) - grad_i(theta_prev) + g_prev; izo += 2 (q + 1).
SarahStep sarah_step(const SarahState& state, const DenseVector& theta, std::size_t i, GradientSource& source,
                     bool shared_directions, QueryCounters& counters);

}  // namespace zoht
