#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zoht/core.hpp"
#include "zoht/vr.hpp"
#include "zoht/zo.hpp"

namespace zoht {

enum class Algorithm { Fgzoht, Szoht, PmSzht, VrSzht, SarahSzht };

std::string_view to_string(Algorithm a);
/// Accepts the full names (fgzoht, szoht, pm-szht, vr-szht, sarah-szht).
Algorithm parse_algorithm(std::string_view name);

/// Point handed from one VR-SZHT epoch to the next.
enum class AnchorPolicy { LastIterate, RandomInner };

std::string_view to_string(AnchorPolicy a);

struct SolverConfig {
  Algorithm algorithm = Algorithm::Szoht;
  double eta = 0.01;
  std::size_t k = 1;
  ZoEstimatorConfig zo;
  std::size_t m = 10;  // inner-loop length (vr, sarah)
  std::size_t p = 1;   // expected refreshes per iteration (pm)
  UpdateLaw law = UpdateLaw::PSaga;
  std::uint64_t izo_budget = 0;
  std::uint64_t seed = 0;
  std::size_t record_every = 1;

  AnchorPolicy anchor = AnchorPolicy::LastIterate;
  bool sarah_first_step_raw = false;
  bool shared_directions = false;
  std::optional<DenseVector> theta0;  // zero vector when unset
  /// Extra stop rule on the number of thresholded steps; 0 means none.
  /// Required when the gradient source charges no IZO.
  std::size_t max_iterations = 0;

  /// Throws DomainError on an inconsistent configuration.
  void validate(const FunctionOracle& oracle) const;
};

struct TraceRow {
  std::uint64_t izo = 0;
  std::uint64_t nht = 0;
  double fval = 0.0;
  std::size_t nnz = 0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Measured run. Rows are taken after thresholded steps; F is measured
/// out-of-band and never charged to izo.
struct RunTrace {
  std::vector<TraceRow> rows;
  DenseVector final_theta;
  SolverConfig config;
  double initial_fval = 0.0;
  double wall_time_seconds = 0.0;

  bool diverged = false;
  std::string divergence_report;

  QueryCounters counters;
  std::size_t iterations = 0;            // thresholded steps
  std::size_t epochs = 0;                // vr / sarah outer loops
  std::uint64_t refreshed_entries = 0;   // pm: sum of |J|
  std::optional<DenseVector> last_anchor;  // vr / sarah

  double final_fval() const { return rows.empty() ? initial_fval : rows.back().fval; }
};

/// Dispatches on cfg.algorithm with the zeroth-order estimator; RNG streams
/// are derived from cfg.seed.
RunTrace run_solver(const FunctionOracle& oracle, const SolverConfig& cfg);

RunTrace run_szoht(const FunctionOracle& oracle, const SolverConfig& cfg);
RunTrace run_fgzoht(const FunctionOracle& oracle, const SolverConfig& cfg);
RunTrace run_pm_szht(const FunctionOracle& oracle, const SolverConfig& cfg);
RunTrace run_vr_szht(const FunctionOracle& oracle, const SolverConfig& cfg);
RunTrace run_sarah_szht(const FunctionOracle& oracle, const SolverConfig& cfg);

/// Same solvers over an explicit gradient source (exact-gradient stubs in
/// tests). The source draws its own randomness; index and memory-set draws
/// still come from cfg.seed.
RunTrace run_solver(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Estimator second-moment diagnostic
// ---------------------------------------------------------------------------

struct ProbeConfig {
  Algorithm estimator = Algorithm::Szoht;
  ZoEstimatorConfig zo;
  bool exact = false;  // exact component gradients instead of ZO
  bool shared_directions = false;
  /// Anchor of the SVRG snapshot, the SARAH recursion and the memory table;
  /// theta itself when unset.
  std::optional<DenseVector> anchor;
  UpdateLaw law = UpdateLaw::PSaga;
  std::size_t p = 1;
};

/// Monte Carlo split E||g||^2 = variance + ||E g||^2 (1/N normalisation, so
/// the identity holds exactly for the sample).
struct GradientDecomposition {
  double variance = 0.0;
  double grad_norm_sq = 0.0;
  double second_moment = 0.0;
  double variance_std_error = 0.0;
  DenseVector mean;
};

/// Throws DomainError when samples < 100.
GradientDecomposition gradient_squared_decomposition(const FunctionOracle& oracle, const DenseVector& theta,
                                                     const ProbeConfig& cfg, std::size_t samples,
                                                     std::uint64_t seed);

}  // namespace zoht
