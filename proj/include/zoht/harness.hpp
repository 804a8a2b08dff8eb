#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zoht/problems.hpp"
#include "zoht/solvers.hpp"

namespace zoht {

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

enum class ProblemKind { RidgeSynthetic, RidgeCsv, AttackSurrogate };

std::string_view to_string(ProblemKind k);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::RidgeSynthetic;
  std::size_t n = 10;
  std::size_t d = 5;
  double lambda = 0.5;
  std::size_t sparsity = 0;        // ridge-synthetic: 0 keeps theta* dense
  std::size_t classes = 10;        // attack-surrogate
  std::filesystem::path csv_path;  // ridge-csv
  std::string target_column;       // ridge-csv
  /// Seed of the data-gen stream. Unset: every run seed generates its own
  /// problem. Set: one problem is shared by every cell.
  std::optional<std::uint64_t> data_seed;
};

/// Builds the objective from `seed`'s data-gen stream. Throws on bad input
/// files.
std::shared_ptr<const FunctionOracle> build_problem(const ProblemSpec& spec, std::uint64_t seed);

/// A solver variant as named on the command line.
struct AlgorithmChoice {
  std::string label;  // file-name safe
  Algorithm algorithm = Algorithm::Szoht;
  UpdateLaw law = UpdateLaw::PSaga;
  std::size_t p = 1;
};

/// fgzoht, szoht, vr, saga, sarah, pm (and the long forms fgzoht, szoht,
/// vr-szht, saga-szht, sarah-szht, pm-szht). `pm` takes law and p from the
/// arguments; `saga` is pm with p-SAGA and p = 1.
AlgorithmChoice parse_algorithm_choice(std::string_view name, UpdateLaw pm_law = UpdateLaw::PSaga,
                                       std::size_t pm_p = 1);

enum class SelectRule { Final, Min };

std::string_view to_string(SelectRule r);
SelectRule parse_select_rule(std::string_view s);

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<AlgorithmChoice> algorithms;
  /// Shared solver settings; algorithm, eta and seed are overwritten per cell.
  SolverConfig base;
  std::vector<double> eta_grid;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;
  SelectRule select = SelectRule::Final;
  std::size_t threads = 1;

  /// Throws DomainError when a list is empty, an eta is not positive and
  /// finite, or labels repeat.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct Cell {
  std::string algorithm;  // AlgorithmChoice::label
  double eta = 0.0;
  std::uint64_t seed = 0;
  RunTrace trace;
  std::string error;  // non-empty when the cell threw
};

/// Mean and sample standard deviation on a common x grid.
struct AggregateCurve {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
};

struct AlgorithmSummary {
  std::string label;
  double best_eta = 0.0;
  std::map<double, double> score_by_eta;  // +inf when any seed failed or diverged
  AggregateCurve by_izo;
  AggregateCurve by_nht;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<Cell> cells;  // ordered by (algorithm, eta, seed) as listed in spec
  std::vector<AlgorithmSummary> summaries;
  std::vector<std::string> warnings;

  const Cell& cell(const std::string& algorithm, double eta, std::uint64_t seed) const;
  const AlgorithmSummary& summary(const std::string& algorithm) const;
};

/// Runs every (algorithm, eta, seed) cell on up to spec.threads workers.
/// Each cell owns its RNG streams, so the result does not depend on the
/// worker count. Does not write files.
ExperimentResult run_experiment(const ExperimentSpec& spec);
/// Same, with one externally built problem for every cell.
ExperimentResult run_experiment(const ExperimentSpec& spec, const FunctionOracle& problem);

/// Score of one trace under a selection rule.
double trace_score(const RunTrace& trace, SelectRule rule);

/// Smallest eta among those with the lowest score. Scores of equal value tie.
double select_best_eta(const std::map<double, double>& score_by_eta);

enum class Axis { Izo, Nht };

std::string_view to_string(Axis a);

/// Previous-value interpolation of each trace onto the union of their x
/// values. Before a trace's first row its initial value is used.
AggregateCurve aggregate_traces(const std::vector<const RunTrace*>& traces, Axis axis);

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string raw_csv_name(const Cell& cell);
std::string aggregate_csv_name(const std::string& algorithm);
inline constexpr const char* kMetaFileName = "meta.txt";

std::string format_trace_csv(const std::vector<TraceRow>& rows);
std::string format_aggregate_csv(const AggregateCurve& curve);
std::string format_meta(const ExperimentResult& result);

/// Writes every raw trace, one aggregate per algorithm and the meta file.
/// Returns the written paths. Throws Error naming the path on I/O failure.
std::vector<std::filesystem::path> emit_csv(const ExperimentResult& result, const std::filesystem::path& dir);

/// Inverse of format_trace_csv. Throws ParseError on malformed input.
std::vector<TraceRow> parse_trace_csv(const std::string& text);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

struct SvgChart {
  std::string document;
  double x_min = 0.0;
  double x_max = 0.0;
  bool floored = false;  // some value was raised to the log-scale floor
};

inline constexpr double kLogFloor = 1e-16;

/// Static SVG 1.1 line chart of every algorithm's mean curve with a +-1 std
/// band, log-scaled y.
SvgChart render_svg(const ExperimentResult& result, Axis axis);
std::filesystem::path emit_svg(const ExperimentResult& result, Axis axis, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// List parsing for the command line
// ---------------------------------------------------------------------------

std::vector<double> parse_double_list(std::string_view text);
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<std::string> split_list(std::string_view text);

}  // namespace zoht
