#include "zoht/solvers.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "zoht/ht.hpp"

namespace zoht {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Fgzoht:
      return "fgzoht";
    case Algorithm::Szoht:
      return "szoht";
    case Algorithm::PmSzht:
      return "pm-szht";
    case Algorithm::VrSzht:
      return "vr-szht";
    case Algorithm::SarahSzht:
      return "sarah-szht";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "fgzoht") return Algorithm::Fgzoht;
  if (name == "szoht") return Algorithm::Szoht;
  if (name == "pm-szht") return Algorithm::PmSzht;
  if (name == "vr-szht") return Algorithm::VrSzht;
  if (name == "sarah-szht") return Algorithm::SarahSzht;
  throw DomainError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(AnchorPolicy a) {
  return a == AnchorPolicy::LastIterate ? "last-iterate" : "random-inner";
}

void SolverConfig::validate(const FunctionOracle& oracle) const {
  const std::size_t d = oracle.dim();
  const std::size_t n = oracle.size();
  if (zo.d != d) throw DomainError("solver: zo.d differs from the oracle dimension");
  zo.validate();
  if (k > d) throw DomainError("solver: k exceeds the dimension");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("solver: eta must be a finite non-negative number");
  if ((algorithm == Algorithm::VrSzht || algorithm == Algorithm::SarahSzht) && m < 1) {
    throw DomainError("solver: m must be at least 1");
  }
  if (algorithm == Algorithm::PmSzht && (p < 1 || p > n)) throw DomainError("solver: p must lie in [1, n]");
  if (record_every < 1) throw DomainError("solver: record_every must be at least 1");
  if (izo_budget < n * zo.cost()) throw DomainError("solver: izo_budget must be at least n (q + 1)");
  if (theta0 && theta0->dim() != d) throw DomainError("solver: theta0 has the wrong dimension");
}

namespace {

/// Shared bookkeeping of one run: iterate, counters, budget, trace, guard.
class Run {
 public:
  Run(const FunctionOracle& oracle, const SolverConfig& cfg, std::uint64_t step_cost_hint)
      : oracle_(oracle), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    cfg_.validate(oracle_);
    if (step_cost_hint == 0 && cfg_.max_iterations == 0) {
      throw DomainError("solver: a gradient source without IZO cost needs max_iterations");
    }
    theta_ = cfg_.theta0.value_or(DenseVector(oracle_.dim()));
    trace_.config = cfg_;
    trace_.initial_fval = oracle_.mean_value(theta_);
    guard_ = 1e12 * (1.0 + std::abs(trace_.initial_fval));
  }

  const DenseVector& theta() const noexcept { return theta_; }
  QueryCounters& counters() noexcept { return counters_; }
  bool stopped() const noexcept { return stopped_; }

  /// True when an estimate costing `cost` IZO may start.
  bool fits(std::uint64_t cost) const {
    if (stopped_) return false;
    if (cfg_.max_iterations > 0 && trace_.iterations >= cfg_.max_iterations) return false;
    return counters_.izo + cost <= cfg_.izo_budget;
  }

  /// theta <- H_k(theta - eta g), or without thresholding when `raw`.
  void step(const DenseVector& g, bool raw = false) {
    DenseVector next = theta_;
    next.axpy(-cfg_.eta, g);
    theta_ = raw ? std::move(next) : hard_threshold(next, cfg_.k, counters_).vector;
    ++trace_.iterations;
    const double f = oracle_.mean_value(theta_);
    if (!std::isfinite(f) || f > guard_) {
      std::ostringstream os;
      os << "divergence after " << trace_.iterations << " steps at izo=" << counters_.izo << ": F=" << f
         << " exceeds guard " << guard_;
      diverge(os.str());
      if (std::isfinite(f)) push_row(f);
      return;
    }
    if (trace_.iterations % cfg_.record_every == 0) push_row(f);
    last_f_ = f;
  }

  /// Replaces the iterate by the epoch output and makes the trace row at the
  /// current izo describe it.
  void set_epoch_output(DenseVector theta) {
    theta_ = std::move(theta);
    const double f = oracle_.mean_value(theta_);
    last_f_ = f;
    if (!trace_.rows.empty() && same_position(trace_.rows.back())) {
      trace_.rows.back().fval = f;
      trace_.rows.back().nnz = theta_.nnz();
    } else {
      push_row(f);
    }
  }

  void diverge(std::string report) {
    stopped_ = true;
    trace_.diverged = true;
    trace_.divergence_report = std::move(report);
  }

  RunTrace& trace() noexcept { return trace_; }

  RunTrace finish() {
    if (trace_.iterations > 0 && (trace_.rows.empty() || !same_position(trace_.rows.back()))) {
      push_row(last_f_.value_or(oracle_.mean_value(theta_)));
    }
    trace_.final_theta = theta_;
    trace_.counters = counters_;
    trace_.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(trace_);
  }

 private:
  // rows are keyed by (izo, nht); zero-cost sources advance only nht
  bool same_position(const TraceRow& row) const noexcept {
    return row.izo == counters_.izo && row.nht == counters_.nht;
  }

  void push_row(double f) {
    if (!trace_.rows.empty() && same_position(trace_.rows.back())) {
      trace_.rows.back() = {counters_.izo, counters_.nht, f, theta_.nnz()};
      return;
    }
    trace_.rows.push_back({counters_.izo, counters_.nht, f, theta_.nnz()});
  }

  const FunctionOracle& oracle_;
  SolverConfig cfg_;
  std::chrono::steady_clock::time_point start_;
  DenseVector theta_;
  QueryCounters counters_;
  RunTrace trace_;
  double guard_ = 0.0;
  bool stopped_ = false;
  std::optional<double> last_f_;
};

template <class Body>
RunTrace guarded(Run& run, Body&& body) {
  try {
    body();
  } catch (const NumericError& e) {
    run.diverge(std::string("numeric failure: ") + e.what());
  }
  return run.finish();
}

RunTrace szoht_impl(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  Run run(oracle, cfg, source.component_cost());
  RngStream indices(cfg.seed, streams::kIndices);
  const std::uint64_t cost = source.component_cost();
  return guarded(run, [&] {
    while (run.fits(cost)) {
      const std::size_t i = indices.uniform_index(oracle.size());
      run.step(source.component(i, run.theta(), run.counters()));
    }
  });
}

RunTrace fgzoht_impl(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  Run run(oracle, cfg, source.component_cost());
  const std::uint64_t cost = oracle.size() * source.component_cost();
  return guarded(run, [&] {
    while (run.fits(cost)) run.step(source.full(run.theta(), run.counters()));
  });
}

RunTrace pm_impl(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  Run run(oracle, cfg, source.component_cost());
  RngStream indices(cfg.seed, streams::kIndices);
  RngStream sets(cfg.seed, streams::kMemorySets);
  const std::uint64_t unit = source.component_cost();
  GradientMemory memory(cfg.law, cfg.p);
  return guarded(run, [&] {
    memory.initialize(source, run.theta(), run.counters());
    while (!run.stopped()) {
      const std::vector<std::size_t> J = memory.draw_update_set(sets);
      if (!run.fits((J.size() + 1) * unit)) break;
      memory.apply_update(J, source, run.theta(), run.counters());
      run.trace().refreshed_entries += J.size();
      const std::size_t i = indices.uniform_index(oracle.size());
      run.step(pm_gradient(memory, run.theta(), i, source, run.counters()));
    }
  });
}

RunTrace vr_impl(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  Run run(oracle, cfg, source.component_cost());
  RngStream indices(cfg.seed, streams::kIndices);
  const std::uint64_t unit = source.component_cost();
  const std::uint64_t refresh_cost = oracle.size() * unit;
  return guarded(run, [&] {
    while (run.fits(refresh_cost + 2 * unit)) {
      SvrgSnapshot snap = refresh_snapshot(source, run.theta(), run.counters());
      run.trace().last_anchor = snap.anchor;
      ++run.trace().epochs;
      std::vector<DenseVector> inner;
      for (std::size_t t = 0; t < cfg.m && run.fits(2 * unit); ++t) {
        const std::size_t i = indices.uniform_index(oracle.size());
        run.step(svrg_gradient(snap, run.theta(), i, source, cfg.shared_directions, run.counters()));
        if (cfg.anchor == AnchorPolicy::RandomInner) inner.push_back(run.theta());
      }
      if (cfg.anchor == AnchorPolicy::RandomInner && !inner.empty() && !run.stopped()) {
        const std::size_t pick = indices.uniform_index(inner.size());
        run.set_epoch_output(std::move(inner[pick]));
      }
    }
  });
}

RunTrace sarah_impl(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  Run run(oracle, cfg, source.component_cost());
  RngStream indices(cfg.seed, streams::kIndices);
  const std::uint64_t unit = source.component_cost();
  const std::uint64_t full_cost = oracle.size() * unit;
  return guarded(run, [&] {
    while (run.fits(full_cost)) {
      ++run.trace().epochs;
      std::vector<DenseVector> iterates{run.theta()};
      run.trace().last_anchor = run.theta();
      SarahState state{source.full(run.theta(), run.counters()), run.theta()};
      run.step(state.g_prev, cfg.sarah_first_step_raw);
      iterates.push_back(run.theta());
      for (std::size_t t = 1; t < cfg.m && run.fits(2 * unit); ++t) {
        const std::size_t i = indices.uniform_index(oracle.size());
        SarahStep s = sarah_step(state, run.theta(), i, source, cfg.shared_directions, run.counters());
        state = std::move(s.next);
        run.step(s.gradient);
        iterates.push_back(run.theta());
      }
      if (run.stopped()) break;
      // output index drawn uniformly from {0, ..., number of inner iterates}
      const std::size_t pick = indices.uniform_index(iterates.size());
      run.set_epoch_output(std::move(iterates[pick]));
    }
  });
}

RunTrace dispatch(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Fgzoht:
      return fgzoht_impl(oracle, source, cfg);
    case Algorithm::Szoht:
      return szoht_impl(oracle, source, cfg);
    case Algorithm::PmSzht:
      return pm_impl(oracle, source, cfg);
    case Algorithm::VrSzht:
      return vr_impl(oracle, source, cfg);
    case Algorithm::SarahSzht:
      return sarah_impl(oracle, source, cfg);
  }
  throw DomainError("unknown algorithm");
}

RunTrace run_with_zo(const FunctionOracle& oracle, const SolverConfig& cfg) {
  cfg.validate(oracle);
  RngStream directions(cfg.seed, streams::kDirections);
  ZoGradientSource source(oracle, cfg.zo, directions);
  return dispatch(oracle, source, cfg);
}

RunTrace run_checked(const FunctionOracle& oracle, SolverConfig cfg, Algorithm expected) {
  if (cfg.algorithm != expected) {
    throw DomainError("solver entry point for " + std::string(to_string(expected)) + " called with algorithm " +
                      std::string(to_string(cfg.algorithm)));
  }
  return run_with_zo(oracle, cfg);
}

}  // namespace

RunTrace run_solver(const FunctionOracle& oracle, const SolverConfig& cfg) { return run_with_zo(oracle, cfg); }

RunTrace run_solver(const FunctionOracle& oracle, GradientSource& source, const SolverConfig& cfg) {
  return dispatch(oracle, source, cfg);
}

RunTrace run_szoht(const FunctionOracle& oracle, const SolverConfig& cfg) {
  return run_checked(oracle, cfg, Algorithm::Szoht);
}
RunTrace run_fgzoht(const FunctionOracle& oracle, const SolverConfig& cfg) {
  return run_checked(oracle, cfg, Algorithm::Fgzoht);
}
RunTrace run_pm_szht(const FunctionOracle& oracle, const SolverConfig& cfg) {
  return run_checked(oracle, cfg, Algorithm::PmSzht);
}
RunTrace run_vr_szht(const FunctionOracle& oracle, const SolverConfig& cfg) {
  return run_checked(oracle, cfg, Algorithm::VrSzht);
}
RunTrace run_sarah_szht(const FunctionOracle& oracle, const SolverConfig& cfg) {
  return run_checked(oracle, cfg, Algorithm::SarahSzht);
}

// ---------------------------------------------------------------------------

GradientDecomposition gradient_squared_decomposition(const FunctionOracle& oracle, const DenseVector& theta,
                                                     const ProbeConfig& cfg, std::size_t samples,
                                                     std::uint64_t seed) {
  if (samples < 100) throw DomainError("gradient_squared_decomposition: at least 100 samples required");
  RngStream directions(seed, streams::kDirections);
  RngStream indices(seed, streams::kIndices);
  std::unique_ptr<GradientSource> source;
  if (cfg.exact) {
    source = std::make_unique<ExactGradientSource>(oracle);
  } else {
    source = std::make_unique<ZoGradientSource>(oracle, cfg.zo, directions);
  }
  QueryCounters counters;
  const DenseVector anchor = cfg.anchor.value_or(theta);
  const std::size_t n = oracle.size();

  std::optional<GradientMemory> memory;
  std::optional<SvrgSnapshot> snap;
  std::optional<SarahState> sarah;
  switch (cfg.estimator) {
    case Algorithm::PmSzht:
      memory.emplace(cfg.law, cfg.p);
      memory->initialize(*source, anchor, counters);
      break;
    case Algorithm::VrSzht:
      snap = refresh_snapshot(*source, anchor, counters);
      break;
    case Algorithm::SarahSzht:
      sarah = SarahState{source->full(anchor, counters), anchor};
      break;
    default:
      break;
  }

  std::vector<DenseVector> draws;
  draws.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    switch (cfg.estimator) {
      case Algorithm::Fgzoht:
        draws.push_back(source->full(theta, counters));
        break;
      case Algorithm::Szoht:
        draws.push_back(source->component(indices.uniform_index(n), theta, counters));
        break;
      case Algorithm::PmSzht:
        draws.push_back(pm_gradient(*memory, theta, indices.uniform_index(n), *source, counters));
        break;
      case Algorithm::VrSzht: {
        SvrgSnapshot probe = *snap;
        draws.push_back(
            svrg_gradient(probe, theta, indices.uniform_index(n), *source, cfg.shared_directions, counters));
        break;
      }
      case Algorithm::SarahSzht:
        draws.push_back(
            sarah_step(*sarah, theta, indices.uniform_index(n), *source, cfg.shared_directions, counters).gradient);
        break;
    }
  }

  const double inv_n = 1.0 / static_cast<double>(samples);
  DenseVector mean(theta.dim());
  for (const DenseVector& g : draws) mean.axpy(inv_n, g);
  double var = 0.0;
  double var_sq = 0.0;
  double second = 0.0;
  for (const DenseVector& g : draws) {
    const double dev = (g - mean).squared_norm();
    var += dev;
    var_sq += dev * dev;
    second += g.squared_norm();
  }
  var *= inv_n;
  second *= inv_n;
  const double spread = std::max(0.0, var_sq * inv_n - var * var);

  GradientDecomposition out;
  out.variance = var;
  out.grad_norm_sq = mean.squared_norm();
  out.second_moment = second;
  out.variance_std_error = std::sqrt(spread * inv_n);
  out.mean = std::move(mean);
  return out;
}

}  // namespace zoht
