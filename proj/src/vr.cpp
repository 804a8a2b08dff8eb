#include "zoht/vr.hpp"

namespace zoht {

DenseVector GradientSource::full(const DenseVector& theta, QueryCounters& counters) {
  DenseVector g(dim());
  for (std::size_t i = 0; i < size(); ++i) g += component(i, theta, counters);
  g *= 1.0 / static_cast<double>(size());
  return g;
}

// ---------------------------------------------------------------------------

ZoGradientSource::ZoGradientSource(const FunctionOracle& oracle, ZoEstimatorConfig cfg, RngStream& directions)
    : oracle_(oracle), cfg_(cfg), rng_(directions) {
  cfg_.validate();
  if (cfg_.d != oracle_.dim()) throw DimensionError("ZoGradientSource: config dimension differs from oracle");
}

DenseVector ZoGradientSource::component(std::size_t i, const DenseVector& theta, QueryCounters& counters) {
  return zo_gradient(oracle_, i, theta, cfg_, rng_, counters).gradient;
}

std::pair<DenseVector, DenseVector> ZoGradientSource::component_pair(std::size_t i, const DenseVector& a,
                                                                     const DenseVector& b, bool shared,
                                                                     QueryCounters& counters) {
  if (!shared) {
    DenseVector ga = component(i, a, counters);
    DenseVector gb = component(i, b, counters);
    return {std::move(ga), std::move(gb)};
  }
  const std::vector<DenseVector> dirs = sample_directions(cfg_, rng_);
  DenseVector ga = zo_gradient_with_directions(oracle_, i, a, cfg_, dirs, counters).gradient;
  DenseVector gb = zo_gradient_with_directions(oracle_, i, b, cfg_, dirs, counters).gradient;
  return {std::move(ga), std::move(gb)};
}

DenseVector ZoGradientSource::full(const DenseVector& theta, QueryCounters& counters) {
  return zo_full_gradient(oracle_, theta, cfg_, rng_, counters).gradient;
}

// ---------------------------------------------------------------------------

ExactGradientSource::ExactGradientSource(const FunctionOracle& oracle) : oracle_(oracle) {
  if (!oracle_.has_exact_gradient()) throw UnsupportedError("ExactGradientSource: oracle has no exact gradient");
}

DenseVector ExactGradientSource::component(std::size_t i, const DenseVector& theta, QueryCounters&) {
  return oracle_.exact_component_gradient(i, theta);
}

std::pair<DenseVector, DenseVector> ExactGradientSource::component_pair(std::size_t i, const DenseVector& a,
                                                                        const DenseVector& b, bool,
                                                                        QueryCounters&) {
  return {oracle_.exact_component_gradient(i, a), oracle_.exact_component_gradient(i, b)};
}

// ---------------------------------------------------------------------------

std::string_view to_string(UpdateLaw law) {
  switch (law) {
    case UpdateLaw::PSaga:
      return "p-saga";
    case UpdateLaw::SvrgVariant:
      return "svrg-variant";
  }
  return "unknown";
}

UpdateLaw parse_update_law(std::string_view name) {
  if (name == "p-saga" || name == "saga") return UpdateLaw::PSaga;
  if (name == "svrg-variant") return UpdateLaw::SvrgVariant;
  throw DomainError("unknown update law '" + std::string(name) + "'");
}

GradientMemory::GradientMemory(UpdateLaw law, std::size_t p) : law_(law), p_(p) {
  if (p_ < 1) throw DomainError("GradientMemory: p must be at least 1");
}

void GradientMemory::initialize(GradientSource& source, const DenseVector& theta, QueryCounters& counters) {
  if (p_ > source.size()) throw DomainError("GradientMemory: p exceeds the number of components");
  table_.clear();
  table_.reserve(source.size());
  for (std::size_t j = 0; j < source.size(); ++j) table_.push_back(source.component(j, theta, counters));
  resync();
}

std::vector<std::size_t> GradientMemory::draw_update_set(RngStream& rng) const {
  const std::size_t n = table_.size();
  switch (law_) {
    case UpdateLaw::PSaga:
      return rng.subset(n, p_);
    case UpdateLaw::SvrgVariant: {
      const bool fire = rng.uniform() < static_cast<double>(p_) / static_cast<double>(n);
      if (!fire) return {};
      std::vector<std::size_t> all(n);
      for (std::size_t j = 0; j < n; ++j) all[j] = j;
      return all;
    }
  }
  return {};
}

void GradientMemory::apply_update(std::span<const std::size_t> J, GradientSource& source, const DenseVector& theta,
                                  QueryCounters& counters) {
  if (!initialized()) throw PreconditionError("GradientMemory used before initialize()");
  const double inv_n = 1.0 / static_cast<double>(table_.size());
  for (std::size_t j : J) {
    DenseVector fresh = source.component(j, theta, counters);
    mean_.axpy(inv_n, fresh);
    mean_.axpy(-inv_n, table_.at(j));
    table_[j] = std::move(fresh);
  }
  updates_since_sync_ += J.size();
  if (updates_since_sync_ >= table_.size()) resync();
}

DenseVector GradientMemory::recomputed_mean() const {
  DenseVector m(table_.empty() ? 0 : table_.front().dim());
  for (const DenseVector& a : table_) m += a;
  if (!table_.empty()) m *= 1.0 / static_cast<double>(table_.size());
  return m;
}

void GradientMemory::resync() {
  mean_ = recomputed_mean();
  updates_since_sync_ = 0;
}

std::size_t memory_update(GradientMemory& mem, const DenseVector& theta, GradientSource& source, RngStream& rng,
                          QueryCounters& counters) {
  const std::vector<std::size_t> J = mem.draw_update_set(rng);
  mem.apply_update(J, source, theta, counters);
  return J.size();
}

DenseVector pm_gradient(const GradientMemory& mem, const DenseVector& theta, std::size_t i,
                        GradientSource& source, QueryCounters& counters) {
  DenseVector g = source.component(i, theta, counters);
  g -= mem.entry(i);
  g += mem.mean();
  return g;
}

// ---------------------------------------------------------------------------

SvrgSnapshot refresh_snapshot(GradientSource& source, const DenseVector& theta, QueryCounters& counters) {
  return {theta, source.full(theta, counters), 0};
}

DenseVector svrg_gradient(SvrgSnapshot& snap, const DenseVector& theta, std::size_t i, GradientSource& source,
                          bool shared_directions, QueryCounters& counters) {
  auto [at_theta, at_anchor] = source.component_pair(i, theta, snap.anchor, shared_directions, counters);
  at_theta -= at_anchor;
  at_theta += snap.anchor_full_grad;
  ++snap.age;
  return at_theta;
}

SarahStep sarah_step(const SarahState& state, const DenseVector& theta, std::size_t i, GradientSource& source,
                     bool shared_directions, QueryCounters& counters) {
  auto [at_theta, at_prev] = source.component_pair(i, theta, state.theta_prev, shared_directions, counters);
  at_theta -= at_prev;
  at_theta += state.g_prev;
  return {at_theta, SarahState{at_theta, theta}};
}

}  // namespace zoht
