#include "zoht/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zoht/ht.hpp"

namespace zoht::theory {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dbl(std::size_t v) { return static_cast<double>(v); }

/// Fills discriminant and roots of a x^2 + b x + c (a > 0).
EtaInterval quadratic(double a, double b, double c) {
  EtaInterval out;
  out.a = a;
  out.b = b;
  out.c = c;
  out.discriminant = b * b - 4.0 * a * c;
  if (out.discriminant >= 0.0) {
    const double r = std::sqrt(out.discriminant);
    out.root_lo = (-b - r) / (2.0 * a);
    out.root_hi = (-b + r) / (2.0 * a);
  } else {
    out.root_lo = kNaN;
    out.root_hi = kNaN;
  }
  return out;
}

}  // namespace

void TheoryParams::validate() const {
  if (k <= kstar) throw DomainError("theory: k must exceed k*");
  if (s2 < 1 || s2 > d) throw DomainError("theory: s2 must lie in [1, d]");
  if (!(rho_minus > 0.0)) throw DomainError("theory: rho_minus must be positive");
  if (rho_plus < rho_minus) throw DomainError("theory: rho_plus must be at least rho_minus");
  if (q < 1 || n < 1) throw DomainError("theory: q and n must be positive");
  if (!(mu >= 0.0)) throw DomainError("theory: mu must be non-negative");
  if (p && (*p < 1 || *p > n)) throw DomainError("theory: p must lie in [1, n]");
}

double alpha(std::size_t k, std::size_t kstar) {
  if (k <= kstar) throw DomainError("alpha: requires k > k*");
  return 1.0 + 2.0 * std::sqrt(dbl(kstar)) / std::sqrt(dbl(k - kstar));
}

EpsilonConstants epsilon_constants(const TheoryParams& tp) {
  if (tp.d < 2) throw DomainError("epsilon_constants: d must be at least 2");
  if (tp.s2 < 1 || tp.s2 > tp.d) throw DomainError("epsilon_constants: s2 must lie in [1, d]");
  if (tp.q < 1) throw DomainError("epsilon_constants: q must be positive");
  const double d = dbl(tp.d);
  const double s = dbl(tp.s());
  const double s2 = dbl(tp.s2);
  const double q = dbl(tp.q);
  const double rp2 = tp.rho_plus * tp.rho_plus;
  const double lead = 2.0 * d / (q * (s2 + 2.0));

  EpsilonConstants e;
  e.eps_mu = rp2 * s * d;
  e.eps_I = lead * ((s - 1.0) * (s2 - 1.0) / (d - 1.0) + 3.0) + 2.0;
  e.eps_Ic = lead * (s * (s2 - 1.0) / (d - 1.0));
  e.eps_abs = (2.0 * d * rp2 * s * s2 / q) * ((s - 1.0) * (s2 - 1.0) / (d - 1.0) + 1.0) + rp2 * s * d;
  return e;
}

double szoht_k_lower(std::size_t kstar, double eps_I, double kappa) {
  const double g = 4.0 * eps_I + 1.0;
  return dbl(kstar) * g * g * std::pow(kappa, 4) * (1.0 - 1.0 / (kappa * kappa * g));
}

SzohtConditions szoht_conditions(const TheoryParams& tp) {
  const EpsilonConstants e = epsilon_constants(tp);
  const double kappa = tp.kappa();
  const double k2 = kappa * kappa;
  const double d = dbl(tp.d);
  const double ks = dbl(tp.kstar);
  const double s2 = dbl(tp.s2);

  SzohtConditions c;
  c.k_lower = szoht_k_lower(tp.kstar, e.eps_I, kappa);
  c.k_upper = (d - ks) / 2.0;
  if (tp.s2 > 1) {
    const double inner = 9.0 * k2 * (9.0 * k2 - 1.0) + 0.5 - 1.0 / (2.0 * ks) + 1.5 * (d - 1.0) / (ks * (s2 - 1.0));
    c.q_lower = 16.0 * d * (s2 - 1.0) * ks * k2 / ((s2 + 2.0) * (d - 1.0)) *
                (18.0 * k2 - 1.0 + 2.0 * std::sqrt(inner));
  } else {
    c.q_lower = 8.0 * k2 * d / std::sqrt(d / ks + 1.0);
  }
  return c;
}

EtaInterval pm_eta_interval(const TheoryParams& tp, double eps_I) {
  const double a = alpha(tp.k, tp.kstar);
  const double p = dbl(tp.p.value_or(1));
  const double L = 48.0 * eps_I * a * tp.rho_plus + tp.rho_minus;
  EtaInterval out = quadratic(L, -2.0 * a, 1.0 - p / dbl(tp.n) + 2.0 / tp.rho_minus);
  out.nonempty = out.discriminant > 0.0;
  if (out.nonempty) {
    out.lo = out.root_lo;
    out.hi = std::max(out.root_hi, 1.0 / (48.0 * eps_I * tp.rho_plus));
  } else {
    out.lo = kNaN;
    out.hi = kNaN;
  }
  return out;
}

VrEta vrszht_eta_interval(const TheoryParams& tp, double eps_I) {
  const double a = alpha(tp.k, tp.kstar);
  const double rm = tp.rho_minus;
  const double lead = 48.0 * eps_I * a * rm * tp.rho_plus + rm * rm;
  VrEta out;
  out.interval = quadratic(lead, -a * rm, a - 1.0);
  out.recommended = a * rm / (2.0 * lead);
  EtaInterval& iv = out.interval;
  if (iv.discriminant >= 0.0) {
    iv.lo = iv.root_lo;
    iv.hi = std::min(iv.root_hi, 1.0 / (48.0 * eps_I * tp.rho_plus));
    iv.nonempty = iv.lo <= iv.hi;
  } else {
    iv.lo = kNaN;
    iv.hi = kNaN;
    iv.nonempty = false;
  }
  return out;
}

EtaInterval sarah_eta_interval(const TheoryParams& tp, double eps_I) {
  const double a = alpha(tp.k, tp.kstar);
  const double lead = 48.0 * eps_I * a * tp.rho_plus + a * tp.rho_minus;
  EtaInterval out = quadratic(lead, -a, a - 1.0);
  out.nonempty = out.discriminant >= 0.0;
  out.lo = out.nonempty ? out.root_lo : kNaN;
  out.hi = out.nonempty ? out.root_hi : kNaN;
  return out;
}

Complexity complexity_estimate(const TheoryParams& tp, double target_eps) {
  if (!(target_eps > 0.0) || target_eps > 1.0) throw DomainError("complexity_estimate: eps must lie in (0, 1]");
  const double kappa = tp.kappa();
  const double log_factor = std::log(1.0 / target_eps);
  Complexity c;
  c.zo_queries = (dbl(tp.n) + kappa * kappa * kappa / (kappa * kappa + 1.0)) * log_factor;
  c.ht_ops = log_factor;
  return c;
}

// ---------------------------------------------------------------------------

double SystemErrorReport::sum(const std::vector<Term>& terms, TermKind kind) const {
  double s = 0.0;
  for (const Term& t : terms) {
    if (t.kind == kind) s += t.value;
  }
  return s;
}

double SystemErrorReport::pm_L_r() const {
  double s = 0.0;
  for (const Term& t : pm_terms) {
    if (t.label.starts_with("L_r.")) s += t.value;
  }
  return s;
}

double SystemErrorReport::pm_L_mu() const {
  double s = 0.0;
  for (const Term& t : pm_terms) {
    if (t.label.starts_with("L_mu.")) s += t.value;
  }
  return s;
}

SystemErrorReport system_error_terms(const FunctionOracle& oracle, const TheoryParams& tp, const DenseVector& theta,
                                     double eta, const std::optional<DenseVector>& target) {
  tp.validate();
  if (!oracle.has_exact_gradient()) throw UnsupportedError("system_error_terms: oracle has no exact gradient");
  const std::optional<DenseVector> opt = target ? target : oracle.known_minimizer();
  if (!opt) throw UnsupportedError("system_error_terms: no known minimizer");
  const DenseVector& theta_star = *opt;
  require_same_dim(theta, theta_star);

  const std::size_t n = oracle.size();
  const EpsilonConstants e = epsilon_constants(tp);
  const double a = alpha(tp.k, tp.kstar);
  const double rm = tp.rho_minus;
  const double rp = tp.rho_plus;
  const double mu2 = tp.mu * tp.mu;
  const double s = dbl(tp.s());
  const double p = dbl(tp.p.value_or(1));
  const double nn = dbl(n);

  const DenseVector grad_star = oracle.exact_mean_gradient(theta_star);
  const SupportSet I = theta.support()
                           .united(theta_star.support())
                           .united(hard_threshold(grad_star, std::min(2 * tp.k, theta.dim())).kept);
  std::vector<std::size_t> complement;
  for (std::size_t j = 0; j < theta.dim(); ++j) {
    if (!I.contains(j)) complement.push_back(j);
  }
  const SupportSet Ic(theta.dim(), std::move(complement));

  double comp_star_inf_sq = 0.0;  // mean_i ||grad f_i(theta*)||_inf^2
  double memory_grad = 0.0;       // mean_i (eps_I + 1)||grad_I f_i||^2 + eps_Ic ||grad_Ic f_i||^2
  for (std::size_t i = 0; i < n; ++i) {
    const double g_inf = oracle.exact_component_gradient(i, theta_star).norm_inf();
    comp_star_inf_sq += g_inf * g_inf;
    const DenseVector gi = oracle.exact_component_gradient(i, theta);
    memory_grad += (e.eps_I + 1.0) * gi.restrict_to(I).squared_norm() + e.eps_Ic * gi.restrict_to(Ic).squared_norm();
  }
  comp_star_inf_sq /= nn;
  memory_grad /= nn;

  const double dist = (theta - theta_star).norm2();
  const double opt_inf = grad_star.norm_inf();
  const double spread = (4.0 * e.eps_I * s + 2.0) + e.eps_Ic * dbl(tp.d - tp.k);
  const double eta2 = eta * eta;

  SystemErrorReport r;
  r.beta = (1.0 + eta2 * rm * rm) * a;
  r.gamma = 2.0 * r.beta / rm + 48.0 * eta2 * a * rp * e.eps_I - 2.0 * eta * a + 1.0 - p / nn;

  // stationary memory term: sum_u (1 - p/n)^(r-u-1) / n -> 1/p
  const double A_grad = 2.0 / p * memory_grad;
  const double A_mu = 2.0 / p * e.eps_abs * mu2;
  r.pm_terms = {
      {"L_mu.smoothing_bias", a * nn * nn * e.eps_mu * mu2 / (rm * rm), TermKind::Smoothing},
      {"L_mu.estimator_abs", 6.0 * a * e.eps_abs * mu2, TermKind::Smoothing},
      {"L_mu.memory_smoothing", 6.0 * eta2 * a * A_mu, TermKind::Smoothing},
      {"L_mu.memory_gradient", 6.0 * eta2 * a * A_grad, TermKind::Other},
      {"L_r.opt_gradient_distance", std::sqrt(s) * opt_inf * dist, TermKind::OptimumGradient},
      {"L_r.component_opt_gradient", eta2 * 3.0 * a * spread * comp_star_inf_sq, TermKind::OptimumGradient},
  };

  if (tp.m) {
    const double m = dbl(*tp.m);
    const double bm = std::pow(r.beta, m);
    const double geo = (r.beta == 1.0) ? m : (bm - 1.0) / (r.beta - 1.0);
    r.delta = geo * (2.0 * eta - 48.0 * e.eps_I * eta2 * rp) * a;
    r.gamma_prime = 2.0 * bm / rm + 48.0 * eta2 * rp * e.eps_I * a * geo;
    const double restricted_opt = grad_star.restrict_to(I).squared_norm();
    r.vr_terms = {
        {"L'_mu.opt_gradient_distance", 2.0 * bm / rm * std::sqrt(s) * opt_inf * dist, TermKind::OptimumGradient},
        {"L'_mu.component_opt_gradient", 6.0 * eta2 * geo * a * spread * comp_star_inf_sq,
         TermKind::OptimumGradient},
        {"L'_mu.restricted_opt_gradient", 6.0 * eta2 * geo * a * 3.0 * restricted_opt, TermKind::OptimumGradient},
        {"L'.estimator_abs", geo * a * 72.0 * eta2 * e.eps_abs * mu2, TermKind::Smoothing},
        {"L'.smoothing_bias", geo * a * nn * nn * e.eps_mu * mu2 / (rm * rm), TermKind::Smoothing},
    };
  }
  return r;
}

}  // namespace zoht::theory
