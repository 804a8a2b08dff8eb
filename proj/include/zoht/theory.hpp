#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zoht/core.hpp"

/// Closed-form constants and step-size conditions from the convergence
/// analysis of zeroth-order hard-thresholding.
namespace zoht::theory {

struct TheoryParams {
  std::size_t d = 2;
  std::size_t n = 1;
  std::size_t q = 1;
  std::size_t s2 = 1;
  std::size_t k = 1;
  std::size_t kstar = 0;
  std::optional<std::size_t> p;
  std::optional<std::size_t> m;
  double rho_minus = 1.0;  // restricted strong convexity constant
  double rho_plus = 1.0;   // restricted strong smoothness constant
  double mu = 1e-4;

  /// Sparsity level of the restricted constants, 2k + k*.
  std::size_t s() const noexcept { return 2 * k + kstar; }
  double kappa() const noexcept { return rho_plus / rho_minus; }
  /// Throws DomainError unless k > k*, s2 <= d and rho_plus >= rho_minus > 0.
  void validate() const;
};

/// 1 + 2 sqrt(k*) / sqrt(k - k*). Throws DomainError when k <= k*.
double alpha(std::size_t k, std::size_t kstar);

struct EpsilonConstants {
  double eps_mu = 0.0;
  double eps_I = 0.0;
  double eps_Ic = 0.0;   // uses (d - 1) in the denominator
  double eps_abs = 0.0;
};

/// Requires d >= 2 and 1 <= s2 <= d; does not require k > k*.
EpsilonConstants epsilon_constants(const TheoryParams& tp);

struct SzohtConditions {
  double k_lower = 0.0;
  double k_upper = 0.0;
  double q_lower = 0.0;
  bool k_interval_empty() const noexcept { return k_lower > k_upper; }
};

/// Admissible sparsity interval and minimum direction count of plain SZOHT.
SzohtConditions szoht_conditions(const TheoryParams& tp);
/// k*(4 eps_I + 1)^2 kappa^4 (1 - kappa^-2 / (4 eps_I + 1)).
double szoht_k_lower(std::size_t kstar, double eps_I, double kappa);

/// Step-size interval derived from a quadratic a eta^2 + b eta + c.
struct EtaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty = false;
  double discriminant = 0.0;
  // the quadratic and its real roots (NaN when the discriminant is negative)
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double root_lo = 0.0;
  double root_hi = 0.0;

  double residual(double eta) const { return a * eta * eta + b * eta + c; }
};

/// pM-SZHT: roots of L eta^2 - 2 alpha eta + (1 - p/n + 2/rho^-) with
/// L = 48 eps_I alpha rho^+ + rho^-; the upper end is
/// max(root_hi, 1 / (48 eps_I rho^+)). Nonempty iff the discriminant is
/// positive. Requires tp.p (defaults to 1 when unset).
EtaInterval pm_eta_interval(const TheoryParams& tp, double eps_I);

struct VrEta {
  EtaInterval interval;
  double recommended = 0.0;  // vertex of the quadratic
};

/// VR-SZHT: (48 eps_I alpha rho^- rho^+ + rho^-^2) eta^2 - alpha rho^- eta
/// + (alpha - 1) < 0, intersected with eta <= 1 / (48 eps_I rho^+).
VrEta vrszht_eta_interval(const TheoryParams& tp, double eps_I);

/// SARAH-SZHT: (48 eps_I alpha rho^+ + alpha rho^-) eta^2 - alpha eta
/// + (alpha - 1) <= 0.
EtaInterval sarah_eta_interval(const TheoryParams& tp, double eps_I);

struct Complexity {
  double zo_queries = 0.0;
  double ht_ops = 0.0;
};

/// (n + kappa^3 / (kappa^2 + 1)) log(1/eps) and log(1/eps), unit constants.
Complexity complexity_estimate(const TheoryParams& tp, double target_eps);

// ---------------------------------------------------------------------------
// System-error diagnostics
// ---------------------------------------------------------------------------

enum class TermKind {
  Smoothing,        // proportional to mu^2
  OptimumGradient,  // vanishes when every grad f_i(theta*) = 0
  Other,
};

struct Term {
  std::string label;
  double value = 0.0;
  TermKind kind = TermKind::Other;
};

struct SystemErrorReport {
  // pM-SZHT
  double gamma = 0.0;
  std::vector<Term> pm_terms;
  // VR-SZHT
  double beta = 0.0;
  double delta = 0.0;
  double gamma_prime = 0.0;
  std::vector<Term> vr_terms;

  double sum(const std::vector<Term>& terms, TermKind kind) const;
  /// L_r of the pM-SZHT bound.
  double pm_L_r() const;
  /// L_mu of the pM-SZHT bound.
  double pm_L_mu() const;
};

/// Evaluates the mu^2 and grad F(theta*)-dependent addends of the
/// pM-SZHT and VR-SZHT bounds at theta. The memory term A_r is taken at its
/// stationary value with gradients frozen at theta.
///
/// `target` defaults to oracle.known_minimizer(); the oracle must expose
/// exact gradients. Throws UnsupportedError otherwise.
SystemErrorReport system_error_terms(const FunctionOracle& oracle, const TheoryParams& tp, const DenseVector& theta,
                                     double eta, const std::optional<DenseVector>& target = std::nullopt);

}  // namespace zoht::theory
