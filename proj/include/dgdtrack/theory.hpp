#pragma once

#include <cstdint>

#include "dgdtrack/weighting.hpp"

namespace dgdtrack {

/// Raw problem description the theory constants are built from.
struct TheoryInputs {
  double mu = 0.0;
  double L = 0.0;
  double eta = 0.0;
  int E = 1;
  int n_agents = 1;
  int dim = 1;
  double c_max = 0.0;
  double lambda2 = 0.0;
  double init_dist = 0.0;  // ||w_0 - wtilde_1||
};

struct TheoryConstants {
  double mu = 0.0;
  double L = 0.0;
  double kappa = 0.0;   // L / mu
  double eta = 0.0;
  int E = 1;
  double alpha = 0.0;   // (1 - eta mu)^E
  double C = 0.0;       // per-agent minimizer bound, C_max sqrt(d)
  double G = 0.0;       // 2 L C sqrt(N kappa)
  double Lambda = 0.0;  // 1 / (1 - lambda2)
  double init_dist = 0.0;
  int n_agents = 1;

  /// eta kappa Lambda G; zero for a single agent, whose fixed point is the
  /// minimizer itself.
  double bias_term() const;
  /// Upper bound C sqrt(N kappa) on every ||wtilde_t||.
  double fixed_point_norm_bound() const;
};

TheoryConstants theory_constants(const TheoryInputs& in);

double contraction_factor(double eta, double mu, int E);

/// S(t) = sum_{i=1}^{t-1} alpha^{t-i} / (i+1), by direct summation.
double uniform_drift_sum(double alpha, std::int64_t t);

/// S_gamma(t) = sum_{i=1}^{t-1} (1-gamma) alpha^{t-i} / (1 - gamma^{i+1}), by direct summation.
double discounted_drift_sum(double alpha, double gamma, std::int64_t t);

struct UniformConstants {
  std::int64_t t0 = 1;
  double A = 0.0;
};

/// t0 = max(1, ceil(2 alpha / (1 - alpha))), A = max(t0 S(t0), 2 alpha / (1 - alpha)).
UniformConstants uniform_constants(double alpha);

struct DiscountedConstants {
  std::int64_t t0 = 1;
  double A_gamma = 0.0;
  double floor = 0.0;  // lim S_gamma(t) = (1 - gamma) alpha / (1 - alpha)
};

/// t0 = max(1, ceil(ln((1-alpha)/(1+alpha-2 gamma alpha)) / ln gamma)),
/// A_gamma = max((1 - gamma^t0) S_gamma(t0) / (1 - gamma), 2 alpha / (1 - alpha)).
/// Throws TheoryDegeneracyError when the logarithm's argument is not a
/// positive finite number.
DiscountedConstants discounted_constants(double alpha, double gamma);

struct BoundTerms {
  double initial = 0.0;   // alpha^t ||w_0 - wtilde_1||
  double tracking = 0.0;  // fixed-point tracking envelope
  double bias = 0.0;      // eta kappa Lambda G
  double total() const { return initial + tracking + bias; }
};

BoundTerms uniform_bound_terms(const TheoryConstants& tc, double A, std::int64_t t);
BoundTerms discounted_bound_terms(const TheoryConstants& tc, double A_gamma, double gamma, std::int64_t t);

/// Tracking-error envelope under uniform weights; throws DomainError for t < t0.
double bound_uniform(const TheoryConstants& tc, double A, std::int64_t t0, std::int64_t t);
/// Tracking-error envelope under discounted weights; throws DomainError for t < t0.
double bound_discounted(const TheoryConstants& tc, double A_gamma, std::int64_t t0, double gamma, std::int64_t t);

/// limsup TE <= (2G/mu)(1-gamma) alpha/(1-alpha) + eta kappa Lambda G.
double ate_discounted(const TheoryConstants& tc, double gamma);
/// limsup TE <= eta kappa Lambda G.
double ate_uniform(const TheoryConstants& tc);

/// Envelopes on ||wtilde_{t+1} - wtilde_t||.
double drift_bound_uniform(double G, double mu, std::int64_t t);
double drift_bound_discounted(double G, double mu, double gamma, std::int64_t t);

/// Scheme-dispatching view over the constants above.
class TrackingBound {
 public:
  TrackingBound(const TheoryConstants& tc, const WeightScheme& scheme);

  const TheoryConstants& constants() const { return tc_; }
  const WeightScheme& scheme() const { return scheme_; }
  std::int64_t t0() const { return t0_; }
  /// A for uniform weights, A_gamma for discounted.
  double summation_constant() const { return A_; }

  bool certified_at(std::int64_t t) const { return t >= t0_; }
  /// The three terms evaluated at any t >= 1; only asserted for t >= t0.
  BoundTerms terms(std::int64_t t) const;
  /// Checked evaluation (DomainError for t < t0).
  double operator()(std::int64_t t) const;
  /// Value of the envelope as t -> infinity.
  double limit() const;
  /// Asymptotic tracking-error bound.
  double ate() const;
  /// Envelope on the fixed-point drift for the transition t -> t+1.
  double drift_envelope(std::int64_t t) const;

 private:
  TheoryConstants tc_;
  WeightScheme scheme_;
  std::int64_t t0_ = 1;
  double A_ = 0.0;
};

}  // namespace dgdtrack
