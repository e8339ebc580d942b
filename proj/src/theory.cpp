#include "dgdtrack/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

namespace {

// Direct summation is O(t0); beyond this the constants are not practical.
constexpr double kMaxT0 = 1e8;

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0))
    throw ParameterError(std::string(name) + " must lie in (0, 1), got " + format_real(v));
}

void require_t(std::int64_t t, std::int64_t t0) {
  if (t < t0)
    throw DomainError("bound is only asserted for t >= t0 = " + std::to_string(t0) + ", got t = " +
                      std::to_string(t));
}

std::int64_t floored_ceiling(double x) {
  if (!(x <= kMaxT0)) throw ParameterError("t0 = ceil(" + format_real(x) + ") is too large to evaluate");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x)));
}

}  // namespace

double TheoryConstants::bias_term() const {
  if (n_agents == 1) return 0.0;
  return eta * kappa * Lambda * G;
}

double TheoryConstants::fixed_point_norm_bound() const {
  return C * std::sqrt(static_cast<double>(n_agents) * kappa);
}

double contraction_factor(double eta, double mu, int E) {
  if (E < 1) throw ParameterError("E must be >= 1");
  return std::pow(1.0 - eta * mu, E);
}

TheoryConstants theory_constants(const TheoryInputs& in) {
  if (!(in.mu > 0.0) || !(in.L >= in.mu) || !std::isfinite(in.L)) throw ParameterError("need 0 < mu <= L");
  if (!(in.eta > 0.0) || !(in.eta * in.mu < 1.0)) throw ParameterError("need 0 < eta*mu < 1");
  if (in.n_agents < 1 || in.dim < 1) throw ParameterError("need N >= 1 and d >= 1");
  if (!(in.c_max > 0.0)) throw ParameterError("C_max must be positive");
  if (in.n_agents > 1 && !(in.lambda2 < 1.0)) throw ParameterError("lambda2 must be < 1 for N >= 2");
  TheoryConstants tc;
  tc.mu = in.mu;
  tc.L = in.L;
  tc.kappa = in.L / in.mu;
  tc.eta = in.eta;
  tc.E = in.E;
  tc.alpha = contraction_factor(in.eta, in.mu, in.E);
  tc.C = in.c_max * std::sqrt(static_cast<double>(in.dim));
  tc.G = 2.0 * in.L * tc.C * std::sqrt(static_cast<double>(in.n_agents) * tc.kappa);
  tc.Lambda = in.n_agents == 1 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - in.lambda2);
  tc.init_dist = in.init_dist;
  tc.n_agents = in.n_agents;
  return tc;
}

double uniform_drift_sum(double alpha, std::int64_t t) {
  double sum = 0.0;
  double power = 1.0;
  // k = t - i runs 1 .. t-1, i + 1 = t - k + 1.
  for (std::int64_t k = 1; k <= t - 1; ++k) {
    power *= alpha;
    sum += power / static_cast<double>(t - k + 1);
  }
  return sum;
}

double discounted_drift_sum(double alpha, double gamma, std::int64_t t) {
  double sum = 0.0;
  for (std::int64_t i = 1; i <= t - 1; ++i)
    sum += (1.0 - gamma) * std::pow(alpha, static_cast<double>(t - i)) /
           (1.0 - std::pow(gamma, static_cast<double>(i + 1)));
  return sum;
}

UniformConstants uniform_constants(double alpha) {
  require_unit_interval(alpha, "alpha");
  const double ratio = 2.0 * alpha / (1.0 - alpha);
  UniformConstants c;
  c.t0 = floored_ceiling(ratio);
  c.A = std::max(static_cast<double>(c.t0) * uniform_drift_sum(alpha, c.t0), ratio);
  return c;
}

DiscountedConstants discounted_constants(double alpha, double gamma) {
  require_unit_interval(alpha, "alpha");
  require_unit_interval(gamma, "gamma");
  const double denom = 1.0 + alpha - 2.0 * gamma * alpha;
  const double arg = (1.0 - alpha) / denom;
  if (!(denom > 0.0) || !(arg > 0.0) || !std::isfinite(arg))
    throw TheoryDegeneracyError("(alpha, gamma) = (" + format_real(alpha) + ", " + format_real(gamma) +
                                ") is outside the admissible region: ln((1-alpha)/(1+alpha-2*gamma*alpha)) "
                                "has argument " + format_real(arg));
  DiscountedConstants c;
  c.t0 = floored_ceiling(std::log(arg) / std::log(gamma));
  const double ratio = 2.0 * alpha / (1.0 - alpha);
  const double head = (1.0 - std::pow(gamma, static_cast<double>(c.t0))) * discounted_drift_sum(alpha, gamma, c.t0) /
                      (1.0 - gamma);
  c.A_gamma = std::max(head, ratio);
  c.floor = (1.0 - gamma) * alpha / (1.0 - alpha);
  return c;
}

BoundTerms uniform_bound_terms(const TheoryConstants& tc, double A, std::int64_t t) {
  const double td = static_cast<double>(t);
  return {std::pow(tc.alpha, td) * tc.init_dist, (2.0 * tc.G / tc.mu) * (A / td), tc.bias_term()};
}

BoundTerms discounted_bound_terms(const TheoryConstants& tc, double A_gamma, double gamma, std::int64_t t) {
  const double td = static_cast<double>(t);
  return {std::pow(tc.alpha, td) * tc.init_dist,
          (2.0 * tc.G / tc.mu) * A_gamma * (1.0 - gamma) / (1.0 - std::pow(gamma, td)), tc.bias_term()};
}

double bound_uniform(const TheoryConstants& tc, double A, std::int64_t t0, std::int64_t t) {
  require_t(t, t0);
  return uniform_bound_terms(tc, A, t).total();
}

double bound_discounted(const TheoryConstants& tc, double A_gamma, std::int64_t t0, double gamma, std::int64_t t) {
  require_t(t, t0);
  return discounted_bound_terms(tc, A_gamma, gamma, t).total();
}

double ate_discounted(const TheoryConstants& tc, double gamma) {
  return (2.0 * tc.G / tc.mu) * (1.0 - gamma) * tc.alpha / (1.0 - tc.alpha) + tc.bias_term();
}

double ate_uniform(const TheoryConstants& tc) { return tc.bias_term(); }

double drift_bound_uniform(double G, double mu, std::int64_t t) {
  return 2.0 * G / (mu * (static_cast<double>(t) + 1.0));
}

double drift_bound_discounted(double G, double mu, double gamma, std::int64_t t) {
  return (2.0 * G / mu) * (1.0 - gamma) / (1.0 - std::pow(gamma, static_cast<double>(t) + 1.0));
}

TrackingBound::TrackingBound(const TheoryConstants& tc, const WeightScheme& scheme) : tc_(tc), scheme_(scheme) {
  if (scheme.is_discounted()) {
    const auto c = discounted_constants(tc.alpha, scheme.gamma());
    t0_ = c.t0;
    A_ = c.A_gamma;
  } else {
    const auto c = uniform_constants(tc.alpha);
    t0_ = c.t0;
    A_ = c.A;
  }
}

BoundTerms TrackingBound::terms(std::int64_t t) const {
  return scheme_.is_discounted() ? discounted_bound_terms(tc_, A_, scheme_.gamma(), t)
                                 : uniform_bound_terms(tc_, A_, t);
}

double TrackingBound::operator()(std::int64_t t) const {
  require_t(t, t0_);
  return terms(t).total();
}

double TrackingBound::limit() const {
  if (!scheme_.is_discounted()) return tc_.bias_term();
  return (2.0 * tc_.G / tc_.mu) * A_ * (1.0 - scheme_.gamma()) + tc_.bias_term();
}

double TrackingBound::ate() const {
  return scheme_.is_discounted() ? ate_discounted(tc_, scheme_.gamma()) : ate_uniform(tc_);
}

double TrackingBound::drift_envelope(std::int64_t t) const {
  return scheme_.is_discounted() ? drift_bound_discounted(tc_.G, tc_.mu, scheme_.gamma(), t)
                                 : drift_bound_uniform(tc_.G, tc_.mu, t);
}

}  // namespace dgdtrack
