#include "dgdtrack/weighting.hpp"

#include <cmath>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

namespace {

RecursionCoefficients discounted_coefficients(double gamma, double gamma_pow_t) {
  const double denom = 1.0 - gamma * gamma_pow_t;
  return {gamma * (1.0 - gamma_pow_t) / denom, (1.0 - gamma) / denom};
}

}  // namespace

WeightScheme WeightScheme::discounted(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ParameterError("discount factor gamma must lie in (0, 1), got " + format_real(gamma));
  return WeightScheme(WeightKind::discounted, gamma);
}

std::string WeightScheme::label() const {
  if (kind_ == WeightKind::uniform) return "uniform";
  return "discounted(" + format_short(gamma_) + ")";
}

std::vector<double> weights(const WeightScheme& scheme, int t) {
  if (t < 1) throw ParameterError("weights need t >= 1");
  std::vector<double> a(static_cast<std::size_t>(t));
  if (scheme.kind() == WeightKind::uniform) {
    for (auto& v : a) v = 1.0 / t;
    return a;
  }
  const double g = scheme.gamma();
  const double norm = (1.0 - g) / (1.0 - std::pow(g, t));
  for (int i = 1; i <= t; ++i) a[i - 1] = norm * std::pow(g, t - i);
  return a;
}

RecursionCoefficients recursion_coefficients(const WeightScheme& scheme, int t) {
  if (t < 1) throw ParameterError("recursion coefficients need t >= 1");
  if (scheme.kind() == WeightKind::uniform) {
    const double td = t;
    return {td / (td + 1.0), 1.0 / (td + 1.0)};
  }
  return discounted_coefficients(scheme.gamma(), std::pow(scheme.gamma(), t));
}

WeightRecursion::WeightRecursion(WeightScheme scheme)
    : scheme_(scheme), gamma_pow_t_(scheme.is_discounted() ? scheme.gamma() : 1.0) {}

RecursionCoefficients WeightRecursion::advance() {
  if (scheme_.kind() == WeightKind::uniform) {
    const auto c = recursion_coefficients(scheme_, t_);
    ++t_;
    return c;
  }
  const double g = scheme_.gamma();
  const auto c = discounted_coefficients(g, gamma_pow_t_);
  ++t_;
  gamma_pow_t_ = (t_ % kReanchorPeriod == 0) ? std::pow(g, t_) : gamma_pow_t_ * g;
  return c;
}

}  // namespace dgdtrack
