#pragma once

#include <string>
#include <vector>

namespace dgdtrack {

enum class WeightKind { uniform, discounted };

/// Temporal weighting rule a_i(t) over the samples seen up to time t.
class WeightScheme {
 public:
  static WeightScheme uniform() { return WeightScheme(WeightKind::uniform, 0.0); }
  /// Requires 0 < gamma < 1; gamma = 1 is not a limit of this family.
  static WeightScheme discounted(double gamma);

  WeightKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool is_discounted() const { return kind_ == WeightKind::discounted; }

  /// "uniform" or "discounted(0.7)".
  std::string label() const;

  friend bool operator==(const WeightScheme&, const WeightScheme&) = default;

 private:
  WeightScheme(WeightKind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  WeightKind kind_;
  double gamma_;
};

/// Closed-form weights (a_1(t), ..., a_t(t)).
std::vector<double> weights(const WeightScheme& scheme, int t);

struct RecursionCoefficients {
  double old_coeff = 0.0;
  double new_coeff = 0.0;
};

/// Coefficients of fbar_{t+1} = old * fbar_t + new * f_{t+1}.
/// Uniform: (t/(t+1), 1/(t+1)).
/// Discounted: (g(1-g^t)/(1-g^{t+1}), (1-g)/(1-g^{t+1})).
RecursionCoefficients recursion_coefficients(const WeightScheme& scheme, int t);

/// Stateful form of recursion_coefficients for long runs. gamma^t is carried
/// forward by multiplication and re-anchored with std::pow every 1000 steps.
class WeightRecursion {
 public:
  static constexpr int kReanchorPeriod = 1000;

  explicit WeightRecursion(WeightScheme scheme);

  const WeightScheme& scheme() const { return scheme_; }
  /// Time index of the objective the next call to advance() starts from.
  int t() const { return t_; }

  /// Coefficients for the transition t -> t+1; then t becomes t+1.
  RecursionCoefficients advance();

 private:
  WeightScheme scheme_;
  int t_ = 1;
  double gamma_pow_t_;
};

}  // namespace dgdtrack
