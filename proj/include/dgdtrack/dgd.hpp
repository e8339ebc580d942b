#pragma once

#include <Eigen/Dense>

#include "dgdtrack/network.hpp"
#include "dgdtrack/streaming.hpp"

namespace dgdtrack {

/// Network iterate w = [w_1; ...; w_N], agent-major: agent n owns entries
/// [n*d, (n+1)*d).
class StackedIterate {
 public:
  StackedIterate(int n_agents, int dim)
      : data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_agents) * dim)), n_(n_agents), d_(dim) {}
  StackedIterate(Eigen::VectorXd data, int n_agents, int dim);

  /// 1 (x) v: every agent holds v.
  static StackedIterate consensus(const Eigen::VectorXd& v, int n_agents);

  int n_agents() const { return n_; }
  int dim() const { return d_; }
  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }

  auto block(int n) { return data_.segment(static_cast<Eigen::Index>(n) * d_, d_); }
  auto block(int n) const { return data_.segment(static_cast<Eigen::Index>(n) * d_, d_); }

  /// d x N column-major view; column n is agent n's block.
  Eigen::Map<Eigen::MatrixXd> as_matrix() { return {data_.data(), d_, n_}; }
  Eigen::Map<const Eigen::MatrixXd> as_matrix() const { return {data_.data(), d_, n_}; }

  bool all_finite() const { return data_.allFinite(); }

 private:
  Eigen::VectorXd data_;
  int n_;
  int d_;
};

/// Applies phi_t(w) = (M (x) I_d) w - eta * grad fbar_t(w) and its E-fold
/// composition. The mixing acts on the d x N view of the iterate, so the
/// Kronecker product is never formed.
///
/// Construction checks 0 < eta <= (1 + lambda_N)/(L + mu). With
/// allow_unstable_step the check becomes a one-time warning on stderr and
/// the contraction guarantees no longer apply.
class DgdEngine {
 public:
  DgdEngine(const MixingMatrix& mix, double eta, double mu, double L, bool allow_unstable_step = false);

  double eta() const { return eta_; }
  bool step_within_stable_range() const { return stable_; }

  /// out = phi(w). `out` must not alias `w`.
  void phi_step(const StreamState& state, const StackedIterate& w, StackedIterate& out) const;

  /// w <- phi^E(w), in place with one scratch buffer.
  void run_inner(const StreamState& state, int E, StackedIterate& w);

 private:
  void check_shape(const StreamState& state, const StackedIterate& w) const;

  const MixingMatrix* mix_;
  double eta_;
  bool stable_;
  StackedIterate scratch_{0, 0};
};

/// Convenience single step with the step-size guard enabled.
StackedIterate phi_step(const MixingMatrix& mix, const StreamState& state, double eta,
                        const StackedIterate& w);

}  // namespace dgdtrack
