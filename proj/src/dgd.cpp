#include "dgdtrack/dgd.hpp"

#include <cmath>
#include <iostream>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

StackedIterate::StackedIterate(Eigen::VectorXd data, int n_agents, int dim)
    : data_(std::move(data)), n_(n_agents), d_(dim) {
  if (data_.size() != static_cast<Eigen::Index>(n_agents) * dim)
    throw LogicError("stacked iterate length is not N*d");
}

StackedIterate StackedIterate::consensus(const Eigen::VectorXd& v, int n_agents) {
  StackedIterate w(n_agents, static_cast<int>(v.size()));
  w.as_matrix().colwise() = v;
  return w;
}

DgdEngine::DgdEngine(const MixingMatrix& mix, double eta, double mu, double L, bool allow_unstable_step)
    : mix_(&mix), eta_(eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("step size eta must be positive");
  const double limit = max_stable_step(mix, mu, L);
  stable_ = eta <= limit;
  if (!stable_) {
    const std::string msg = "step size " + format_real(eta) + " exceeds (1+lambda_N)/(L+mu) = " + format_real(limit);
    if (!allow_unstable_step) throw ParameterError(msg);
    std::clog << "warning: " << msg << "; DGD contraction guarantees do not apply\n";
  }
}

void DgdEngine::check_shape(const StreamState& state, const StackedIterate& w) const {
  if (w.n_agents() != state.n_agents() || w.dim() != state.dim() || mix_->size() != state.n_agents())
    throw LogicError("iterate, stream and mixing matrix dimensions disagree");
}

void DgdEngine::phi_step(const StreamState& state, const StackedIterate& w, StackedIterate& out) const {
  check_shape(state, w);
  check_shape(state, out);
  // Column n of W * M^T is sum_m M(n, m) w_m.
  out.as_matrix().noalias() = w.as_matrix() * mix_->entries.transpose();
  out.data().array() -= eta_ * (state.agent_hessian.array() * w.data().array() - state.agent_linear.array());
}

void DgdEngine::run_inner(const StreamState& state, int E, StackedIterate& w) {
  if (E < 1) throw ParameterError("inner step count E must be >= 1");
  check_shape(state, w);
  if (scratch_.n_agents() != w.n_agents() || scratch_.dim() != w.dim())
    scratch_ = StackedIterate(w.n_agents(), w.dim());
  for (int k = 0; k < E; ++k) {
    phi_step(state, w, scratch_);
    w.data().swap(scratch_.data());
  }
}

StackedIterate phi_step(const MixingMatrix& mix, const StreamState& state, double eta,
                        const StackedIterate& w) {
  DgdEngine engine(mix, eta, state.params.mu, state.params.L);
  StackedIterate out(w.n_agents(), w.dim());
  engine.phi_step(state, w, out);
  return out;
}

}  // namespace dgdtrack
