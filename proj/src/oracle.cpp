#include "dgdtrack/oracle.hpp"

#include <sstream>

#include "dgdtrack/errors.hpp"

namespace dgdtrack {

namespace {

void gate(double residual) {
  if (!(residual <= kFixedPointResidualGate)) {
    std::ostringstream os;
    os << "fixed-point residual " << residual << " exceeds " << kFixedPointResidualGate;
    throw NumericalError(os.str());
  }
}

void check_sizes(const MixingMatrix& mix, const StreamState& state) {
  if (mix.size() != state.n_agents()) throw LogicError("mixing matrix size differs from agent count");
}

}  // namespace

Eigen::VectorXd global_minimizer(const StreamState& state) {
  if (!(state.global_hessian.array() > 0.0).all())
    throw NumericalError("non-positive entry in the weighted global Hessian");
  Eigen::VectorXd w = state.global_linear.cwiseQuotient(state.global_hessian);
  return w;
}

double fixed_point_residual(const MixingMatrix& mix, const StreamState& state, double eta,
                            const StackedIterate& w) {
  check_sizes(mix, state);
  Eigen::MatrixXd mixed = w.as_matrix() * mix.entries.transpose();
  Eigen::Map<const Eigen::VectorXd> mixed_vec(mixed.data(), mixed.size());
  return (mixed_vec - eta * weighted_gradient(state, w.data()) - w.data()).norm();
}

StackedIterate fixed_point(const MixingMatrix& mix, const StreamState& state, double eta) {
  check_sizes(mix, state);
  const int n = state.n_agents();
  const int d = state.dim();
  const Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(n, n) - mix.entries;
  Eigen::Map<const Eigen::MatrixXd> H(state.agent_hessian.data(), d, n);
  Eigen::Map<const Eigen::MatrixXd> b(state.agent_linear.data(), d, n);

  StackedIterate w(n, d);
  auto W = w.as_matrix();
  Eigen::MatrixXd K(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(n);
  for (int j = 0; j < d; ++j) {
    K = laplacian;
    K.diagonal() += eta * H.row(j).transpose();
    llt.compute(K);
    if (llt.info() != Eigen::Success)
      throw NumericalError("fixed-point system for coordinate " + std::to_string(j) + " is not positive definite");
    W.row(j) = llt.solve(eta * b.row(j).transpose()).transpose();
  }
  gate(fixed_point_residual(mix, state, eta, w));
  return w;
}

StackedIterate fixed_point_dense(const MixingMatrix& mix, const StreamState& state, double eta) {
  check_sizes(mix, state);
  const int n = state.n_agents();
  const int d = state.dim();
  const Eigen::Index nd = state.stacked_size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nd, nd);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const double v = (a == c ? 1.0 : 0.0) - mix.entries(a, c);
      if (v != 0.0) K.block(static_cast<Eigen::Index>(a) * d, static_cast<Eigen::Index>(c) * d, d, d).diagonal().setConstant(v);
    }
  K.diagonal() += eta * state.agent_hessian;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  StackedIterate w(lu.solve(eta * state.agent_linear), n, d);
  if (!w.all_finite()) throw NumericalError("dense fixed-point solve produced non-finite values");
  gate(fixed_point_residual(mix, state, eta, w));
  return w;
}

OracleSnapshot snapshot(int t, const StackedIterate& w, const MixingMatrix& mix, const StreamState& state,
                        double eta) {
  if (w.n_agents() != state.n_agents() || w.dim() != state.dim())
    throw LogicError("iterate dimensions differ from the stream");
  OracleSnapshot s;
  s.minimizer = global_minimizer(state);
  s.fixed_point = fixed_point(mix, state, eta);
  const StackedIterate optimum = StackedIterate::consensus(s.minimizer, state.n_agents());
  s.optimum_gradient_norm = weighted_gradient(state, optimum.data()).norm();
  s.record.t = t;
  s.record.te = (w.data() - optimum.data()).norm();
  s.record.fpte = (w.data() - s.fixed_point.data()).norm();
  s.record.bias = (s.fixed_point.data() - optimum.data()).norm();
  s.record.fp_residual = fixed_point_residual(mix, state, eta, s.fixed_point);
  return s;
}

ErrorRecord measure(int t, const StackedIterate& w, const MixingMatrix& mix, const StreamState& state,
                    double eta) {
  return snapshot(t, w, mix, state, eta).record;
}

}  // namespace dgdtrack
