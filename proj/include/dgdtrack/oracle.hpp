#pragma once

#include <Eigen/Dense>

#include "dgdtrack/dgd.hpp"
#include "dgdtrack/network.hpp"
#include "dgdtrack/streaming.hpp"

namespace dgdtrack {

struct ErrorRecord {
  int t = 0;
  double te = 0.0;           // ||w_t - 1 (x) wbar*_t||
  double fpte = 0.0;         // ||w_t - wtilde_t||
  double bias = 0.0;         // ||wtilde_t - 1 (x) wbar*_t||
  double fp_residual = 0.0;  // ||phi_t(wtilde_t) - wtilde_t||
};

/// Largest fixed-point residual accepted from a solve.
inline constexpr double kFixedPointResidualGate = 1e-8;

/// Minimizer of the temporally weighted network objective:
/// global_H^{-1} global_b, coordinatewise.
Eigen::VectorXd global_minimizer(const StreamState& state);

/// Fixed point of phi_t: solves ((I - M) (x) I_d + eta blockdiag(Hbar_n)) w = eta bbar.
/// With diagonal Hessians the system separates into d independent N x N
/// symmetric positive definite systems, one per coordinate, each solved by
/// Cholesky. Throws NumericalError if a factorization fails or the residual
/// exceeds kFixedPointResidualGate.
StackedIterate fixed_point(const MixingMatrix& mix, const StreamState& state, double eta);

/// Same fixed point from one dense (N*d) x (N*d) LU solve of the Kronecker
/// system. Reference path for cross-checks on small instances.
StackedIterate fixed_point_dense(const MixingMatrix& mix, const StreamState& state, double eta);

/// ||phi_t(w) - w||.
double fixed_point_residual(const MixingMatrix& mix, const StreamState& state, double eta,
                            const StackedIterate& w);

/// Everything the oracle knows about one time index.
struct OracleSnapshot {
  ErrorRecord record;
  StackedIterate fixed_point{0, 0};
  Eigen::VectorXd minimizer;
  double optimum_gradient_norm = 0.0;  // ||grad fbar_t(1 (x) wbar*_t)||
};

OracleSnapshot snapshot(int t, const StackedIterate& w, const MixingMatrix& mix, const StreamState& state,
                        double eta);

ErrorRecord measure(int t, const StackedIterate& w, const MixingMatrix& mix, const StreamState& state,
                    double eta);

}  // namespace dgdtrack
