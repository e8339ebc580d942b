#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "dgdtrack/rng.hpp"
#include "dgdtrack/weighting.hpp"

namespace dgdtrack {

struct StreamParams {
  int n_agents = 1;
  int dim = 1;
  double mu = 1.0;
  double L = 1.0;
  double c_max = 1.0;
  double sigma2 = 0.0;
  // Every agent receives the same sample (zero data heterogeneity).
  bool homogeneous_agents = false;
  // Keep every ingested sample; only needed for offline cross-checks.
  bool retain_history = false;

  void validate() const;
};

/// One time step of quadratic losses for the whole network,
///   l_{n,t}(w) = 0.5 (w - c_{n,t})^T diag(h_{n,t}) (w - c_{n,t}).
/// Both vectors are agent-major with length N*d.
struct SampleBatch {
  Eigen::VectorXd hessian;
  Eigen::VectorXd centers;
};

/// Temporally weighted quadratic objective fbar_t held through exact
/// accumulators; all per-agent vectors are agent-major (N*d).
struct StreamState {
  StreamParams params;
  int t = 1;
  SampleBatch latest;
  Eigen::VectorXd agent_hessian;  // Hbar_{n,t} = sum_i a_i(t) A_{n,i}
  Eigen::VectorXd agent_linear;   // bbar_{n,t} = sum_i a_i(t) A_{n,i} c_{n,i}
  Eigen::VectorXd global_hessian;  // sum_n Hbar_{n,t}, length d
  Eigen::VectorXd global_linear;   // sum_n bbar_{n,t}, length d
  std::vector<SampleBatch> history;  // history[i] is the sample of time i+1

  int n_agents() const { return params.n_agents; }
  int dim() const { return params.dim; }
  Eigen::Index stacked_size() const { return static_cast<Eigen::Index>(params.n_agents) * params.dim; }
};

/// Clipped random-walk coordinate update max(-c_max, min(c + z, c_max)).
double clip_step(double center, double increment, double c_max);

/// Draws c_{n,0} ~ Unif[-c_max, c_max]^d, steps it once to c_{n,1} and
/// draws the t=1 Hessians. Accumulators equal the t=1 sample.
StreamState init_stream(const StreamParams& params, Rng& rng);

/// Starts a stream from an explicit first sample (replay and tests).
StreamState start_stream(const StreamParams& params, SampleBatch first);

/// Draws the time t+1 sample: each center coordinate takes an independent
/// N(0, sigma2) increment and is clipped; Hessian entries are fresh
/// Unif[mu, L] draws.
SampleBatch step_drift(const StreamState& state, Rng& rng);

/// Folds the t+1 sample into the accumulators with the recursion
/// coefficients of `clock`. The clock must sit at the state's time index.
void ingest_sample(StreamState& state, const SampleBatch& sample, WeightRecursion& clock);

/// Gradient of fbar_t at the stacked iterate w: block n is Hbar_n .* w_n - bbar_n.
void weighted_gradient(const StreamState& state, const Eigen::VectorXd& w, Eigen::VectorXd& out);
Eigen::VectorXd weighted_gradient(const StreamState& state, const Eigen::VectorXd& w);

/// Per-t dump: columns t,agent,coord,center,hessian.
void write_stream_csv(const std::filesystem::path& path, const StreamState& state);
std::vector<SampleBatch> read_stream_csv(const std::filesystem::path& path, int n_agents, int dim);

/// Rebuilds fbar_T from a recorded sample sequence.
StreamState replay_stream(const StreamParams& params, const std::vector<SampleBatch>& samples,
                          const WeightScheme& scheme);

}  // namespace dgdtrack
