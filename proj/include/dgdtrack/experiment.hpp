#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgdtrack/network.hpp"
#include "dgdtrack/oracle.hpp"
#include "dgdtrack/streaming.hpp"
#include "dgdtrack/theory.hpp"
#include "dgdtrack/weighting.hpp"

namespace dgdtrack {

struct ExperimentConfig {
  int n_agents = 30;
  int dim = 50;
  double mu = 0.01;
  double L = 0.1;
  double eta = 0.05;
  int E = 5;
  WeightScheme scheme = WeightScheme::uniform();
  double c_max = 10.0;
  double sigma2 = 1.0;
  int horizon = 300;
  int n_runs = 50;
  std::uint64_t master_seed = 20260101;
  int measure_stride = 1;
  double initial_radius = 0.35;
  double growth_factor = 1.1;
  bool shared_topology = true;
  bool homogeneous_agents = false;
  bool allow_unstable_step = false;

  /// Throws ParameterError naming the offending field.
  void validate() const;
  StreamParams stream_params() const;
};

/// Stride worth considering for long horizons (T > 2000); never applied
/// automatically.
std::optional<int> suggested_stride(const ExperimentConfig& cfg);

struct Topology {
  Graph graph;
  MixingMatrix mix;
};

/// Graph and Metropolis matrix drawn from the "graph" substream of `seed`.
Topology make_topology(const ExperimentConfig& cfg, std::uint64_t seed);
/// Topology used by every run when shared_topology is set.
Topology shared_topology(const ExperimentConfig& cfg);

struct TracePoint {
  ErrorRecord record;
  double bound = 0.0;        // tracking envelope at t (asserted only for t >= t0)
  double tight_bound = 0.0;  // same envelope with G replaced by the run's measured gradient maximum
  double optimum_gradient_norm = 0.0;  // ||grad fbar_t(1 (x) wbar*_t)||
  double bias_envelope = 0.0;          // eta kappa Lambda ||grad fbar_t(1 (x) wbar*_t)||
  double fixed_point_norm = 0.0;       // ||wtilde_t||
  double minimizer_max_abs = 0.0;      // max_j |wbar*_t[j]|
  // Filled when t-1 was also measured.
  bool has_drift = false;
  double drift = 0.0;           // ||wtilde_t - wtilde_{t-1}||
  double drift_gradient = 0.0;  // (1/mu) ||grad fbar_t(wtilde_t) - grad fbar_{t-1}(wtilde_t)||
  double drift_envelope = 0.0;  // scheme drift envelope for t-1 -> t
};

struct RunTrace {
  int run_index = 0;
  std::uint64_t seed = 0;
  TheoryConstants constants;
  std::int64_t t0 = 1;
  double summation_constant = 0.0;
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  double tight_G = 0.0;
  std::vector<TracePoint> points;  // strictly increasing t
};

/// Failure inside a run, tagged with the run index and time step.
class RunError : public std::runtime_error {
 public:
  RunError(int run_index, int t, const std::string& what);
  int run_index() const { return run_index_; }
  int t() const { return t_; }

 private:
  int run_index_;
  int t_;
};

/// One simulation: for t = 1..T the objective moves to fbar_t (from t = 2
/// on, through step_drift + ingest_sample), E DGD steps map w_{t-1} to w_t
/// on that objective, and w_t is scored against fbar_t's oracle. w_0 = 0.
/// `shared` overrides the per-run topology when given.
RunTrace run_trial(const ExperimentConfig& cfg, int run_index, const Topology* shared = nullptr);

struct AggregateRow {
  int t = 0;
  double rms_te = 0.0;
  double min_te = 0.0;
  double max_te = 0.0;
  double mean_fpte = 0.0;
  double min_fpte = 0.0;
  double max_fpte = 0.0;
  double mean_bias = 0.0;
  double min_bias = 0.0;
  double max_bias = 0.0;
  double mean_bound = 0.0;
  double min_bound = 0.0;
  double max_bound = 0.0;
  double mean_fp_residual = 0.0;
  int n_runs = 0;
};

struct MonteCarloResult {
  std::vector<AggregateRow> rows;
  std::vector<RunTrace> traces;  // indexed by run
  std::optional<Topology> topology;  // set when shared
};

/// Runs cfg.n_runs trials on up to `threads` worker threads and folds them
/// in run-index order, so the result does not depend on scheduling.
MonteCarloResult monte_carlo(const ExperimentConfig& cfg, int threads = 1);

/// Column order: t,rms_te,mean_fpte,mean_bias,bound,mean_fp_residual,n_runs.
std::string cell_csv(const std::vector<AggregateRow>& rows);
void write_cell_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);
/// "uniform_E5.csv" or "discounted_gamma0.7_E5.csv".
std::string cell_file_name(const ExperimentConfig& cfg);

}  // namespace dgdtrack
