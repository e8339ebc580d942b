#include "dgdtrack/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "dgdtrack/dgd.hpp"
#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n_agents >= 1, "n_agents must be >= 1");
  require(dim >= 1, "dim must be >= 1");
  require(mu > 0.0 && std::isfinite(mu), "mu must be positive");
  require(L >= mu && std::isfinite(L), "L must satisfy L >= mu");
  require(eta > 0.0 && std::isfinite(eta), "eta must be positive");
  require(eta * mu < 1.0, "eta * mu must be < 1");
  require(E >= 1, "E must be >= 1");
  require(c_max > 0.0 && std::isfinite(c_max), "C_max must be positive");
  require(sigma2 >= 0.0 && std::isfinite(sigma2), "sigma2 must be >= 0");
  require(horizon >= 1, "horizon must be >= 1");
  require(n_runs >= 1, "n_runs must be >= 1");
  require(measure_stride >= 1, "measure_stride must be >= 1");
  require(initial_radius > 0.0 && std::isfinite(initial_radius), "initial_radius must be positive");
  require(growth_factor > 1.0 && std::isfinite(growth_factor), "growth_factor must be > 1");
}

StreamParams ExperimentConfig::stream_params() const {
  StreamParams p;
  p.n_agents = n_agents;
  p.dim = dim;
  p.mu = mu;
  p.L = L;
  p.c_max = c_max;
  p.sigma2 = sigma2;
  p.homogeneous_agents = homogeneous_agents;
  return p;
}

std::optional<int> suggested_stride(const ExperimentConfig& cfg) {
  if (cfg.horizon <= 2000 || cfg.measure_stride > 1) return std::nullopt;
  return (cfg.horizon + 1999) / 2000;
}

Topology make_topology(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng(substream_seed(seed, "graph"));
  Topology topo{generate_rgg(cfg.n_agents, cfg.initial_radius, cfg.growth_factor, rng), {}};
  topo.mix = metropolis_mixing(topo.graph);
  return topo;
}

Topology shared_topology(const ExperimentConfig& cfg) { return make_topology(cfg, cfg.master_seed); }

RunError::RunError(int run_index, int t, const std::string& what)
    : std::runtime_error("run " + std::to_string(run_index) + ", t=" + std::to_string(t) + ": " + what),
      run_index_(run_index),
      t_(t) {}

RunTrace run_trial(const ExperimentConfig& cfg, int run_index, const Topology* shared) {
  cfg.validate();
  RunTrace trace;
  trace.run_index = run_index;
  trace.seed = run_seed(cfg.master_seed, static_cast<std::uint64_t>(run_index));

  int t = 0;
  try {
    std::optional<Topology> own;
    if (!shared) own = make_topology(cfg, trace.seed);
    const Topology& topo = shared ? *shared : *own;
    const MixingMatrix& mix = topo.mix;
    trace.lambda2 = mix.lambda2;
    trace.lambdaN = mix.lambdaN;

    Rng stream_rng(substream_seed(trace.seed, "stream"));
    StreamState state = init_stream(cfg.stream_params(), stream_rng);
    WeightRecursion clock(cfg.scheme);
    DgdEngine engine(mix, cfg.eta, cfg.mu, cfg.L, cfg.allow_unstable_step);
    StackedIterate w(cfg.n_agents, cfg.dim);  // w_0 = 0

    t = 1;
    const StackedIterate first_fixed_point = fixed_point(mix, state, cfg.eta);
    TheoryInputs in;
    in.mu = cfg.mu;
    in.L = cfg.L;
    in.eta = cfg.eta;
    in.E = cfg.E;
    in.n_agents = cfg.n_agents;
    in.dim = cfg.dim;
    in.c_max = cfg.c_max;
    in.lambda2 = mix.lambda2;
    in.init_dist = (w.data() - first_fixed_point.data()).norm();
    trace.constants = theory_constants(in);
    const TrackingBound bound(trace.constants, cfg.scheme);
    trace.t0 = bound.t0();
    trace.summation_constant = bound.summation_constant();

    Eigen::VectorXd prev_hessian;
    Eigen::VectorXd prev_linear;
    std::optional<StackedIterate> prev_fixed_point;
    int prev_measured_t = 0;
    double tight_G = 0.0;

    for (t = 1; t <= cfg.horizon; ++t) {
      if (t > 1) {
        prev_hessian = state.agent_hessian;
        prev_linear = state.agent_linear;
        const SampleBatch next = step_drift(state, stream_rng);
        ingest_sample(state, next, clock);
      }
      engine.run_inner(state, cfg.E, w);

      const bool measured = t == 1 || t % cfg.measure_stride == 0;
      if (!measured) continue;

      OracleSnapshot snap = snapshot(t, w, mix, state, cfg.eta);
      TracePoint p;
      p.record = snap.record;
      p.bound = bound.terms(t).total();
      p.optimum_gradient_norm = snap.optimum_gradient_norm;
      p.bias_envelope = cfg.n_agents == 1 ? 0.0
                                          : cfg.eta * trace.constants.kappa * trace.constants.Lambda *
                                                snap.optimum_gradient_norm;
      p.fixed_point_norm = snap.fixed_point.data().norm();
      p.minimizer_max_abs = snap.minimizer.cwiseAbs().maxCoeff();

      const Eigen::VectorXd& wt = snap.fixed_point.data();
      tight_G = std::max(tight_G, snap.optimum_gradient_norm);
      tight_G = std::max(tight_G, weighted_gradient(state, wt).norm());
      tight_G = std::max(tight_G, state.latest.hessian.cwiseProduct(wt - state.latest.centers).norm());

      if (prev_fixed_point && prev_measured_t == t - 1) {
        const Eigen::VectorXd grad_prev = prev_hessian.cwiseProduct(wt) - prev_linear;
        const Eigen::VectorXd grad_now = state.agent_hessian.cwiseProduct(wt) - state.agent_linear;
        tight_G = std::max(tight_G, grad_prev.norm());
        p.has_drift = true;
        p.drift = (wt - prev_fixed_point->data()).norm();
        p.drift_gradient = (grad_now - grad_prev).norm() / cfg.mu;
        p.drift_envelope = bound.drift_envelope(t - 1);
      }
      prev_fixed_point = std::move(snap.fixed_point);
      prev_measured_t = t;
      trace.points.push_back(p);
    }

    trace.tight_G = tight_G;
    TheoryConstants tight = trace.constants;
    tight.G = tight_G;
    const TrackingBound tight_bound(tight, cfg.scheme);
    for (auto& p : trace.points) p.tight_bound = tight_bound.terms(p.record.t).total();
  } catch (const RunError&) {
    throw;
  } catch (const TheoryDegeneracyError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunError(run_index, t, e.what());
  }
  return trace;
}

MonteCarloResult monte_carlo(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.scheme.is_discounted())
    discounted_constants(contraction_factor(cfg.eta, cfg.mu, cfg.E), cfg.scheme.gamma());

  MonteCarloResult result;
  if (cfg.shared_topology) result.topology = shared_topology(cfg);
  const Topology* shared = result.topology ? &*result.topology : nullptr;

  const int R = cfg.n_runs;
  result.traces.resize(static_cast<std::size_t>(R));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(R));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < R; r = next++) {
      try {
        result.traces[static_cast<std::size_t>(r)] = run_trial(cfg, r, shared);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(threads, 1, R);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const std::size_t n_points = result.traces.front().points.size();
  result.rows.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    AggregateRow& row = result.rows[k];
    const TracePoint& first = result.traces.front().points[k];
    row.t = first.record.t;
    row.n_runs = R;
    row.min_te = row.max_te = first.record.te;
    row.min_fpte = row.max_fpte = first.record.fpte;
    row.min_bias = row.max_bias = first.record.bias;
    row.min_bound = row.max_bound = first.bound;
    double sq_te = 0.0;
    for (const auto& trace : result.traces) {
      const TracePoint& p = trace.points[k];
      sq_te += p.record.te * p.record.te;
      row.mean_fpte += p.record.fpte;
      row.mean_bias += p.record.bias;
      row.mean_bound += p.bound;
      row.mean_fp_residual += p.record.fp_residual;
      row.min_te = std::min(row.min_te, p.record.te);
      row.max_te = std::max(row.max_te, p.record.te);
      row.min_fpte = std::min(row.min_fpte, p.record.fpte);
      row.max_fpte = std::max(row.max_fpte, p.record.fpte);
      row.min_bias = std::min(row.min_bias, p.record.bias);
      row.max_bias = std::max(row.max_bias, p.record.bias);
      row.min_bound = std::min(row.min_bound, p.bound);
      row.max_bound = std::max(row.max_bound, p.bound);
    }
    row.rms_te = std::sqrt(sq_te / R);
    row.mean_fpte /= R;
    row.mean_bias /= R;
    row.mean_bound /= R;
    row.mean_fp_residual /= R;
  }
  return result;
}

std::string cell_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "t,rms_te,mean_fpte,mean_bias,bound,mean_fp_residual,n_runs\n";
  for (const auto& r : rows)
    os << r.t << ',' << format_real(r.rms_te) << ',' << format_real(r.mean_fpte) << ','
       << format_real(r.mean_bias) << ',' << format_real(r.mean_bound) << ',' << format_real(r.mean_fp_residual)
       << ',' << r.n_runs << '\n';
  return os.str();
}

void write_cell_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  atomic_write(path, cell_csv(rows));
}

std::string cell_file_name(const ExperimentConfig& cfg) {
  std::string name = cfg.scheme.is_discounted() ? "discounted_gamma" + format_short(cfg.scheme.gamma()) : "uniform";
  return name + "_E" + std::to_string(cfg.E) + ".csv";
}

}  // namespace dgdtrack
