#include "dgdtrack/validation.hpp"

#include <cmath>
#include <sstream>

#include "dgdtrack/dgd.hpp"
#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"
#include "dgdtrack/oracle.hpp"
#include "dgdtrack/theory.hpp"

namespace dgdtrack {

namespace {

class Suite {
 public:
  template <class F>
  void check(const std::string& name, F&& body) {
    CheckResult r{name, CheckStatus::pass, {}};
    try {
      body(r);
    } catch (const std::exception& e) {
      r.status = CheckStatus::fail;
      r.detail = std::string("exception: ") + e.what();
    }
    report.checks.push_back(std::move(r));
  }

  ValidationReport report;
};

void fail_if(CheckResult& r, bool bad, const std::string& detail) {
  if (bad && r.status != CheckStatus::fail) {
    r.status = CheckStatus::fail;
    r.detail = detail;
  }
}

std::string at(int t, double lhs, double rhs) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << t << ": " << lhs << " > " << rhs;
  return os.str();
}

StackedIterate random_iterate(Rng& rng, int n, int d, double scale) {
  StackedIterate w(n, d);
  for (Eigen::Index k = 0; k < w.data().size(); ++k) w.data()(k) = scale * rng.uniform(-1.0, 1.0);
  return w;
}

}  // namespace

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  return true;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.status == CheckStatus::pass ? "PASS " : c.status == CheckStatus::fail ? "FAIL " : "SKIP ") << c.name;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  return os.str();
}

ValidationReport run_validation(const ExperimentConfig& cfg, const ValidationOptions& options) {
  cfg.validate();
  Suite suite;
  Topology topo = shared_topology(cfg);
  if (options.corrupt_mixing) options.corrupt_mixing(topo.mix);
  const MixingMatrix& mix = topo.mix;
  const int N = cfg.n_agents;
  const int d = cfg.dim;
  Rng rng(options.seed);

  suite.check("network.connected", [&](CheckResult& r) {
    fail_if(r, !topo.graph.connected(), "graph has " + std::to_string(topo.graph.component_count()) + " components");
  });
  for (const char* name : {"symmetry", "row-sum", "column-sum", "sparsity", "lambda1", "lambda2", "lambdaN"}) {
    suite.check(std::string("mixing.") + name, [&](CheckResult& r) {
      for (const auto& v : mixing_violations(topo.graph, mix))
        if (v.rfind(name, 0) == 0) fail_if(r, true, v);
    });
  }

  suite.check("weights.simplex", [&](CheckResult& r) {
    for (int t = 1; t <= 500; ++t) {
      const auto a = weights(cfg.scheme, t);
      double sum = 0.0;
      for (double v : a) {
        fail_if(r, v < 0.0 || v > 1.0, "weight outside [0,1] at t=" + std::to_string(t));
        sum += v;
      }
      fail_if(r, std::abs(sum - 1.0) > 1e-12, "weights at t=" + std::to_string(t) + " sum to " + format_real(sum));
    }
  });
  suite.check("weights.recursion", [&](CheckResult& r) {
    auto prev = weights(cfg.scheme, 1);
    WeightRecursion clock(cfg.scheme);
    for (int t = 1; t < 500; ++t) {
      const auto c = clock.advance();
      fail_if(r, std::abs(c.old_coeff + c.new_coeff - 1.0) > 1e-14, "coefficients do not sum to 1 at t=" + std::to_string(t));
      const auto next = weights(cfg.scheme, t + 1);
      for (int i = 0; i < t; ++i)
        fail_if(r, std::abs(c.old_coeff * prev[i] - next[i]) > 1e-12, "recursion mismatch at t=" + std::to_string(t + 1));
      fail_if(r, std::abs(c.new_coeff - next[t]) > 1e-12, "new-sample weight mismatch at t=" + std::to_string(t + 1));
      prev = next;
    }
  });

  suite.check("stream.recursion_equivalence", [&](CheckResult& r) {
    StreamParams p = cfg.stream_params();
    p.retain_history = true;
    Rng srng(substream_seed(options.seed, "stream"));
    StreamState s = init_stream(p, srng);
    WeightRecursion clock(cfg.scheme);
    const int T = std::min(cfg.horizon, 200);
    for (int t = 1; t <= T; ++t) {
      if (t > 1) ingest_sample(s, step_drift(s, srng), clock);
      const auto a = weights(cfg.scheme, t);
      Eigen::VectorXd H = Eigen::VectorXd::Zero(s.stacked_size());
      Eigen::VectorXd b = Eigen::VectorXd::Zero(s.stacked_size());
      for (int i = 0; i < t; ++i) {
        H += a[i] * s.history[i].hessian;
        b += a[i] * s.history[i].hessian.cwiseProduct(s.history[i].centers);
      }
      const double eh = (H - s.agent_hessian).norm() / H.norm();
      const double eb = (b - s.agent_linear).norm() / std::max(b.norm(), 1e-300);
      fail_if(r, eh > 1e-9 || eb > 1e-9, "accumulators deviate from direct sums at t=" + std::to_string(t));
      fail_if(r, (s.agent_hessian.array() < cfg.mu * (1 - 1e-12)).any() || (s.agent_hessian.array() > cfg.L * (1 + 1e-12)).any(),
              "weighted Hessian left [mu, L] at t=" + std::to_string(t));
      fail_if(r, (s.latest.centers.array().abs() > cfg.c_max).any(), "center left [-C_max, C_max] at t=" + std::to_string(t));
    }
  });

  // Frozen objective for the operator checks.
  Rng frng(substream_seed(options.seed, "frozen"));
  StreamState frozen = init_stream(cfg.stream_params(), frng);
  {
    WeightRecursion clock(cfg.scheme);
    for (int t = 1; t < 5; ++t) ingest_sample(frozen, step_drift(frozen, frng), clock);
  }
  const bool stable = cfg.eta <= max_stable_step(mix, cfg.mu, cfg.L);

  suite.check("dgd.contraction", [&](CheckResult& r) {
    if (!stable) {
      r.status = CheckStatus::skip;
      r.detail = "warning: eta exceeds (1+lambda_N)/(L+mu); contraction not guaranteed";
      return;
    }
    DgdEngine engine(mix, cfg.eta, cfg.mu, cfg.L);
    StackedIterate pu(N, d), pv(N, d);
    const double factor = 1.0 - cfg.eta * cfg.mu;
    for (int k = 0; k < options.random_pairs; ++k) {
      const auto u = random_iterate(rng, N, d, cfg.c_max);
      const auto v = random_iterate(rng, N, d, cfg.c_max);
      engine.phi_step(frozen, u, pu);
      engine.phi_step(frozen, v, pv);
      const double lhs = (pu.data() - pv.data()).norm();
      const double rhs = factor * (u.data() - v.data()).norm() * (1.0 + 1e-10);
      fail_if(r, lhs > rhs, "pair " + std::to_string(k) + ": " + format_real(lhs) + " > " + format_real(rhs));
    }
  });

  suite.check("dgd.affine", [&](CheckResult& r) {
    DgdEngine engine(mix, cfg.eta, cfg.mu, cfg.L, true);
    StackedIterate a(N, d), b(N, d), c(N, d), z(N, d), zero(N, d);
    for (int k = 0; k < 10; ++k) {
      const auto u = random_iterate(rng, N, d, 1.0);
      const auto v = random_iterate(rng, N, d, 1.0);
      const StackedIterate sum(u.data() + v.data(), N, d);
      engine.phi_step(frozen, sum, a);
      engine.phi_step(frozen, u, b);
      engine.phi_step(frozen, v, c);
      engine.phi_step(frozen, zero, z);
      const double err = (a.data() - b.data() - c.data() + z.data()).cwiseAbs().maxCoeff();
      fail_if(r, err > 1e-12, "affinity defect " + format_real(err));
    }
  });

  suite.check("oracle.fixed_point", [&](CheckResult& r) {
    const auto direct = fixed_point(mix, frozen, cfg.eta);
    const double res = fixed_point_residual(mix, frozen, cfg.eta, direct);
    fail_if(r, res > kFixedPointResidualGate, "residual " + format_real(res));
    if (!stable) return;
    DgdEngine engine(mix, cfg.eta, cfg.mu, cfg.L);
    StackedIterate w(N, d);
    for (int k = 0; k < options.banach_iterations; ++k) {
      engine.run_inner(frozen, 1, w);
      if ((k & 1023) == 0 && (w.data() - direct.data()).norm() < 1e-10) break;
    }
    const double gap = (w.data() - direct.data()).norm();
    fail_if(r, gap > 1e-7, "direct solve and Banach iteration differ by " + format_real(gap));
  });

  suite.check("theory.summation_envelopes", [&](CheckResult& r) {
    const double alpha = contraction_factor(cfg.eta, cfg.mu, cfg.E);
    const int t_max = 10000;
    if (cfg.scheme.is_discounted()) {
      const double g = cfg.scheme.gamma();
      const auto c = discounted_constants(alpha, g);
      for (std::int64_t t = c.t0; t <= t_max; ++t) {
        const double s = discounted_drift_sum(alpha, g, t);
        const double env = c.A_gamma * (1.0 - g) / (1.0 - std::pow(g, static_cast<double>(t)));
        fail_if(r, s > env * (1 + 1e-12), at(static_cast<int>(t), s, env));
      }
    } else {
      const auto c = uniform_constants(alpha);
      for (std::int64_t t = c.t0; t <= std::max<std::int64_t>(t_max, c.t0); ++t) {
        const double s = uniform_drift_sum(alpha, t);
        const double env = c.A / static_cast<double>(t);
        fail_if(r, s > env * (1 + 1e-12), at(static_cast<int>(t), s, env));
      }
    }
  });

  // Certifications along one simulated run.
  std::optional<RunTrace> trace;
  suite.check("run.simulate", [&](CheckResult&) { trace = run_trial(cfg, 0, &topo); });
  if (trace) {
    const auto& tc = trace->constants;
    suite.check("oracle.fp_residual", [&](CheckResult& r) {
      for (const auto& p : trace->points)
        fail_if(r, p.record.fp_residual > kFixedPointResidualGate,
                at(p.record.t, p.record.fp_residual, kFixedPointResidualGate));
    });
    suite.check("oracle.triangle", [&](CheckResult& r) {
      for (const auto& p : trace->points)
        fail_if(r, p.record.te > p.record.fpte + p.record.bias + 1e-9,
                at(p.record.t, p.record.te, p.record.fpte + p.record.bias));
    });
    suite.check("oracle.boundedness", [&](CheckResult& r) {
      for (const auto& p : trace->points) {
        fail_if(r, p.fixed_point_norm > tc.fixed_point_norm_bound(), at(p.record.t, p.fixed_point_norm, tc.fixed_point_norm_bound()));
        fail_if(r, p.minimizer_max_abs > cfg.c_max * (1 + 1e-12), at(p.record.t, p.minimizer_max_abs, cfg.c_max));
      }
    });
    suite.check("oracle.bias_certificate", [&](CheckResult& r) {
      for (const auto& p : trace->points)
        fail_if(r, p.record.bias > p.bias_envelope + 1e-9, at(p.record.t, p.record.bias, p.bias_envelope));
    });
    suite.check("oracle.drift_certificate", [&](CheckResult& r) {
      int checked = 0;
      for (const auto& p : trace->points) {
        if (!p.has_drift) continue;
        ++checked;
        fail_if(r, p.drift > p.drift_gradient + 1e-9, at(p.record.t, p.drift, p.drift_gradient));
        fail_if(r, p.drift > p.drift_envelope, at(p.record.t, p.drift, p.drift_envelope));
      }
      if (checked == 0 && cfg.horizon > 1) {
        r.status = CheckStatus::skip;
        r.detail = "no consecutive measurements (measure_stride > 1)";
      }
    });
    suite.check("theory.bound_domination", [&](CheckResult& r) {
      int checked = 0;
      for (const auto& p : trace->points) {
        if (p.record.t < trace->t0) continue;
        ++checked;
        fail_if(r, p.record.te > p.bound, at(p.record.t, p.record.te, p.bound));
      }
      if (checked == 0) {
        r.status = CheckStatus::skip;
        r.detail = "horizon ends before t0 = " + std::to_string(trace->t0);
      }
    });
  }
  return suite.report;
}

}  // namespace dgdtrack
