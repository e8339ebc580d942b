#include "dgdtrack/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

namespace {

void refresh_global(StreamState& s) {
  const int d = s.dim();
  s.global_hessian.setZero(d);
  s.global_linear.setZero(d);
  for (int n = 0; n < s.n_agents(); ++n) {
    s.global_hessian += s.agent_hessian.segment(static_cast<Eigen::Index>(n) * d, d);
    s.global_linear += s.agent_linear.segment(static_cast<Eigen::Index>(n) * d, d);
  }
}

void check_batch(const StreamState& s, const SampleBatch& b) {
  if (b.hessian.size() != s.stacked_size() || b.centers.size() != s.stacked_size())
    throw LogicError("sample batch does not match the stream's N*d layout");
}

SampleBatch draw_hessians(const StreamParams& p, Eigen::VectorXd centers, Rng& rng) {
  const Eigen::Index nd = static_cast<Eigen::Index>(p.n_agents) * p.dim;
  SampleBatch b{Eigen::VectorXd(nd), std::move(centers)};
  if (p.homogeneous_agents) {
    for (int j = 0; j < p.dim; ++j) b.hessian(j) = rng.uniform(p.mu, p.L);
    for (int n = 1; n < p.n_agents; ++n) b.hessian.segment(static_cast<Eigen::Index>(n) * p.dim, p.dim) = b.hessian.head(p.dim);
  } else {
    for (Eigen::Index k = 0; k < nd; ++k) b.hessian(k) = rng.uniform(p.mu, p.L);
  }
  return b;
}

Eigen::VectorXd walk(const StreamParams& p, const Eigen::VectorXd& centers, Rng& rng) {
  Eigen::VectorXd next(centers.size());
  const double sd = std::sqrt(p.sigma2);
  const Eigen::Index drawn = p.homogeneous_agents ? p.dim : centers.size();
  for (Eigen::Index k = 0; k < drawn; ++k) next(k) = clip_step(centers(k), sd * rng.normal(), p.c_max);
  for (Eigen::Index k = drawn; k < centers.size(); ++k) next(k) = next(k % p.dim);
  return next;
}

}  // namespace

void StreamParams::validate() const {
  if (n_agents < 1) throw ParameterError("n_agents must be >= 1");
  if (dim < 1) throw ParameterError("dim must be >= 1");
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L)) throw ParameterError("need 0 < mu <= L");
  if (!(c_max > 0.0) || !std::isfinite(c_max)) throw ParameterError("C_max must be positive");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw ParameterError("sigma2 must be >= 0");
}

double clip_step(double center, double increment, double c_max) {
  return std::max(-c_max, std::min(center + increment, c_max));
}

StreamState init_stream(const StreamParams& params, Rng& rng) {
  params.validate();
  const Eigen::Index nd = static_cast<Eigen::Index>(params.n_agents) * params.dim;
  Eigen::VectorXd c0(nd);
  const Eigen::Index drawn = params.homogeneous_agents ? params.dim : nd;
  for (Eigen::Index k = 0; k < drawn; ++k) c0(k) = rng.uniform(-params.c_max, params.c_max);
  for (Eigen::Index k = drawn; k < nd; ++k) c0(k) = c0(k % params.dim);
  auto c1 = walk(params, c0, rng);
  return start_stream(params, draw_hessians(params, std::move(c1), rng));
}

StreamState start_stream(const StreamParams& params, SampleBatch first) {
  params.validate();
  StreamState s;
  s.params = params;
  check_batch(s, first);
  s.t = 1;
  s.agent_hessian = first.hessian;
  s.agent_linear = first.hessian.cwiseProduct(first.centers);
  refresh_global(s);
  if (params.retain_history) s.history.push_back(first);
  s.latest = std::move(first);
  return s;
}

SampleBatch step_drift(const StreamState& state, Rng& rng) {
  return draw_hessians(state.params, walk(state.params, state.latest.centers, rng), rng);
}

void ingest_sample(StreamState& state, const SampleBatch& sample, WeightRecursion& clock) {
  check_batch(state, sample);
  if (clock.t() != state.t)
    throw LogicError("weight clock at t=" + std::to_string(clock.t()) + " but stream at t=" +
                     std::to_string(state.t));
  const auto [old_c, new_c] = clock.advance();
  state.agent_hessian = old_c * state.agent_hessian + new_c * sample.hessian;
  state.agent_linear = old_c * state.agent_linear + new_c * sample.hessian.cwiseProduct(sample.centers);
  refresh_global(state);
  state.latest = sample;
  if (state.params.retain_history) state.history.push_back(sample);
  ++state.t;
}

void weighted_gradient(const StreamState& state, const Eigen::VectorXd& w, Eigen::VectorXd& out) {
  if (w.size() != state.stacked_size()) throw LogicError("iterate length is not N*d");
  out.resize(w.size());
  out.array() = state.agent_hessian.array() * w.array() - state.agent_linear.array();
}

Eigen::VectorXd weighted_gradient(const StreamState& state, const Eigen::VectorXd& w) {
  Eigen::VectorXd g;
  weighted_gradient(state, w, g);
  return g;
}

void write_stream_csv(const std::filesystem::path& path, const StreamState& state) {
  if (!state.params.retain_history || static_cast<int>(state.history.size()) != state.t)
    throw LogicError("stream dump requires retain_history from t=1");
  std::ostringstream os;
  os << "t,agent,coord,center,hessian\n";
  const int d = state.dim();
  for (std::size_t i = 0; i < state.history.size(); ++i) {
    const auto& b = state.history[i];
    for (int n = 0; n < state.n_agents(); ++n)
      for (int j = 0; j < d; ++j) {
        const Eigen::Index k = static_cast<Eigen::Index>(n) * d + j;
        os << i + 1 << ',' << n << ',' << j << ',' << format_real(b.centers(k)) << ','
           << format_real(b.hessian(k)) << '\n';
      }
  }
  atomic_write(path, os.str());
}

std::vector<SampleBatch> read_stream_csv(const std::filesystem::path& path, int n_agents, int dim) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "t,agent,coord,center,hessian")
    throw LogicError("stream dump has an unexpected header");
  const Eigen::Index nd = static_cast<Eigen::Index>(n_agents) * dim;
  std::vector<SampleBatch> out;
  std::vector<std::vector<bool>> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f[5];
    for (auto& s : f)
      if (!std::getline(row, s, ',')) throw LogicError("stream dump line " + std::to_string(line_no) + " is short");
    const int t = std::stoi(f[0]);
    const int n = std::stoi(f[1]);
    const int j = std::stoi(f[2]);
    if (t < 1 || n < 0 || n >= n_agents || j < 0 || j >= dim)
      throw LogicError("stream dump line " + std::to_string(line_no) + " is out of range");
    while (static_cast<int>(out.size()) < t) {
      out.push_back({Eigen::VectorXd::Zero(nd), Eigen::VectorXd::Zero(nd)});
      seen.emplace_back(static_cast<std::size_t>(nd), false);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(n) * dim + j;
    out[t - 1].centers(k) = std::stod(f[3]);
    out[t - 1].hessian(k) = std::stod(f[4]);
    seen[t - 1][static_cast<std::size_t>(k)] = true;
  }
  for (const auto& s : seen)
    if (std::find(s.begin(), s.end(), false) != s.end()) throw LogicError("stream dump is missing entries");
  return out;
}

StreamState replay_stream(const StreamParams& params, const std::vector<SampleBatch>& samples,
                          const WeightScheme& scheme) {
  if (samples.empty()) throw LogicError("cannot replay an empty stream");
  StreamState s = start_stream(params, samples.front());
  WeightRecursion clock(scheme);
  for (std::size_t i = 1; i < samples.size(); ++i) ingest_sample(s, samples[i], clock);
  return s;
}

}  // namespace dgdtrack
