#include "dgdtrack/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kRowSumTol = 1e-12;
constexpr double kTopEigenTol = 1e-10;
constexpr double kEigenResidualTol = 1e-8;

std::vector<std::pair<int, int>> edges_within(const std::vector<Point>& pts, double radius) {
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= radius) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n_agents, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::pair{i, j});
}

int Graph::component_count() const {
  std::vector<std::vector<int>> adj(n_agents);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<int> parent(n_agents);
  for (int i = 0; i < n_agents; ++i) parent[i] = i;
  // Union-find; BFS is kept for the test oracle.
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_agents;
  for (auto [i, j] : edges) {
    const int a = find(i);
    const int b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

Graph graph_from_edges(int n_agents, std::vector<std::pair<int, int>> edges) {
  if (n_agents < 1) throw ParameterError("graph needs at least one agent");
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n_agents || j >= n_agents)
      throw ParameterError("edge endpoint out of range");
    if (i == j) throw ParameterError("self-loop in edge list");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.n_agents = n_agents;
  g.edges = std::move(edges);
  g.radius_used = std::numeric_limits<double>::quiet_NaN();
  return g;
}

Graph connect_within_radius(std::vector<Point> positions, double initial_radius,
                            double growth_factor) {
  if (positions.empty()) throw ParameterError("graph needs at least one agent");
  if (!std::isfinite(initial_radius) || initial_radius <= 0.0)
    throw ParameterError("initial radius must be finite and positive");
  if (!std::isfinite(growth_factor) || growth_factor <= 1.0)
    throw ParameterError("radius growth factor must be finite and > 1");

  Graph g;
  g.n_agents = static_cast<int>(positions.size());
  g.positions = std::move(positions);

  double max_dist = 0.0;
  for (const auto& p : g.positions)
    for (const auto& q : g.positions) max_dist = std::max(max_dist, std::hypot(p.x - q.x, p.y - q.y));

  for (int k = 0;; ++k) {
    const double radius = initial_radius * std::pow(growth_factor, k);
    g.edges = edges_within(g.positions, radius);
    g.radius_used = radius;
    if (g.connected()) return g;
    // Once the radius covers every pair the graph is complete.
    if (radius > max_dist) throw LogicError("radius growth failed to connect the graph");
  }
}

Graph generate_rgg(int n_agents, double initial_radius, double growth_factor, Rng& rng) {
  if (n_agents < 1) throw ParameterError("graph needs at least one agent");
  if (!std::isfinite(initial_radius) || initial_radius <= 0.0)
    throw ParameterError("initial radius must be finite and positive");
  std::vector<Point> pts(n_agents);
  for (auto& p : pts) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform01();
    const double r = std::sqrt(rng.uniform01());
    p = {r * std::cos(angle), r * std::sin(angle)};
  }
  return connect_within_radius(std::move(pts), initial_radius, growth_factor);
}

MixingMatrix analyze_mixing(Eigen::MatrixXd entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols())
    throw LogicError("mixing matrix must be square and non-empty");
  MixingMatrix mix;
  mix.entries = std::move(entries);
  const int n = mix.size();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mix.entries);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  // Eigen returns ascending order.
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  for (int k = 0; k < n; ++k) {
    const double residual = (mix.entries * vecs.col(k) - vals(k) * vecs.col(k)).norm();
    if (residual > kEigenResidualTol) {
      std::ostringstream os;
      os << "eigenpair " << k << " residual " << residual << " exceeds " << kEigenResidualTol;
      throw NumericalError(os.str());
    }
  }
  mix.spectrum = vals.reverse();
  mix.lambdaN = mix.spectrum(n - 1);
  if (n == 1) {
    mix.lambda2 = 1.0;
    mix.topology_factor = std::numeric_limits<double>::infinity();
  } else {
    mix.lambda2 = mix.spectrum(1);
    mix.topology_factor = 1.0 / (1.0 - mix.lambda2);
  }
  return mix;
}

MixingMatrix metropolis_mixing(const Graph& graph) {
  if (!graph.connected())
    throw LogicError("metropolis_mixing requires a connected graph (lambda2 would equal 1)");
  const int n = graph.n_agents;
  const auto deg = graph.degrees();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : graph.edges) {
    const double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    m(i, j) = w;
    m(j, i) = w;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += m(i, j);
    m(i, i) = 1.0 - off;
  }
  return analyze_mixing(std::move(m));
}

double max_stable_step(const MixingMatrix& mix, double mu, double L) {
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L))
    throw ParameterError("need 0 < mu <= L");
  return (1.0 + mix.lambdaN) / (L + mu);
}

std::vector<std::string> mixing_violations(const Graph& graph, const MixingMatrix& mix) {
  std::vector<std::string> out;
  const auto& m = mix.entries;
  const int n = mix.size();
  auto report = [&](const std::string& name, double value) {
    std::ostringstream os;
    os.precision(17);
    os << name << " (worst deviation " << value << ")";
    out.push_back(os.str());
  };
  if (n != graph.n_agents) {
    out.push_back("size: mixing matrix does not match graph");
    return out;
  }
  if (const double asym = (m - m.transpose()).cwiseAbs().maxCoeff(); asym > kSymmetryTol)
    report("symmetry", asym);
  if (const double rs = (m.rowwise().sum().array() - 1.0).abs().maxCoeff(); rs > kRowSumTol)
    report("row-sum", rs);
  if (const double cs = (m.colwise().sum().array() - 1.0).abs().maxCoeff(); cs > kRowSumTol)
    report("column-sum", cs);
  double pattern = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !graph.has_edge(i, j)) pattern = std::max(pattern, std::abs(m(i, j)));
  if (pattern > 0.0) report("sparsity", pattern);
  if (const double top = std::abs(mix.spectrum(0) - 1.0); top > kTopEigenTol)
    report("lambda1", top);
  if (n > 1 && !(mix.lambda2 < 1.0)) report("lambda2", mix.lambda2 - 1.0);
  if (!(mix.lambdaN > -1.0)) report("lambdaN", -1.0 - mix.lambdaN);
  return out;
}

void write_edge_list_csv(const std::filesystem::path& path, const Graph& graph) {
  std::ostringstream os;
  os << "i,j,distance\n";
  for (auto [i, j] : graph.edges) {
    os << i << ',' << j << ',';
    if (graph.positions.empty()) {
      os << "nan";
    } else {
      const auto& p = graph.positions[i];
      const auto& q = graph.positions[j];
      os << format_real(std::hypot(p.x - q.x, p.y - q.y));
    }
    os << '\n';
  }
  atomic_write(path, os.str());
}

void write_mixing_csv(const std::filesystem::path& path, const MixingMatrix& mix) {
  std::ostringstream os;
  for (int i = 0; i < mix.size(); ++i) {
    for (int j = 0; j < mix.size(); ++j) {
      if (j) os << ',';
      os << format_real(mix.entries(i, j));
    }
    os << '\n';
  }
  atomic_write(path, os.str());
}

}  // namespace dgdtrack
