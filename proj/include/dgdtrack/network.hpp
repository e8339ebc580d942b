#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dgdtrack/rng.hpp"

namespace dgdtrack {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected agent graph. Edges are stored once as (i, j) with i < j,
/// sorted lexicographically.
struct Graph {
  int n_agents = 0;
  std::vector<Point> positions;  // empty for graphs built from an edge list
  std::vector<std::pair<int, int>> edges;
  double radius_used = 0.0;

  std::vector<int> degrees() const;
  bool has_edge(int i, int j) const;
  int component_count() const;
  bool connected() const { return component_count() == 1; }
};

/// Builds a graph directly from an edge list (no geometry). Duplicate edges
/// are merged; self-loops and out-of-range endpoints are rejected.
Graph graph_from_edges(int n_agents, std::vector<std::pair<int, int>> edges);

/// Connects fixed positions at radius initial_radius * growth_factor^k for
/// the smallest k >= 0 that yields a connected graph.
Graph connect_within_radius(std::vector<Point> positions, double initial_radius,
                            double growth_factor);

/// Random geometric graph on n_agents points drawn area-uniformly in the
/// unit disk, with the connection radius grown until the graph is connected.
Graph generate_rgg(int n_agents, double initial_radius, double growth_factor, Rng& rng);

struct MixingMatrix {
  Eigen::MatrixXd entries;
  Eigen::VectorXd spectrum;  // descending
  double lambda2 = 0.0;      // second-largest eigenvalue; 1 for a single agent
  double lambdaN = 0.0;
  double topology_factor = 0.0;  // 1 / (1 - lambda2); +inf for a single agent

  int size() const { return static_cast<int>(entries.rows()); }
};

/// Eigendecomposes a symmetric mixing matrix and fills in its spectral
/// summary. Each eigenpair is checked to residual 1e-8.
MixingMatrix analyze_mixing(Eigen::MatrixXd entries);

/// Metropolis weights: 1 / (1 + max(d_i, d_j)) on edges, the diagonal takes
/// the remainder of each row. Throws LogicError for a disconnected graph.
MixingMatrix metropolis_mixing(const Graph& graph);

/// Largest step size for which one DGD map contracts with factor 1 - eta*mu:
/// (1 + lambda_N) / (L + mu).
double max_stable_step(const MixingMatrix& mix, double mu, double L);

/// Lists every violated mixing-matrix invariant (symmetry, row and column
/// sums, sparsity pattern, spectrum). Empty when the matrix is valid.
std::vector<std::string> mixing_violations(const Graph& graph, const MixingMatrix& mix);

void write_edge_list_csv(const std::filesystem::path& path, const Graph& graph);
void write_mixing_csv(const std::filesystem::path& path, const MixingMatrix& mix);

}  // namespace dgdtrack
