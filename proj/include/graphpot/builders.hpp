// Builders for the test families: paths, cycles, regular trees, Cayley
// balls of free products / free groups, and the theta-tree (one cycle plus
// tree branches). Infinite families come back as combinatorial balls with
// truncation metadata set.
#pragma once

#include <string>
#include <vector>

#include "graphpot/metric_graph.hpp"

namespace graphpot {

enum class GraphFamily {
  Explicit,
  Path,
  Cycle,
  RegularTree,
  CayleyZ2Z3,
  CayleyFree,
  ThetaTree,
};

struct GraphSpec {
  GraphFamily family = GraphFamily::Path;
  int n = 0;            // path/cycle vertex count, tree degree-dependent use below
  int degree = 3;       // regular tree degree, free group rank
  int radius = 0;       // tree depth / Cayley radius / theta branch depth
  int cycle_len = 4;    // theta-tree cycle length
  double length = 1.0;  // common edge length
  int explicit_vertices = 0;
  std::vector<Edge> explicit_edges;

  // Spec strings as used on the CLI, e.g. "path(9,1.0)", "cycle(12,1.0)",
  // "tree(3,8,1.0)", "cayley(z2z3,10,1.0)", "cayley(free2,6,1.0)",
  // "theta(6,3,1.0)".
  static GraphSpec parse(const std::string& text);
  std::string to_string() const;
};

MetricGraph build_graph(const GraphSpec& spec);

MetricGraph build_path(int n, double length);
MetricGraph build_cycle(int n, double length);
MetricGraph build_regular_tree(int degree, int depth, double length);
MetricGraph build_cayley_z2z3(int radius, double length);
MetricGraph build_cayley_free(int rank, int radius, double length);
MetricGraph build_theta_tree(int cycle_len, int branch_depth, double length);

// Stable content hash of the graph (used in output file names).
std::string graph_hash(const MetricGraph& g);

}  // namespace graphpot
