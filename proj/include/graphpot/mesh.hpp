// Uniform 1-D subdivision of a Domain. Every resolved interval of length L
// is split into ceil(L / h_target) equal segments (at least two), graph
// vertices inside the domain become shared nodes, and node masses carry the
// length measure: half of every incident segment.
#pragma once

#include <optional>
#include <vector>

#include "graphpot/domain.hpp"

namespace graphpot {

struct MeshNode {
  GraphPoint point;
  double mass = 0.0;
  bool boundary = false;
  int vertex = -1;  // graph vertex id when the node sits at one
};

struct MeshSegment {
  int a = -1, b = -1;
  double len = 0.0;
};

class Mesh {
 public:
  static Mesh build(const Domain& domain, double h_target);

  const Domain& domain() const { return *domain_; }
  const MetricGraph& graph() const { return domain_->graph(); }
  double h_target() const { return h_target_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const MeshNode& node(int i) const { return nodes_[i]; }
  const std::vector<MeshNode>& nodes() const { return nodes_; }
  const std::vector<MeshSegment>& segments() const { return segments_; }
  const std::vector<std::pair<int, double>>& neighbors(int i) const { return adj_[i]; }

  const std::vector<int>& interior_nodes() const { return interior_; }
  const std::vector<int>& boundary_nodes() const { return boundary_; }
  double total_mass() const { return total_mass_; }

  // All segments share one step length (required by the random walk).
  bool uniform() const { return uniform_; }
  double step() const { return step_; }          // uniform step (or mean)
  double max_step_deviation() const { return max_dev_; }

  std::optional<int> find_node(GraphPoint p, double tol = 1e-9) const;
  int nearest_node(GraphPoint p) const;          // snapping, interior preferred
  // Metric distance from q to every node (one Dijkstra, then O(1)/node).
  std::vector<double> node_distances_from(GraphPoint q) const;

 private:
  const Domain* domain_ = nullptr;
  double h_target_ = 0.0;
  std::vector<MeshNode> nodes_;
  std::vector<MeshSegment> segments_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<int> interior_, boundary_;
  std::vector<std::vector<int>> nodes_on_edge_;  // sorted by offset
  double total_mass_ = 0.0;
  bool uniform_ = true;
  double step_ = 0.0, max_dev_ = 0.0;
};

}  // namespace graphpot
