// Metric graphs: finite combinatorial graphs whose edges carry positive
// lengths, glued into a geodesic metric space. Points live on edges as
// (edge id, offset); offsets 0 and l_e canonicalize to the incident vertex
// so a vertex has a single representation.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphpot/errors.hpp"

namespace graphpot {

struct Edge {
  int u = -1;      // initial vertex
  int v = -1;      // terminal vertex
  double length = 0.0;
};

struct GraphPoint {
  int edge = -1;
  double offset = 0.0;
};

class MetricGraph {
 public:
  MetricGraph(int num_vertices, std::vector<Edge> edges);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  int degree(int v) const { return static_cast<int>(incident_[v].size()); }
  const std::vector<int>& incident(int v) const { return incident_[v]; }

  double min_edge_length() const { return min_len_; }
  double max_edge_length() const { return max_len_; }
  double total_length() const { return total_len_; }

  // Truncation metadata for graphs that stand in for an infinite family
  // (ball of the given combinatorial radius); negative when the graph is
  // the exact object.
  double truncation_radius() const { return truncation_radius_; }
  void set_truncation_radius(double r) { truncation_radius_ = r; }

  GraphPoint vertex_point(int v) const;
  // Snaps offsets at 0 / l_e to the canonical vertex representation.
  GraphPoint canonical(GraphPoint p) const;
  // Vertex id when the point sits at a vertex (after canonicalization).
  std::optional<int> at_vertex(GraphPoint p) const;
  bool same_point(GraphPoint p, GraphPoint q, double tol = 1e-9) const;
  void validate_point(GraphPoint p) const;

  // Shortest-path distances. Point variants handle the same-edge shortcut.
  std::vector<double> distances_from_vertex(int v) const;
  std::vector<double> distances_from_point(GraphPoint p) const;
  double distance(GraphPoint p, GraphPoint q) const;

  // Geodesic as endpoint + intermediate vertex waypoints + endpoint.
  // Ties between equal-length routes break toward the lowest edge id.
  std::vector<GraphPoint> geodesic(GraphPoint p, GraphPoint q) const;

  double gromov_product(GraphPoint base, GraphPoint y, GraphPoint z) const;

  // Number of points at distance exactly s from x (finite for s generic).
  int sphere_cardinality(GraphPoint x, double s) const;
  double ball_measure(GraphPoint x, double r) const;

  std::string to_json() const;
  static MetricGraph from_json(const std::string& text);

 private:
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  double min_len_ = 0.0, max_len_ = 0.0, total_len_ = 0.0;
  double truncation_radius_ = -1.0;
};

// 4-point hyperbolicity estimate over all ordered 4-tuples of the sample:
// max of min((x|z)_w, (y|z)_w) - (x|y)_w, floored at zero.
double delta_estimate(const MetricGraph& g, const std::vector<GraphPoint>& sample);

}  // namespace graphpot
