// Domains are precompact open subsets built constructively: a union of
// metric balls minus a finite set of closed balls. The resolved form is a
// per-edge list of disjoint open intervals plus the set of included
// vertices; the boundary is the finite set of cut points.
#pragma once

#include <optional>
#include <vector>

#include "graphpot/metric_graph.hpp"

namespace graphpot {

struct BallSpec {
  GraphPoint center;
  double radius = 0.0;
};

struct DomainInterval {
  double a = 0.0, b = 0.0;   // open interval (a, b) in edge coordinates
  bool touches_u = false;    // a == 0 and vertex u included
  bool touches_v = false;    // b == l and vertex v included
};

class Domain {
 public:
  static Domain make(const MetricGraph& g, const std::vector<BallSpec>& balls,
                     const std::vector<BallSpec>& holes = {});
  // The whole (compact) graph as a boundaryless domain.
  static Domain whole(const MetricGraph& g);

  const MetricGraph& graph() const { return *graph_; }
  const std::vector<std::vector<DomainInterval>>& intervals() const { return intervals_; }
  const std::vector<DomainInterval>& intervals_on(int e) const { return intervals_[e]; }
  const std::vector<char>& vertex_included() const { return vertex_in_; }
  bool includes_vertex(int v) const { return vertex_in_[v] != 0; }
  const std::vector<GraphPoint>& boundary_points() const { return boundary_; }

  double measure() const { return measure_; }
  bool connected() const { return connected_; }
  GraphPoint anchor() const { return anchor_; }

  // Constructive description (empty for whole-graph domains).
  const std::vector<BallSpec>& balls() const { return balls_; }
  const std::vector<BallSpec>& holes() const { return holes_; }
  // This domain minus the closed balls of `other` (other must be pure balls).
  Domain minus(const Domain& other) const;

  bool contains(GraphPoint p) const;
  // Component id of the point (-1 when outside); components index the
  // connected pieces of the open set.
  int component_of(GraphPoint p) const;
  int num_components() const { return num_components_; }

 private:
  const MetricGraph* graph_ = nullptr;
  std::vector<BallSpec> balls_, holes_;
  std::vector<std::vector<DomainInterval>> intervals_;
  std::vector<int> interval_component_;  // flattened per interval
  std::vector<int> interval_offset_;     // prefix index per edge
  std::vector<char> vertex_in_;
  std::vector<int> vertex_component_;
  std::vector<GraphPoint> boundary_;
  double measure_ = 0.0;
  bool connected_ = false;
  int num_components_ = 0;
  GraphPoint anchor_;

  void resolve_components();
};

}  // namespace graphpot
