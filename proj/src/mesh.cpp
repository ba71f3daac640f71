#include "graphpot/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace graphpot {

Mesh Mesh::build(const Domain& domain, double h_target) {
  const MetricGraph& g = domain.graph();
  if (!(h_target > 0)) fail(ErrorCode::StepTooLarge, "h must be positive");
  if (h_target > g.min_edge_length() / 2 + 1e-12)
    fail(ErrorCode::StepTooLarge, "h must not exceed half the shortest edge");
  if (domain.measure() <= 0) fail(ErrorCode::EmptyDomain, "empty domain");

  Mesh m;
  m.domain_ = &domain;
  m.h_target_ = h_target;
  m.nodes_on_edge_.assign(g.num_edges(), {});

  std::map<int, int> vertex_node;       // graph vertex -> node id
  auto node_at_vertex = [&](int v, bool boundary) {
    auto it = vertex_node.find(v);
    if (it != vertex_node.end()) return it->second;
    MeshNode n;
    n.point = g.vertex_point(v);
    n.vertex = v;
    n.boundary = boundary;
    int id = static_cast<int>(m.nodes_.size());
    m.nodes_.push_back(n);
    vertex_node.emplace(v, id);
    return id;
  };

  double min_step = std::numeric_limits<double>::infinity(), max_step = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    for (const DomainInterval& iv : domain.intervals_on(e)) {
      const double L = iv.b - iv.a;
      int nseg = std::max(2, static_cast<int>(std::ceil(L / h_target - 1e-9)));
      const double step = L / nseg;
      min_step = std::min(min_step, step);
      max_step = std::max(max_step, step);

      std::vector<int> chain(nseg + 1, -1);
      // endpoint a
      if (iv.touches_u) {
        chain[0] = node_at_vertex(ed.u, false);
      } else if (auto v = g.at_vertex(GraphPoint{e, iv.a}); v && !domain.includes_vertex(*v)) {
        chain[0] = node_at_vertex(*v, true);
      } else {
        MeshNode n;
        n.point = GraphPoint{e, iv.a};
        n.boundary = true;
        chain[0] = static_cast<int>(m.nodes_.size());
        m.nodes_.push_back(n);
      }
      // endpoint b
      if (iv.touches_v) {
        chain[nseg] = node_at_vertex(ed.v, false);
      } else if (auto v = g.at_vertex(GraphPoint{e, iv.b}); v && !domain.includes_vertex(*v)) {
        chain[nseg] = node_at_vertex(*v, true);
      } else {
        MeshNode n;
        n.point = GraphPoint{e, iv.b};
        n.boundary = true;
        chain[nseg] = static_cast<int>(m.nodes_.size());
        m.nodes_.push_back(n);
      }
      for (int j = 1; j < nseg; ++j) {
        MeshNode n;
        n.point = GraphPoint{e, iv.a + j * step};
        chain[j] = static_cast<int>(m.nodes_.size());
        m.nodes_.push_back(n);
      }
      for (int j = 0; j < nseg; ++j)
        m.segments_.push_back({chain[j], chain[j + 1], step});
      for (int id : chain) m.nodes_on_edge_[e].push_back(id);
    }
  }

  for (const MeshSegment& s : m.segments_) {
    m.nodes_[s.a].mass += s.len / 2;
    m.nodes_[s.b].mass += s.len / 2;
  }
  m.adj_.assign(m.nodes_.size(), {});
  for (const MeshSegment& s : m.segments_) {
    m.adj_[s.a].push_back({s.b, s.len});
    m.adj_[s.b].push_back({s.a, s.len});
  }
  for (int i = 0; i < m.num_nodes(); ++i) {
    m.total_mass_ += m.nodes_[i].mass;
    (m.nodes_[i].boundary ? m.boundary_ : m.interior_).push_back(i);
  }
  for (auto& list : m.nodes_on_edge_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  m.step_ = 0.5 * (min_step + max_step);
  m.max_dev_ = max_step - min_step;
  m.uniform_ = m.max_dev_ <= 1e-12 * std::max(1.0, max_step);
  if (m.uniform_) m.step_ = max_step;
  return m;
}

std::optional<int> Mesh::find_node(GraphPoint p, double tol) const {
  const MetricGraph& g = graph();
  g.validate_point(p);
  p = g.canonical(p);
  if (auto v = g.at_vertex(p)) {
    for (int e : g.incident(*v))
      for (int id : nodes_on_edge_[e])
        if (nodes_[id].vertex == *v) return id;
    return std::nullopt;
  }
  for (int id : nodes_on_edge_[p.edge])
    if (nodes_[id].vertex < 0 && nodes_[id].point.edge == p.edge &&
        std::abs(nodes_[id].point.offset - p.offset) <= tol)
      return id;
  return std::nullopt;
}

int Mesh::nearest_node(GraphPoint p) const {
  if (auto hit = find_node(p)) return *hit;
  auto dist = node_distances_from(p);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_nodes(); ++i) {
    if (nodes_[i].boundary) continue;
    if (dist[i] < best_d - 1e-15) {
      best_d = dist[i];
      best = i;
    }
  }
  if (best < 0) fail(ErrorCode::EmptyDomain, "mesh has no interior nodes");
  return best;
}

std::vector<double> Mesh::node_distances_from(GraphPoint q) const {
  const MetricGraph& g = graph();
  auto vdist = g.distances_from_point(q);
  std::vector<double> out(num_nodes(), 0.0);
  for (int i = 0; i < num_nodes(); ++i) {
    const GraphPoint& p = nodes_[i].point;
    if (nodes_[i].vertex >= 0) {
      out[i] = vdist[nodes_[i].vertex];
      continue;
    }
    const Edge& ed = g.edge(p.edge);
    double d = std::min(p.offset + vdist[ed.u], (ed.length - p.offset) + vdist[ed.v]);
    if (p.edge == q.edge && !g.at_vertex(q))
      d = std::min(d, std::abs(p.offset - q.offset));
    out[i] = d;
  }
  return out;
}

}  // namespace graphpot
