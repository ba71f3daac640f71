#include "graphpot/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <json.hpp>

namespace graphpot {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::RadiusExceedsTruncation: return "RadiusExceedsTruncation";
    case ErrorCode::SpectralBarrier: return "SpectralBarrier";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::LambdaAboveSpectrum: return "LambdaAboveSpectrum";
    case ErrorCode::NonConverged: return "NonConverged";
    case ErrorCode::PoleCollision: return "PoleCollision";
    case ErrorCode::PoleInsideEnlargedBall: return "PoleInsideEnlargedBall";
    case ErrorCode::BallExitsDomain: return "BallExitsDomain";
    case ErrorCode::StartOnBoundary: return "StartOnBoundary";
    case ErrorCode::StartMisplaced: return "StartMisplaced";
    case ErrorCode::ExcessTruncation: return "ExcessTruncation";
    case ErrorCode::NestingViolation: return "NestingViolation";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

MetricGraph::MetricGraph(int num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  if (num_vertices_ <= 0) fail(ErrorCode::Disconnected, "graph has no vertices");
  incident_.assign(num_vertices_, {});
  min_len_ = std::numeric_limits<double>::infinity();
  max_len_ = 0.0;
  total_len_ = 0.0;
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u < 0 || ed.u >= num_vertices_ || ed.v < 0 || ed.v >= num_vertices_)
      fail(ErrorCode::InvalidPoint, "edge endpoint out of range");
    if (!(ed.length > 0.0))
      fail(ErrorCode::InvalidLength, "edge length must be positive");
    incident_[ed.u].push_back(e);
    if (ed.v != ed.u) incident_[ed.v].push_back(e);
    min_len_ = std::min(min_len_, ed.length);
    max_len_ = std::max(max_len_, ed.length);
    total_len_ += ed.length;
  }
  if (edges_.empty()) fail(ErrorCode::Disconnected, "graph has no edges");
  for (int v = 0; v < num_vertices_; ++v)
    if (incident_[v].empty())
      fail(ErrorCode::Disconnected, "isolated vertex " + std::to_string(v));
  // connectivity check via BFS on vertices
  std::vector<char> seen(num_vertices_, 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  int count = 1;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int e : incident_[u]) {
      int w = edges_[e].u == u ? edges_[e].v : edges_[e].u;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        bfs.push(w);
      }
    }
  }
  if (count != num_vertices_) fail(ErrorCode::Disconnected, "graph is not connected");
}

GraphPoint MetricGraph::vertex_point(int v) const {
  if (v < 0 || v >= num_vertices_) fail(ErrorCode::InvalidPoint, "vertex out of range");
  int e = incident_[v].front();
  return GraphPoint{e, edges_[e].u == v ? 0.0 : edges_[e].length};
}

GraphPoint MetricGraph::canonical(GraphPoint p) const {
  validate_point(p);
  const Edge& ed = edges_[p.edge];
  double tol = 1e-12 * std::max(1.0, ed.length);
  if (p.offset <= tol) return vertex_point(ed.u);
  if (p.offset >= ed.length - tol) return vertex_point(ed.v);
  return p;
}

std::optional<int> MetricGraph::at_vertex(GraphPoint p) const {
  const Edge& ed = edges_[p.edge];
  double tol = 1e-12 * std::max(1.0, ed.length);
  if (p.offset <= tol) return ed.u;
  if (p.offset >= ed.length - tol) return ed.v;
  return std::nullopt;
}

bool MetricGraph::same_point(GraphPoint p, GraphPoint q, double tol) const {
  auto vp = at_vertex(p), vq = at_vertex(q);
  if (vp && vq) return *vp == *vq;
  if (vp || vq) return false;
  return p.edge == q.edge && std::abs(p.offset - q.offset) <= tol;
}

void MetricGraph::validate_point(GraphPoint p) const {
  if (p.edge < 0 || p.edge >= num_edges())
    fail(ErrorCode::InvalidPoint, "edge id out of range");
  const Edge& ed = edges_[p.edge];
  if (p.offset < -1e-12 || p.offset > ed.length + 1e-12)
    fail(ErrorCode::InvalidPoint, "offset outside edge");
}

std::vector<double> MetricGraph::distances_from_vertex(int v) const {
  if (v < 0 || v >= num_vertices_) fail(ErrorCode::InvalidPoint, "vertex out of range");
  std::vector<double> dist(num_vertices_, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[v] = 0.0;
  heap.push({0.0, v});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u] + 1e-15) continue;
    for (int e : incident_[u]) {
      int w = edges_[e].u == u ? edges_[e].v : edges_[e].u;
      double nd = d + edges_[e].length;
      if (nd < dist[w] - 1e-15) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

std::vector<double> MetricGraph::distances_from_point(GraphPoint p) const {
  validate_point(p);
  if (auto v = at_vertex(p)) return distances_from_vertex(*v);
  const Edge& ed = edges_[p.edge];
  std::vector<double> dist(num_vertices_, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[ed.u] = p.offset;
  dist[ed.v] = ed.length - p.offset;
  heap.push({dist[ed.u], ed.u});
  heap.push({dist[ed.v], ed.v});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u] + 1e-15) continue;
    for (int e : incident_[u]) {
      int w = edges_[e].u == u ? edges_[e].v : edges_[e].u;
      double nd = d + edges_[e].length;
      if (nd < dist[w] - 1e-15) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

double MetricGraph::distance(GraphPoint p, GraphPoint q) const {
  validate_point(p);
  validate_point(q);
  auto dist = distances_from_point(q);
  const Edge& ep = edges_[p.edge];
  double best = std::numeric_limits<double>::infinity();
  if (auto v = at_vertex(p)) {
    best = dist[*v];
  } else {
    best = std::min(p.offset + dist[ep.u], (ep.length - p.offset) + dist[ep.v]);
  }
  if (p.edge == q.edge && !at_vertex(p) && !at_vertex(q))
    best = std::min(best, std::abs(p.offset - q.offset));
  return best;
}

std::vector<GraphPoint> MetricGraph::geodesic(GraphPoint p, GraphPoint q) const {
  validate_point(p);
  validate_point(q);
  p = canonical(p);
  q = canonical(q);
  if (same_point(p, q)) return {p};
  const double total = distance(p, q);
  auto dist = distances_from_point(q);
  const double tol = 1e-12 * std::max(1.0, total);

  std::vector<GraphPoint> path;
  path.push_back(p);

  // Direct same-edge route wins when it realizes the distance.
  if (p.edge == q.edge && std::abs(std::abs(p.offset - q.offset) - total) <= tol) {
    path.push_back(q);
    return path;
  }

  // Remaining distance from a vertex u to q.
  auto remaining = [&](int u) { return dist[u]; };

  int cur;
  {
    // Step off p's edge toward the better endpoint.
    auto vp = at_vertex(p);
    if (vp) {
      cur = *vp;
    } else {
      const Edge& ed = edges_[p.edge];
      double via_u = p.offset + remaining(ed.u);
      double via_v = (ed.length - p.offset) + remaining(ed.v);
      cur = (via_u <= via_v + tol) ? ed.u : ed.v;
      path.push_back(vertex_point(cur));
    }
  }

  // Walk vertex to vertex, lowest edge id on ties; stop when q is reachable
  // directly along an incident edge.
  double guard = 0;
  while (guard++ < 4.0 * num_edges() + 8) {
    if (auto vq = at_vertex(q); vq && *vq == cur) break;
    // direct finish along an edge containing q
    if (!at_vertex(q)) {
      const Edge& eq = edges_[q.edge];
      if (eq.u == cur && std::abs(q.offset - remaining(cur)) <= tol) break;
      if (eq.v == cur && std::abs((eq.length - q.offset) - remaining(cur)) <= tol) break;
    }
    int best_edge = -1, best_next = -1;
    for (int e : incident_[cur]) {
      int w = edges_[e].u == cur ? edges_[e].v : edges_[e].u;
      if (std::abs(edges_[e].length + remaining(w) - remaining(cur)) <= tol * 10 + 1e-12) {
        if (best_edge < 0 || e < best_edge) {
          best_edge = e;
          best_next = w;
        }
      }
    }
    if (best_edge < 0) fail(ErrorCode::InvalidPoint, "geodesic reconstruction stalled");
    cur = best_next;
    path.push_back(vertex_point(cur));
  }
  if (!(at_vertex(q) && *at_vertex(q) == cur)) path.push_back(q);
  return path;
}

double MetricGraph::gromov_product(GraphPoint base, GraphPoint y, GraphPoint z) const {
  double dxy = distance(base, y);
  double dxz = distance(base, z);
  double dyz = distance(y, z);
  return std::max(0.0, 0.5 * (dxy + dxz - dyz));
}

int MetricGraph::sphere_cardinality(GraphPoint x, double s) const {
  validate_point(x);
  if (s <= 0) return s == 0 ? 1 : 0;
  auto dist = distances_from_point(x);
  int count = 0;
  const double tol = 1e-9;
  std::vector<char> vertex_counted(num_vertices_, 0);
  for (int v = 0; v < num_vertices_; ++v)
    if (std::abs(dist[v] - s) <= tol) {
      count += vertex_counted[v] ? 0 : 1;
      vertex_counted[v] = 1;
    }
  for (int e = 0; e < num_edges(); ++e) {
    const Edge& ed = edges_[e];
    double du = dist[ed.u], dv = dist[ed.v], l = ed.length;
    // interior crossing approached from u: offset t = s - du in (0, l),
    // valid while the route through u is minimal there.
    double tu = s - du;
    bool hit_u = tu > tol && tu < l - tol && tu <= (l + dv - du) / 2 + tol;
    double tv = s - dv;  // offset measured from v
    bool hit_v = tv > tol && tv < l - tol && tv <= (l + du - dv) / 2 + tol;
    if (hit_u && hit_v && std::abs(tu + tv - l) <= tol) {
      ++count;  // both routes meet at the same point
    } else {
      count += (hit_u ? 1 : 0) + (hit_v ? 1 : 0);
    }
    // Points on x's own edge measured directly.
    if (x.edge == e && !at_vertex(x)) {
      for (double t : {x.offset - s, x.offset + s}) {
        if (t > tol && t < l - tol) {
          double direct = std::abs(t - x.offset);
          double via_u = dist[ed.u] + t;
          double via_v = dist[ed.v] + (l - t);
          if (direct <= std::min(via_u, via_v) + tol &&
              std::abs(via_u - s) > tol && std::abs(via_v - s) > tol)
            ++count;
        }
      }
    }
  }
  return count;
}

double MetricGraph::ball_measure(GraphPoint x, double r) const {
  validate_point(x);
  if (r <= 0) return 0.0;
  auto dist = distances_from_point(x);
  double total = 0.0;
  for (int e = 0; e < num_edges(); ++e) {
    const Edge& ed = edges_[e];
    double a = std::clamp(r - dist[ed.u], 0.0, ed.length);
    double b = std::clamp(r - dist[ed.v], 0.0, ed.length);
    double covered = std::min(a + b, ed.length);
    if (x.edge == e && !at_vertex(x)) {
      // direct coverage from x along its own edge
      double lo = std::max(0.0, x.offset - r), hi = std::min(ed.length, x.offset + r);
      // union of [0,a), (l-b, l] and (lo, hi): merge intervals
      std::vector<std::pair<double, double>> iv;
      if (a > 0) iv.push_back({0.0, a});
      if (b > 0) iv.push_back({ed.length - b, ed.length});
      if (hi > lo) iv.push_back({lo, hi});
      std::sort(iv.begin(), iv.end());
      covered = 0.0;
      double cur_lo = 0, cur_hi = -1;
      for (auto& [s0, s1] : iv) {
        if (cur_hi < cur_lo || s0 > cur_hi) {
          if (cur_hi >= cur_lo) covered += cur_hi - cur_lo;
          cur_lo = s0;
          cur_hi = s1;
        } else {
          cur_hi = std::max(cur_hi, s1);
        }
      }
      if (cur_hi >= cur_lo) covered += cur_hi - cur_lo;
    }
    total += covered;
  }
  return total;
}

std::string MetricGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = num_vertices_;
  auto edges = nlohmann::json::array();
  for (const Edge& e : edges_) edges.push_back({e.u, e.v, e.length});
  j["edges"] = edges;
  if (truncation_radius_ >= 0) j["truncation_radius"] = truncation_radius_;
  return j.dump(2);
}

MetricGraph MetricGraph::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("vertices").get<int>();
  std::vector<Edge> edges;
  for (const auto& row : j.at("edges"))
    edges.push_back(Edge{row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<double>()});
  MetricGraph g(n, std::move(edges));
  if (j.contains("truncation_radius"))
    g.set_truncation_radius(j["truncation_radius"].get<double>());
  return g;
}

double delta_estimate(const MetricGraph& g, const std::vector<GraphPoint>& sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 4) fail(ErrorCode::SampleTooSmall, "delta estimate needs >= 4 points");
  // pairwise distances once
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    auto dist = g.distances_from_point(sample[i]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Edge& ed = g.edge(sample[j].edge);
      double best;
      if (auto v = g.at_vertex(sample[j])) {
        best = dist[*v];
      } else {
        best = std::min(sample[j].offset + dist[ed.u],
                        (ed.length - sample[j].offset) + dist[ed.v]);
        if (sample[i].edge == sample[j].edge && !g.at_vertex(sample[i]))
          best = std::min(best, std::abs(sample[i].offset - sample[j].offset));
      }
      d[i][j] = best;
    }
  }
  auto gp = [&](int w, int a, int b) { return 0.5 * (d[w][a] + d[w][b] - d[a][b]); };
  double delta = 0.0;
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x) {
      if (x == w) continue;
      for (int y = x + 1; y < n; ++y) {
        if (y == w) continue;
        double pxy = gp(w, x, y);
        for (int z = 0; z < n; ++z) {
          if (z == w || z == x || z == y) continue;
          double gap = std::min(gp(w, x, z), gp(w, y, z)) - pxy;
          if (gap > delta) delta = gap;
        }
      }
    }
  return std::max(0.0, delta);
}

}  // namespace graphpot
