#include "graphpot/domain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace graphpot {
namespace {

constexpr double kCutTol = 1e-12;

// Disjoint sorted union of half-open coverage descriptions on one edge.
struct EdgeCover {
  // breakpoints of the inside-indicator: start state + sorted toggles
  std::vector<double> cuts;
  std::vector<char> state;  // state[i] = inside on (cuts[i], cuts[i+1])

  static EdgeCover build(double l, const std::vector<std::pair<double, double>>& incl,
                         const std::vector<std::pair<double, double>>& excl) {
    // gather candidate breakpoints
    std::vector<double> pts = {0.0, l};
    for (auto& [a, b] : incl) {
      if (a > 0 && a < l) pts.push_back(a);
      if (b > 0 && b < l) pts.push_back(b);
    }
    for (auto& [a, b] : excl) {
      if (a > 0 && a < l) pts.push_back(a);
      if (b > 0 && b < l) pts.push_back(b);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double x, double y) { return std::abs(x - y) < kCutTol; }),
              pts.end());
    EdgeCover c;
    c.cuts = pts;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      double mid = 0.5 * (pts[i] + pts[i + 1]);
      bool in = false;
      for (auto& [a, b] : incl)
        if (mid > a && mid < b) { in = true; break; }
      if (in)
        for (auto& [a, b] : excl)
          if (mid >= a && mid <= b) { in = false; break; }
      c.state.push_back(in ? 1 : 0);
    }
    return c;
  }
};

}  // namespace

Domain Domain::make(const MetricGraph& g, const std::vector<BallSpec>& balls,
                    const std::vector<BallSpec>& holes) {
  if (balls.empty()) fail(ErrorCode::EmptyDomain, "domain needs at least one ball");
  for (const auto& b : balls)
    if (!(b.radius > 0)) fail(ErrorCode::InvalidLength, "ball radius must be positive");
  for (const auto& h : holes)
    if (!(h.radius > 0)) fail(ErrorCode::InvalidLength, "hole radius must be positive");

  Domain dom;
  dom.graph_ = &g;
  dom.balls_ = balls;
  dom.holes_ = holes;
  dom.anchor_ = g.canonical(balls.front().center);

  std::vector<std::vector<double>> ball_dist, hole_dist;
  for (const auto& b : balls) ball_dist.push_back(g.distances_from_point(b.center));
  for (const auto& h : holes) hole_dist.push_back(g.distances_from_point(h.center));

  const int nv = g.num_vertices();
  dom.vertex_in_.assign(nv, 0);
  for (int v = 0; v < nv; ++v) {
    bool in = false;
    for (size_t i = 0; i < balls.size(); ++i)
      if (ball_dist[i][v] < balls[i].radius - kCutTol) { in = true; break; }
    if (in)
      for (size_t i = 0; i < holes.size(); ++i)
        if (hole_dist[i][v] <= holes[i].radius + kCutTol) { in = false; break; }
    dom.vertex_in_[v] = in ? 1 : 0;
  }

  dom.intervals_.assign(g.num_edges(), {});
  dom.measure_ = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const double l = ed.length;
    std::vector<std::pair<double, double>> incl, excl;
    auto add_cover = [&](std::vector<std::pair<double, double>>& out, double du, double dv,
                         double r, GraphPoint center, bool closed) {
      double a = r - du;           // coverage [0, a) from u side
      double b = r - dv;           // coverage (l - b, l] from v side
      double pad = closed ? kCutTol : 0.0;
      if (a > -pad) out.push_back({-1.0, std::min(l + 1.0, a)});
      if (b > -pad) out.push_back({std::max(-1.0, l - b), l + 1.0});
      // the center's own edge is covered directly around it
      if (center.edge == e && !g.at_vertex(center))
        out.push_back({center.offset - r, center.offset + r});
    };
    for (size_t i = 0; i < balls.size(); ++i)
      add_cover(incl, ball_dist[i][ed.u], ball_dist[i][ed.v], balls[i].radius,
                g.canonical(balls[i].center), false);
    for (size_t i = 0; i < holes.size(); ++i)
      add_cover(excl, hole_dist[i][ed.u], hole_dist[i][ed.v], holes[i].radius,
                g.canonical(holes[i].center), true);
    if (incl.empty()) continue;
    EdgeCover cover = EdgeCover::build(l, incl, excl);
    for (size_t i = 0; i < cover.state.size(); ++i) {
      if (!cover.state[i]) continue;
      DomainInterval iv;
      iv.a = cover.cuts[i];
      iv.b = cover.cuts[i + 1];
      if (iv.b - iv.a < kCutTol) continue;
      // merge with previous when contiguous (can happen at spurious cuts)
      if (!dom.intervals_[e].empty() && std::abs(dom.intervals_[e].back().b - iv.a) < kCutTol) {
        dom.intervals_[e].back().b = iv.b;
      } else {
        dom.intervals_[e].push_back(iv);
      }
    }
    for (auto& iv : dom.intervals_[e]) {
      iv.touches_u = iv.a < kCutTol && dom.vertex_in_[ed.u];
      iv.touches_v = iv.b > l - kCutTol && dom.vertex_in_[ed.v];
      dom.measure_ += iv.b - iv.a;
    }
  }
  if (dom.measure_ <= 0) fail(ErrorCode::EmptyDomain, "domain resolved to empty interior");

  // boundary points: interval endpoints not glued to an included vertex
  for (int e = 0; e < g.num_edges(); ++e) {
    for (const auto& iv : dom.intervals_[e]) {
      if (!iv.touches_u) {
        GraphPoint p{e, iv.a};
        if (auto v = g.at_vertex(p)) p = g.vertex_point(*v);
        bool dup = false;
        for (const auto& q : dom.boundary_)
          if (g.same_point(p, q)) { dup = true; break; }
        if (!dup) dom.boundary_.push_back(p);
      }
      if (!iv.touches_v) {
        GraphPoint p{e, iv.b};
        if (auto v = g.at_vertex(p)) p = g.vertex_point(*v);
        bool dup = false;
        for (const auto& q : dom.boundary_)
          if (g.same_point(p, q)) { dup = true; break; }
        if (!dup) dom.boundary_.push_back(p);
      }
    }
  }

  dom.resolve_components();
  return dom;
}

Domain Domain::whole(const MetricGraph& g) {
  Domain dom;
  dom.graph_ = &g;
  dom.anchor_ = g.vertex_point(0);
  dom.vertex_in_.assign(g.num_vertices(), 1);
  dom.intervals_.assign(g.num_edges(), {});
  dom.measure_ = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    DomainInterval iv;
    iv.a = 0.0;
    iv.b = g.edge(e).length;
    iv.touches_u = iv.touches_v = true;
    dom.intervals_[e].push_back(iv);
    dom.measure_ += iv.b;
  }
  dom.resolve_components();
  return dom;
}

void Domain::resolve_components() {
  const MetricGraph& g = *graph_;
  // union-find over [vertices | intervals]
  interval_offset_.assign(g.num_edges() + 1, 0);
  for (int e = 0; e < g.num_edges(); ++e)
    interval_offset_[e + 1] = interval_offset_[e] + static_cast<int>(intervals_[e].size());
  const int n_iv = interval_offset_.back();
  const int n = g.num_vertices() + n_iv;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    for (int k = 0; k < static_cast<int>(intervals_[e].size()); ++k) {
      int iv_id = g.num_vertices() + interval_offset_[e] + k;
      if (intervals_[e][k].touches_u) unite(iv_id, ed.u);
      if (intervals_[e][k].touches_v) unite(iv_id, ed.v);
    }
  }
  // label components over pieces that belong to the domain
  std::vector<int> label(n, -1);
  num_components_ = 0;
  auto ensure_label = [&](int x) {
    int r = find(x);
    if (label[r] < 0) label[r] = num_components_++;
    return label[r];
  };
  vertex_component_.assign(g.num_vertices(), -1);
  interval_component_.assign(n_iv, -1);
  for (int e = 0; e < g.num_edges(); ++e)
    for (int k = 0; k < static_cast<int>(intervals_[e].size()); ++k)
      interval_component_[interval_offset_[e] + k] =
          ensure_label(g.num_vertices() + interval_offset_[e] + k);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (vertex_in_[v]) vertex_component_[v] = ensure_label(v);
  int anchor_comp = component_of(anchor_);
  connected_ = (num_components_ == 1) && anchor_comp == 0;
}

Domain Domain::minus(const Domain& other) const {
  if (balls_.empty()) fail(ErrorCode::EmptyDomain, "minus needs constructive description");
  if (!other.holes_.empty())
    fail(ErrorCode::NestingViolation, "subtracted set must be a plain union of balls");
  std::vector<BallSpec> holes = holes_;
  holes.insert(holes.end(), other.balls_.begin(), other.balls_.end());
  return Domain::make(*graph_, balls_, holes);
}

bool Domain::contains(GraphPoint p) const {
  return component_of(p) >= 0;
}

int Domain::component_of(GraphPoint p) const {
  const MetricGraph& g = *graph_;
  g.validate_point(p);
  if (auto v = g.at_vertex(p)) {
    if (!vertex_in_[*v]) return -1;
    return vertex_component_[*v];
  }
  const auto& ivs = intervals_[p.edge];
  for (int k = 0; k < static_cast<int>(ivs.size()); ++k)
    if (p.offset > ivs[k].a - kCutTol && p.offset < ivs[k].b + kCutTol)
      return interval_component_[interval_offset_[p.edge] + k];
  return -1;
}

}  // namespace graphpot
