#include "graphpot/builders.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

namespace graphpot {
namespace {

void require_positive_length(double length) {
  if (!(length > 0.0)) fail(ErrorCode::InvalidLength, "edge length must be positive");
}

// Normal-form word in Z/2 * Z/3: letters alternate between 'a' (order 2)
// and 'b'/'B' (b, b^2). Generator multiplication keeps the form reduced.
struct Z2Z3Word {
  std::string w;
  bool operator<(const Z2Z3Word& o) const {
    if (w.size() != o.w.size()) return w.size() < o.w.size();
    return w < o.w;
  }
  Z2Z3Word mul_a() const {
    Z2Z3Word r = *this;
    if (!r.w.empty() && r.w.back() == 'a') r.w.pop_back();
    else r.w.push_back('a');
    return r;
  }
  Z2Z3Word mul_b(int power) const {  // power in {1, 2}
    Z2Z3Word r = *this;
    int cur = 0;
    if (!r.w.empty() && (r.w.back() == 'b' || r.w.back() == 'B')) {
      cur = r.w.back() == 'b' ? 1 : 2;
      r.w.pop_back();
    }
    int total = (cur + power) % 3;
    if (total == 1) r.w.push_back('b');
    else if (total == 2) r.w.push_back('B');
    return r;
  }
  int length() const { return static_cast<int>(w.size()); }
};

}  // namespace

MetricGraph build_path(int n, double length) {
  require_positive_length(length);
  if (n < 2) fail(ErrorCode::UnsupportedFamily, "path needs >= 2 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, length});
  return MetricGraph(n, std::move(edges));
}

MetricGraph build_cycle(int n, double length) {
  require_positive_length(length);
  if (n < 3) fail(ErrorCode::UnsupportedFamily, "cycle needs >= 3 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, length});
  return MetricGraph(n, std::move(edges));
}

MetricGraph build_regular_tree(int degree, int depth, double length) {
  require_positive_length(length);
  if (degree < 2 || depth < 1)
    fail(ErrorCode::UnsupportedFamily, "regular tree needs degree >= 2, depth >= 1");
  std::vector<Edge> edges;
  int next = 1;
  std::vector<std::pair<int, int>> frontier = {{0, 0}};  // (vertex, depth)
  while (!frontier.empty()) {
    std::vector<std::pair<int, int>> nf;
    for (auto [v, d] : frontier) {
      if (d == depth) continue;
      int children = (d == 0) ? degree : degree - 1;
      for (int c = 0; c < children; ++c) {
        edges.push_back({v, next, length});
        nf.push_back({next, d + 1});
        ++next;
      }
    }
    frontier = std::move(nf);
  }
  MetricGraph g(next, std::move(edges));
  g.set_truncation_radius(depth * length);
  return g;
}

MetricGraph build_cayley_z2z3(int radius, double length) {
  require_positive_length(length);
  if (radius < 1) fail(ErrorCode::UnsupportedFamily, "cayley ball needs radius >= 1");
  std::map<Z2Z3Word, int> ids;
  std::vector<Z2Z3Word> order;
  auto intern = [&](const Z2Z3Word& w) {
    auto it = ids.find(w);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(order.size());
    ids.emplace(w, id);
    order.push_back(w);
    return id;
  };
  intern(Z2Z3Word{});
  // BFS in deterministic (length, lexicographic) order via the map.
  for (int r = 0; r < radius; ++r) {
    std::vector<Z2Z3Word> level;
    for (const auto& [w, id] : ids)
      if (w.length() == r) level.push_back(w);
    std::sort(level.begin(), level.end());
    for (const auto& w : level)
      for (const Z2Z3Word& nw : {w.mul_a(), w.mul_b(1), w.mul_b(2)})
        if (nw.length() <= radius) intern(nw);
  }
  // re-index in sorted order so ids are stable
  std::vector<Z2Z3Word> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::map<std::string, int> final_id;
  for (int i = 0; i < static_cast<int>(sorted.size()); ++i) final_id[sorted[i].w] = i;
  std::vector<Edge> edges;
  for (const auto& w : sorted) {
    int u = final_id[w.w];
    for (const Z2Z3Word& nw : {w.mul_a(), w.mul_b(1)}) {
      auto it = final_id.find(nw.w);
      if (it == final_id.end()) continue;
      int v = it->second;
      if (nw.w == w.mul_a().w) {
        if (u < v) edges.push_back({u, v, length});  // involution: dedupe
      } else {
        edges.push_back({u, v, length});  // b-edges traverse each triangle once
      }
    }
  }
  MetricGraph g(static_cast<int>(sorted.size()), std::move(edges));
  g.set_truncation_radius(radius * length);
  return g;
}

MetricGraph build_cayley_free(int rank, int radius, double length) {
  require_positive_length(length);
  if (rank < 2 || radius < 1)
    fail(ErrorCode::UnsupportedFamily, "free group needs rank >= 2, radius >= 1");
  // Cayley graph of F_k is the 2k-regular tree.
  MetricGraph g = build_regular_tree(2 * rank, radius, length);
  g.set_truncation_radius(radius * length);
  return g;
}

MetricGraph build_theta_tree(int cycle_len, int branch_depth, double length) {
  require_positive_length(length);
  if (cycle_len < 3) fail(ErrorCode::UnsupportedFamily, "theta tree cycle needs >= 3 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i < cycle_len; ++i) edges.push_back({i, (i + 1) % cycle_len, length});
  int next = cycle_len;
  // hang a binary branch off every cycle vertex
  std::vector<std::pair<int, int>> frontier;
  for (int i = 0; i < cycle_len; ++i) frontier.push_back({i, 0});
  while (!frontier.empty()) {
    std::vector<std::pair<int, int>> nf;
    for (auto [v, d] : frontier) {
      if (d == branch_depth) continue;
      int children = (d == 0) ? 1 : 2;
      for (int c = 0; c < children; ++c) {
        edges.push_back({v, next, length});
        nf.push_back({next, d + 1});
        ++next;
      }
    }
    frontier = std::move(nf);
  }
  MetricGraph g(next, std::move(edges));
  g.set_truncation_radius(branch_depth * length + cycle_len * length / 2.0);
  return g;
}

MetricGraph build_graph(const GraphSpec& spec) {
  switch (spec.family) {
    case GraphFamily::Explicit: {
      std::vector<Edge> edges = spec.explicit_edges;
      return MetricGraph(spec.explicit_vertices, std::move(edges));
    }
    case GraphFamily::Path: return build_path(spec.n, spec.length);
    case GraphFamily::Cycle: return build_cycle(spec.n, spec.length);
    case GraphFamily::RegularTree: return build_regular_tree(spec.degree, spec.radius, spec.length);
    case GraphFamily::CayleyZ2Z3: return build_cayley_z2z3(spec.radius, spec.length);
    case GraphFamily::CayleyFree: return build_cayley_free(spec.degree, spec.radius, spec.length);
    case GraphFamily::ThetaTree: return build_theta_tree(spec.cycle_len, spec.radius, spec.length);
  }
  fail(ErrorCode::UnsupportedFamily, "unknown family");
}

GraphSpec GraphSpec::parse(const std::string& text) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    fail(ErrorCode::ConfigParse, "graph spec must look like name(args): " + text);
  std::string name = text.substr(0, open);
  std::string args = text.substr(open + 1, close - open - 1);
  std::vector<std::string> parts;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    parts.push_back(item);
  }
  auto need = [&](size_t k) {
    if (parts.size() != k)
      fail(ErrorCode::ConfigParse, "graph spec " + name + " expects " + std::to_string(k) + " args");
  };
  GraphSpec s;
  if (name == "path") {
    need(2);
    s.family = GraphFamily::Path;
    s.n = std::stoi(parts[0]);
    s.length = std::stod(parts[1]);
  } else if (name == "cycle") {
    need(2);
    s.family = GraphFamily::Cycle;
    s.n = std::stoi(parts[0]);
    s.length = std::stod(parts[1]);
  } else if (name == "tree") {
    need(3);
    s.family = GraphFamily::RegularTree;
    s.degree = std::stoi(parts[0]);
    s.radius = std::stoi(parts[1]);
    s.length = std::stod(parts[2]);
  } else if (name == "cayley") {
    need(3);
    if (parts[0] == "z2z3") {
      s.family = GraphFamily::CayleyZ2Z3;
    } else if (parts[0].rfind("free", 0) == 0) {
      s.family = GraphFamily::CayleyFree;
      s.degree = std::stoi(parts[0].substr(4));
    } else {
      fail(ErrorCode::UnsupportedFamily, "unsupported group spec: " + parts[0]);
    }
    s.radius = std::stoi(parts[1]);
    s.length = std::stod(parts[2]);
  } else if (name == "theta") {
    need(3);
    s.family = GraphFamily::ThetaTree;
    s.cycle_len = std::stoi(parts[0]);
    s.radius = std::stoi(parts[1]);
    s.length = std::stod(parts[2]);
  } else {
    fail(ErrorCode::UnsupportedFamily, "unknown graph family: " + name);
  }
  return s;
}

std::string GraphSpec::to_string() const {
  char buf[128];
  switch (family) {
    case GraphFamily::Explicit: return "explicit";
    case GraphFamily::Path:
      std::snprintf(buf, sizeof buf, "path(%d,%g)", n, length);
      return buf;
    case GraphFamily::Cycle:
      std::snprintf(buf, sizeof buf, "cycle(%d,%g)", n, length);
      return buf;
    case GraphFamily::RegularTree:
      std::snprintf(buf, sizeof buf, "tree(%d,%d,%g)", degree, radius, length);
      return buf;
    case GraphFamily::CayleyZ2Z3:
      std::snprintf(buf, sizeof buf, "cayley(z2z3,%d,%g)", radius, length);
      return buf;
    case GraphFamily::CayleyFree:
      std::snprintf(buf, sizeof buf, "cayley(free%d,%d,%g)", degree, radius, length);
      return buf;
    case GraphFamily::ThetaTree:
      std::snprintf(buf, sizeof buf, "theta(%d,%d,%g)", cycle_len, radius, length);
      return buf;
  }
  return "unknown";
}

std::string graph_hash(const MetricGraph& g) {
  // FNV-1a over the edge list; enough to key output files.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(static_cast<uint64_t>(g.num_vertices()));
  for (const Edge& e : g.edges()) {
    mix(static_cast<uint64_t>(e.u));
    mix(static_cast<uint64_t>(e.v));
    uint64_t bits;
    static_assert(sizeof(double) == sizeof(uint64_t));
    std::memcpy(&bits, &e.length, sizeof bits);
    mix(bits);
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 8);  // 8 hex chars is plenty
}

}  // namespace graphpot
