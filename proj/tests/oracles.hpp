// Independent oracles used by the test suites. These deliberately avoid the
// library's own code paths: plain enumerations, closed forms, and classical
// series, kept simple enough to audit by eye.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracles {

// Reflection-series heat kernel of the unit interval with Dirichlet ends for
// the generator d^2/ds^2 (Gaussian variance 2t).
inline double interval_heat_kernel_images(double t, double x, double y) {
  auto gauss = [&](double u) { return std::exp(-u * u / (4 * t)) / std::sqrt(4 * M_PI * t); };
  double sum = 0.0;
  for (int n = -40; n <= 40; ++n)
    sum += gauss(x - y - 2.0 * n) - gauss(x + y - 2.0 * n);
  return sum;
}

// Dirichlet Green function of -d^2/ds^2 on the unit interval at lambda = 0.
inline double interval_green0(double x, double y) {
  return x < y ? x * (1 - y) : y * (1 - x);
}

// Resolvent kernel of -d^2/ds^2 - lambda on the whole line, lambda < 0.
inline double line_green(double lambda, double dist) {
  double kappa = std::sqrt(-lambda);
  return std::exp(-kappa * dist) / (2 * kappa);
}

// Vertex count of the degree-d regular tree truncated at the given depth.
inline long regular_tree_vertex_count(int degree, int depth) {
  // 1 + d * ((d-1)^depth - 1)/(d-2), specializing to d=3: 1 + 3(2^depth - 1)
  long level = degree, total = 1;
  for (int r = 1; r <= depth; ++r) {
    total += level;
    level *= degree - 1;
  }
  return total;
}

// Independent count of elements of Z/2 * Z/3 with word length <= radius,
// via the alternating normal-form recurrence.
inline long z2z3_ball_count(int radius) {
  long total = 1;       // identity
  long end_a = 1, end_b = 2;  // words of length 1
  for (int n = 1; n <= radius; ++n) {
    total += end_a + end_b;
    long na = end_b;        // append 'a' after a b-letter
    long nb = 2 * end_a;    // append b or b^2 after 'a'
    end_a = na;
    end_b = nb;
  }
  return total;
}

// Exhaustive 4-point hyperbolicity constant from a distance matrix.
inline double delta_brute_force(const std::vector<std::vector<double>>& d) {
  const int n = static_cast<int>(d.size());
  double delta = 0.0;
  auto gp = [&](int w, int a, int b) { return 0.5 * (d[w][a] + d[w][b] - d[a][b]); };
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
          if (w == x || w == y || w == z || x == y || x == z || y == z) continue;
          double gap = std::min(gp(w, x, z), gp(w, y, z)) - gp(w, x, y);
          if (gap > delta) delta = gap;
        }
  return delta;
}

// Dijkstra over the vertex skeleton only (positive integer-ish lengths),
// used to cross-check the library's metric.
inline std::vector<double> dijkstra_vertices(int n,
                                             const std::vector<std::array<double, 3>>& edges,
                                             int src) {
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (auto& e : edges) {
    adj[static_cast<int>(e[0])].push_back({static_cast<int>(e[1]), e[2]});
    adj[static_cast<int>(e[1])].push_back({static_cast<int>(e[0]), e[2]});
  }
  std::vector<double> dist(n, 1e300);
  dist[src] = 0;
  std::vector<char> done(n, 0);
  for (int iter = 0; iter < n; ++iter) {
    int best = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && (best < 0 || dist[i] < dist[best])) best = i;
    if (best < 0 || dist[best] >= 1e299) break;
    done[best] = 1;
    for (auto [w, l] : adj[best]) dist[w] = std::min(dist[w], dist[best] + l);
  }
  return dist;
}

// Classical Dirichlet spectrum of the unit interval: lambda_k = (k pi)^2.
inline double interval_dirichlet_eigenvalue(int k) { return k * M_PI * k * M_PI; }

// Smallest eigenvalue of the 3-star with unit edges, Dirichlet leaves:
// the symmetric mode needs cos(k) = 0 by Kirchhoff balance at the center.
inline double star3_lambda1() { return (M_PI / 2) * (M_PI / 2); }

// Spectral-correspondence value for the bottom of the spectrum of the
// 3-regular tree with unit edges: cos k0 = 2 sqrt(2) / 3.
inline double tree3_lambda0() {
  double k0 = std::acos(2.0 * std::sqrt(2.0) / 3.0);
  return k0 * k0;
}

}  // namespace oracles
