// Monte Carlo realization of the diffusion as the mesh random walk: uniform
// neighbor steps, time h^2/2 per step, killed on Dirichlet boundary nodes.
// Streams are counter-based in (seed, path index) so results are independent
// of worker scheduling and bit-reproducible.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "graphpot/green.hpp"

namespace graphpot {

// splitmix64 stream keyed by (seed, path index)
struct CounterRng {
  uint64_t state;
  CounterRng(uint64_t seed, uint64_t index);
  uint64_t next_u64();
  double next_unit();               // [0, 1)
  int next_index(int bound);        // uniform in [0, bound)
};

struct StopRule {
  double t_max = std::numeric_limits<double>::infinity();
};

enum class StopReason { ExitedDomain, TimeCap };

struct PathSample {
  int start = -1;
  std::vector<int> nodes;       // visited mesh nodes, start included
  double step_time = 0.0;       // h^2 / 2
  double elapsed = 0.0;
  int exit_node = -1;
  StopReason reason = StopReason::ExitedDomain;
};

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
  uint64_t seed = 0;
  double capped_fraction = 0.0;
};

PathSample sample_path(const Mesh& mesh, int start, const StopRule& stop, uint64_t seed);

// E_x[ sum_k e^{lambda t_k} f(X_k) tau ] with tau = h^2/2: the discrete
// Feynman-Kac Green functional. f is given per mesh node. lambda1_hint
// skips the spectral gate solve when the caller already knows it.
MCEstimate estimate_green_functional(const Mesh& mesh, double lambda, int start,
                                     const Vec& f_nodes, long n_paths, uint64_t seed,
                                     double t_max = -1.0, double lambda1_hint = -1.0,
                                     int threads = 1);

struct HarmonicMeasure {
  std::vector<int> nodes;        // receiving boundary nodes (inner side)
  std::vector<double> weights;   // estimated e^{lambda tau} mass per node
  double total_mass = 0.0;
  double total_stderr = 0.0;
  long n = 0;
  uint64_t seed = 0;
};

// Exit weights on the part of the mesh boundary lying inside `outer`
// (the hole side); mesh must discretize outer minus the closed hole.
HarmonicMeasure harmonic_measure(const Mesh& mesh, double lambda, int start,
                                 const Domain& outer, long n_paths, uint64_t seed,
                                 int threads = 1);

struct ResidualReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_ = 0.0;
  double residual_se = 0.0;  // |lhs - rhs| in standard-error units
};

// Exit identity G(x,y:O1) = E_x[1 e^{l tau} G(w(tau),y:O1)] + G(x,y:O1\O2)
// checked with deterministic solves on both Green terms and Monte Carlo on
// the harmonic-measure pairing.
ResidualReport strong_markov_residual(const MetricGraph& g, double lambda, GraphPoint x,
                                      GraphPoint y, const Domain& o1, const Domain& o2,
                                      double h, long n_paths, uint64_t seed);

// Tower property of harmonic measures over O3 subset O2 subset O1 at
// lambda = 0; f is evaluated at receiving boundary points.
ResidualReport composition_residual(const MetricGraph& g, GraphPoint x, const Domain& o1,
                                    const Domain& o2, const Domain& o3,
                                    const std::function<double(GraphPoint)>& f,
                                    double h, long n_paths, uint64_t seed);

}  // namespace graphpot
