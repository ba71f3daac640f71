#include "graphpot/walk.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace graphpot {
namespace {

inline uint64_t splitmix_next(uint64_t& s) {
  uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double require_uniform_step(const Mesh& mesh) {
  if (!mesh.uniform())
    fail(ErrorCode::StepTooLarge, "random walk requires a uniform mesh step");
  return mesh.step();
}

double spectral_gate(const Mesh& mesh, double hint) {
  if (hint > 0) return hint;
  DiscreteOperator op = assemble_operator(mesh, true);
  return smallest_eigenvalue(op);
}

// One killed walk. Returns (exit node, elapsed, capped); visit runs at every
// occupied interior node with the accumulated e^{lambda t} weight.
template <class Visit>
std::tuple<int, double, bool> run_walk(const Mesh& mesh, int start, double tau,
                                       double lambda, double t_max, CounterRng& rng,
                                       Visit&& visit) {
  const double step_factor = std::exp(lambda * tau);
  int cur = start;
  double t = 0.0, w = 1.0;
  while (true) {
    if (mesh.node(cur).boundary) return {cur, t, false};
    if (t >= t_max) return {-1, t, true};
    visit(cur, w);
    const auto& nb = mesh.neighbors(cur);
    cur = nb[rng.next_index(static_cast<int>(nb.size()))].first;
    t += tau;
    w *= step_factor;
  }
}

// Fill per-path outputs in parallel; every reduction stays sequential in
// path order, so estimates do not depend on scheduling or thread count.
void for_each_path(long n_paths, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (long p = 0; p < n_paths; ++p) body(p);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n_paths + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    long lo = t * chunk, hi = std::min(n_paths, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (long p = lo; p < hi; ++p) body(p);
    });
  }
  for (auto& th : pool) th.join();
}

struct ExitTallies {
  std::vector<int> exit_slot;       // slot id, -1 outer boundary, -2 capped
  std::vector<double> exit_weight;  // e^{lambda T} at the exit
  long capped = 0;
};

ExitTallies run_exit_walks(const Mesh& mesh, double lambda, int start, long n_paths,
                           uint64_t seed, double t_max, const std::vector<int>& slot_of_node,
                           int threads) {
  const double h = require_uniform_step(mesh);
  const double tau = h * h / 2.0;
  ExitTallies out;
  out.exit_slot.assign(n_paths, -1);
  out.exit_weight.assign(n_paths, 0.0);
  for_each_path(n_paths, threads, [&](long p) {
    CounterRng rng(seed, static_cast<uint64_t>(p));
    auto [exit_node, t, capped] =
        run_walk(mesh, start, tau, lambda, t_max, rng, [](int, double) {});
    if (capped) {
      out.exit_slot[p] = -2;
      return;
    }
    out.exit_slot[p] = slot_of_node[exit_node];
    out.exit_weight[p] = std::exp(lambda * t);
  });
  for (long p = 0; p < n_paths; ++p)
    if (out.exit_slot[p] == -2) ++out.capped;
  return out;
}

// inner-side receiving slots: boundary nodes still inside the outer domain
std::vector<int> inner_slots(const Mesh& mesh, const Domain& outer, std::vector<int>& nodes) {
  std::vector<int> slot_of_node(mesh.num_nodes(), -1);
  for (int id : mesh.boundary_nodes())
    if (outer.contains(mesh.node(id).point)) {
      slot_of_node[id] = static_cast<int>(nodes.size());
      nodes.push_back(id);
    }
  return slot_of_node;
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t index) {
  state = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
  next_u64();
  next_u64();
}

uint64_t CounterRng::next_u64() { return splitmix_next(state); }

double CounterRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int CounterRng::next_index(int bound) {
  return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                           static_cast<unsigned __int128>(bound)) >> 64);
}

PathSample sample_path(const Mesh& mesh, int start, const StopRule& stop, uint64_t seed) {
  if (start < 0 || start >= mesh.num_nodes()) fail(ErrorCode::InvalidPoint, "bad start node");
  if (mesh.node(start).boundary)
    fail(ErrorCode::StartOnBoundary, "walk cannot start on the Dirichlet boundary");
  const double h = require_uniform_step(mesh);
  const double tau = h * h / 2.0;
  PathSample out;
  out.start = start;
  out.step_time = tau;
  CounterRng rng(seed, 0);
  int cur = start;
  double t = 0.0;
  out.nodes.push_back(cur);
  while (true) {
    if (mesh.node(cur).boundary) {
      out.exit_node = cur;
      out.reason = StopReason::ExitedDomain;
      break;
    }
    if (t >= stop.t_max) {
      out.reason = StopReason::TimeCap;
      break;
    }
    const auto& nb = mesh.neighbors(cur);
    cur = nb[rng.next_index(static_cast<int>(nb.size()))].first;
    t += tau;
    out.nodes.push_back(cur);
  }
  out.elapsed = t;
  return out;
}

MCEstimate estimate_green_functional(const Mesh& mesh, double lambda, int start,
                                     const Vec& f_nodes, long n_paths, uint64_t seed,
                                     double t_max, double lambda1_hint, int threads) {
  if (start < 0 || mesh.node(start).boundary)
    fail(ErrorCode::StartOnBoundary, "start must be an interior node");
  if (f_nodes.size() != mesh.num_nodes())
    fail(ErrorCode::InvalidPoint, "f must be given on all mesh nodes");
  const double h = require_uniform_step(mesh);
  const double tau = h * h / 2.0;
  const double gate = spectral_gate(mesh, lambda1_hint);
  if (lambda >= gate - 1e-9)
    fail(ErrorCode::LambdaAboveSpectrum, "functional diverges at lambda >= lambda_1");
  if (t_max <= 0) t_max = 50.0 / gate;

  std::vector<double> contrib(n_paths, 0.0);
  std::vector<char> capped(n_paths, 0);
  for_each_path(n_paths, threads, [&](long p) {
    CounterRng rng(seed, static_cast<uint64_t>(p));
    double sum = 0.0;
    auto walk = run_walk(mesh, start, tau, lambda, t_max, rng,
                         [&](int node, double w) { sum += w * f_nodes[node] * tau; });
    contrib[p] = sum;
    capped[p] = std::get<2>(walk) ? 1 : 0;
  });

  MCEstimate est;
  est.n = n_paths;
  est.seed = seed;
  double sum = 0.0, sumsq = 0.0;
  long n_capped = 0;
  for (long p = 0; p < n_paths; ++p) {
    sum += contrib[p];
    sumsq += contrib[p] * contrib[p];
    n_capped += capped[p];
  }
  est.mean = sum / n_paths;
  double var = std::max(0.0, (sumsq - n_paths * est.mean * est.mean) / (n_paths - 1));
  est.stderr_ = std::sqrt(var / n_paths);
  est.capped_fraction = static_cast<double>(n_capped) / n_paths;
  if (est.capped_fraction > 0.01)
    fail(ErrorCode::ExcessTruncation,
         "more than 1% of paths hit the time cap: " + std::to_string(est.capped_fraction));
  return est;
}

HarmonicMeasure harmonic_measure(const Mesh& mesh, double lambda, int start,
                                 const Domain& outer, long n_paths, uint64_t seed,
                                 int threads) {
  if (start < 0 || start >= mesh.num_nodes() || mesh.node(start).boundary)
    fail(ErrorCode::StartMisplaced, "start must be interior to the punctured domain");
  const double gate = spectral_gate(mesh, -1.0);
  if (lambda >= gate - 1e-9)
    fail(ErrorCode::LambdaAboveSpectrum, "harmonic measure weight diverges");

  HarmonicMeasure hm;
  hm.n = n_paths;
  hm.seed = seed;
  std::vector<int> slot_of_node = inner_slots(mesh, outer, hm.nodes);
  hm.weights.assign(hm.nodes.size(), 0.0);

  ExitTallies tal =
      run_exit_walks(mesh, lambda, start, n_paths, seed, 50.0 / gate, slot_of_node, threads);
  double total = 0.0, totalsq = 0.0;
  for (long p = 0; p < n_paths; ++p) {
    if (tal.exit_slot[p] >= 0) {
      hm.weights[tal.exit_slot[p]] += tal.exit_weight[p];
      total += tal.exit_weight[p];
      totalsq += tal.exit_weight[p] * tal.exit_weight[p];
    }
  }
  for (double& w : hm.weights) w /= n_paths;
  hm.total_mass = total / n_paths;
  double var =
      std::max(0.0, (totalsq - n_paths * hm.total_mass * hm.total_mass) / (n_paths - 1));
  hm.total_stderr = std::sqrt(var / n_paths);
  return hm;
}

ResidualReport strong_markov_residual(const MetricGraph& g, double lambda, GraphPoint x,
                                      GraphPoint y, const Domain& o1, const Domain& o2,
                                      double h, long n_paths, uint64_t seed) {
  (void)g;
  MeshStack st1 = MeshStack::build(Domain(o1), h, true);
  const Mesh& m1 = *st1.mesh;
  auto xn1 = m1.find_node(x), yn1 = m1.find_node(y);
  if (!xn1 || !yn1) fail(ErrorCode::StartMisplaced, "x and y must be mesh nodes of O1");
  GreenSolver solver1(*st1.op);
  GreenField gy = solver1.solve(lambda, *yn1);
  const double lhs = gy.values[*xn1];

  MeshStack st12 = MeshStack::build(o1.minus(o2), h, true);
  const Mesh& m12 = *st12.mesh;
  auto xn12 = m12.find_node(x);
  if (!xn12 || m12.node(*xn12).boundary)
    fail(ErrorCode::StartMisplaced, "x must lie in O1 minus the closure of O2");

  // second right-hand term: Green function of the punctured domain
  double term2 = 0.0;
  auto yn12 = m12.find_node(y);
  if (yn12 && m12.node(*yn12).boundary)
    fail(ErrorCode::StartMisplaced, "y must avoid the boundary of O2");
  if (yn12 && st12.domain->component_of(m12.node(*yn12).point) ==
                  st12.domain->component_of(m12.node(*xn12).point)) {
    GreenSolver solver12(*st12.op);
    term2 = solver12.solve(lambda, *yn12).values[*xn12];
  }

  // first right-hand term: exit pairing with G(., y : O1)
  std::vector<int> receivers;
  std::vector<int> slot_of_node = inner_slots(m12, o1, receivers);
  std::vector<double> value_of_slot(receivers.size(), 0.0);
  for (size_t j = 0; j < receivers.size(); ++j) {
    auto in_m1 = m1.find_node(m12.node(receivers[j]).point);
    if (!in_m1) fail(ErrorCode::StartMisplaced, "meshes of O1 and O1 minus O2 do not align");
    value_of_slot[j] = gy.values[*in_m1];
  }
  const double gate12 = smallest_eigenvalue(*st12.op);
  if (lambda >= gate12 - 1e-9)
    fail(ErrorCode::LambdaAboveSpectrum, "exit weight diverges on the punctured domain");
  ExitTallies tal =
      run_exit_walks(m12, lambda, *xn12, n_paths, seed, 50.0 / gate12, slot_of_node, 1);
  double sum = 0.0, sumsq = 0.0;
  for (long p = 0; p < n_paths; ++p) {
    double c = tal.exit_slot[p] >= 0 ? tal.exit_weight[p] * value_of_slot[tal.exit_slot[p]]
                                     : 0.0;
    sum += c;
    sumsq += c * c;
  }
  const double term1 = sum / n_paths;
  ResidualReport rep;
  rep.lhs = lhs;
  rep.rhs = term1 + term2;
  double var = std::max(0.0, (sumsq - n_paths * term1 * term1) / (n_paths - 1));
  rep.stderr_ = std::sqrt(var / n_paths);
  rep.residual_se = std::abs(rep.lhs - rep.rhs) / std::max(rep.stderr_, 1e-300);
  return rep;
}

ResidualReport composition_residual(const MetricGraph& g, GraphPoint x, const Domain& o1,
                                    const Domain& o2, const Domain& o3,
                                    const std::function<double(GraphPoint)>& f,
                                    double h, long n_paths, uint64_t seed) {
  auto same_spec = [&](const Domain& a, const Domain& b) {
    if (a.balls().size() != b.balls().size()) return false;
    for (size_t i = 0; i < a.balls().size(); ++i)
      if (!g.same_point(a.balls()[i].center, b.balls()[i].center) ||
          std::abs(a.balls()[i].radius - b.balls()[i].radius) > 1e-12)
        return false;
    return true;
  };
  auto check_sep = [&](const Domain& inner, const Domain& outer, const char* what) {
    for (const GraphPoint& p : inner.boundary_points()) {
      if (!outer.contains(p))
        fail(ErrorCode::NestingViolation,
             std::string("boundary of ") + what + " leaves the enclosing domain");
      for (const GraphPoint& q : outer.boundary_points())
        if (g.distance(p, q) < 2 * h - 1e-12)
          fail(ErrorCode::NestingViolation, std::string("separation below 2h for ") + what);
    }
  };
  check_sep(o2, o1, "O2");
  if (!same_spec(o2, o3)) check_sep(o3, o2, "O3");

  const double lambda = 0.0;
  MeshStack st13 = MeshStack::build(o1.minus(o3), h, true);
  const Mesh& m13 = *st13.mesh;
  auto xn13 = m13.find_node(x);
  if (!xn13 || m13.node(*xn13).boundary)
    fail(ErrorCode::StartMisplaced, "x must lie in O1 minus the closure of O3");
  const double gate13 = smallest_eigenvalue(*st13.op);

  // direct measure x -> boundary of O3
  HarmonicMeasure direct = harmonic_measure(m13, lambda, *xn13, o1, n_paths, seed);
  double lhs = 0.0, lhs_sq = 0.0;
  for (size_t j = 0; j < direct.nodes.size(); ++j) {
    double fj = f(m13.node(direct.nodes[j]).point);
    lhs += direct.weights[j] * fj;
    lhs_sq += direct.weights[j] * fj * fj;
  }
  double lhs_se = std::sqrt(std::max(0.0, lhs_sq - lhs * lhs) / n_paths);

  // composed route: x -> boundary of O2, then onward from each receiver
  MeshStack st12 = MeshStack::build(o1.minus(o2), h, true);
  const Mesh& m12 = *st12.mesh;
  auto xn12 = m12.find_node(x);
  if (!xn12 || m12.node(*xn12).boundary)
    fail(ErrorCode::StartMisplaced, "x must lie in O1 minus the closure of O2");
  HarmonicMeasure stage1 = harmonic_measure(m12, lambda, *xn12, o1, n_paths, seed + 1);

  double rhs = 0.0, rhs_inner_sq = 0.0, prop_var = 0.0;
  for (size_t j = 0; j < stage1.nodes.size(); ++j) {
    if (stage1.weights[j] == 0.0) continue;
    GraphPoint yj = m12.node(stage1.nodes[j]).point;
    auto yj13 = m13.find_node(yj);
    if (!yj13 || m13.node(*yj13).boundary)
      fail(ErrorCode::NestingViolation, "stage-one receiver is not interior to O1 minus O3");
    HarmonicMeasure stage2 = harmonic_measure(m13, lambda, *yj13, o1, n_paths,
                                              seed + 2 + static_cast<uint64_t>(j));
    (void)gate13;
    double vj = 0.0;
    for (size_t k = 0; k < stage2.nodes.size(); ++k)
      vj += stage2.weights[k] * f(m13.node(stage2.nodes[k]).point);
    rhs += stage1.weights[j] * vj;
    rhs_inner_sq += stage1.weights[j] * vj * vj;
    prop_var += stage1.weights[j] * stage1.weights[j] * stage2.total_stderr *
                stage2.total_stderr;
  }
  double rhs_se = std::sqrt(std::max(0.0, rhs_inner_sq - rhs * rhs) / n_paths + prop_var);

  ResidualReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.stderr_ = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
  rep.residual_se = std::abs(lhs - rhs) / std::max(rep.stderr_, 1e-300);
  return rep;
}

}  // namespace graphpot
