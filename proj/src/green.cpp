#include "graphpot/green.hpp"

#include <algorithm>
#include <cmath>

namespace graphpot {

double GreenSolver::lambda1() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!lambda1_known_) {
    lambda1_ = smallest_eigenvalue(*op_);
    lambda1_known_ = true;
  }
  return lambda1_;
}

GreenSolver::Factorization& GreenSolver::factorization(double lambda) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(lambda);
  if (it != cache_.end()) return *it->second;
  const int n = op_->size();
  SparseMat M(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n);
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, op_->mass()[i]);
  M.setFromTriplets(trip.begin(), trip.end());
  SparseMat shifted = op_->stiffness() - lambda * M;
  auto fact = std::make_unique<Factorization>(shifted);
  if (fact->info() != Eigen::Success)
    fail(ErrorCode::SolveFailure, "factorization of (A - lambda M) broke down");
  auto& ref = *fact;
  cache_.emplace(lambda, std::move(fact));
  return ref;
}

GreenField GreenSolver::solve(double lambda, int pole_node) {
  const DiscreteOperator& op = *op_;
  const Mesh& mesh = op.mesh();
  if (pole_node < 0 || pole_node >= mesh.num_nodes())
    fail(ErrorCode::InvalidPoint, "pole node out of range");
  int row = op.row_of_node(pole_node);
  if (row < 0) fail(ErrorCode::PoleCollision, "pole sits on the Dirichlet boundary");
  double gate = lambda1();
  if (lambda >= gate - 1e-9)
    fail(ErrorCode::SpectralBarrier, "lambda reaches the bottom eigenvalue " +
                                         std::to_string(gate));
  Vec rhs = Vec::Zero(op.size());
  rhs[row] = 1.0;
  Vec g = factorization(lambda).solve(rhs);
  GreenField field;
  field.op = &op;
  field.lambda = lambda;
  field.pole = pole_node;
  field.values = op.lift(g);
  const int n = op.size();
  SparseMat M(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, op.mass()[i]);
  M.setFromTriplets(trip.begin(), trip.end());
  field.residual = ((op.stiffness() - lambda * M) * g - rhs).norm();
  if (field.residual > 1e-10)
    fail(ErrorCode::SolveFailure, "green solve residual above tolerance");
  return field;
}

Vec GreenSolver::solve_rhs(double lambda, const Vec& rhs_rows) {
  double gate = lambda1();
  if (lambda >= gate - 1e-9)
    fail(ErrorCode::SpectralBarrier, "lambda reaches the bottom eigenvalue");
  return factorization(lambda).solve(rhs_rows);
}

GreenField relative_green(const DiscreteOperator& op, double lambda, int pole_node) {
  GreenSolver solver(op);
  return solver.solve(lambda, pole_node);
}

GlobalGreenResult global_green(const MetricGraph& g, double lambda, GraphPoint x,
                               GraphPoint y, double h, double tol, double r_max) {
  const double dxy = g.distance(x, y);
  if (dxy + 2 <= 0 || dxy + 2 >= r_max + 1e-12)
    fail(ErrorCode::InvalidPoint, "points too far apart for the truncation budget");
  GlobalGreenResult out;
  double r0 = std::ceil(dxy) + 2;
  for (double R = r0; R <= r_max + 1e-12; R += 1.0) {
    if (g.truncation_radius() >= 0 && R > g.truncation_radius() + 1e-12)
      fail(ErrorCode::RadiusExceedsTruncation, "exhaustion ball exceeds the truncation");
    MeshStack st = MeshStack::build(g, {{x, R}}, {}, h, true);
    GreenSolver solver(*st.op);
    double gate = solver.lambda1();
    if (lambda >= gate - 1e-9)
      fail(ErrorCode::LambdaAboveSpectrum,
           "lambda above the exhaustion estimate at R=" + std::to_string(R));
    int pole = st.mesh->find_node(y) ? *st.mesh->find_node(y) : st.mesh->nearest_node(y);
    GreenField field = solver.solve(lambda, pole);
    int xn = st.mesh->find_node(x) ? *st.mesh->find_node(x) : st.mesh->nearest_node(x);
    double value = field.values[xn];
    out.radii.push_back(R);
    out.values.push_back(value);
    out.value = value;
    if (out.values.size() >= 2) {
      double prev = out.values[out.values.size() - 2];
      if (value - prev <= tol * std::max(value, 1e-300)) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

double martin_kernel(const MetricGraph& g, double lambda, GraphPoint x0, GraphPoint x,
                     GraphPoint y, double h, double radius) {
  if (g.same_point(x0, y) || g.same_point(x, y))
    fail(ErrorCode::PoleCollision, "martin kernel needs x0 != y and x != y");
  // the truncation ball is anchored at the graph origin so kernels with
  // different basepoints or targets share one domain
  GraphPoint anchor = g.vertex_point(0);
  for (GraphPoint p : {x0, x, y})
    if (g.distance(anchor, p) + 1 > radius)
      fail(ErrorCode::RadiusExceedsTruncation, "kernel argument outside the truncation ball");
  MeshStack st = MeshStack::build(g, {{anchor, radius}}, {}, h, true);
  GreenSolver solver(*st.op);
  int pole = st.mesh->find_node(y) ? *st.mesh->find_node(y) : st.mesh->nearest_node(y);
  GreenField field = solver.solve(lambda, pole);
  int xn = st.mesh->find_node(x) ? *st.mesh->find_node(x) : st.mesh->nearest_node(x);
  int x0n = st.mesh->find_node(x0) ? *st.mesh->find_node(x0) : st.mesh->nearest_node(x0);
  if (xn == x0n) return 1.0;
  double denom = field.values[x0n];
  if (denom <= 0) fail(ErrorCode::SolveFailure, "denominator green value vanished");
  return field.values[xn] / denom;
}

DerivativeCheck green_derivative_check(const MetricGraph& g, double lambda, GraphPoint x,
                                       GraphPoint y, double dlambda, double h, double radius) {
  MeshStack st = MeshStack::build(g, {{x, radius}}, {}, h, true);
  GreenSolver solver(*st.op);
  double gate = solver.lambda1();
  if (lambda + dlambda >= gate - 1e-9)
    fail(ErrorCode::SpectralBarrier, "lambda + dlambda reaches the spectrum");
  const Mesh& mesh = *st.mesh;
  int pole_y = mesh.find_node(y) ? *mesh.find_node(y) : mesh.nearest_node(y);
  int pole_x = mesh.find_node(x) ? *mesh.find_node(x) : mesh.nearest_node(x);
  int xn = pole_x;
  GreenField plus = solver.solve(lambda + dlambda, pole_y);
  GreenField minus = solver.solve(lambda - dlambda, pole_y);
  DerivativeCheck out;
  out.lhs = (plus.values[xn] - minus.values[xn]) / (2 * dlambda);
  GreenField gy = solver.solve(lambda, pole_y);
  GreenField gx = solver.solve(lambda, pole_x);
  double quad = 0.0;
  for (int nd = 0; nd < mesh.num_nodes(); ++nd)
    quad += gx.values[nd] * gy.values[nd] * mesh.node(nd).mass;
  out.rhs = quad;
  out.relative_error = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  return out;
}

HarnackReport harnack_report(const GreenField& field, GraphPoint center, double r, double l) {
  const DiscreteOperator& op = *field.op;
  const Mesh& mesh = op.mesh();
  const MetricGraph& g = mesh.graph();
  if (!(r > 0) || !(l > 0)) fail(ErrorCode::InvalidLength, "need r > 0 and l > 0");

  GraphPoint pole_pt = mesh.node(field.pole).point;
  if (g.distance(pole_pt, center) <= r + l + 1e-12)
    fail(ErrorCode::PoleInsideEnlargedBall,
         "pole must stay outside B(center, r + l) for harmonicity");

  auto node_dist = mesh.node_distances_from(center);
  // the enlarged ball must avoid the Dirichlet boundary (field vanishes there)
  for (int id : mesh.boundary_nodes())
    if (node_dist[id] < r + l - 1e-12)
      fail(ErrorCode::BallExitsDomain, "B(center, r + l) touches the Dirichlet boundary");

  HarnackReport rep;
  double sup = 0.0, inf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int id = 0; id < mesh.num_nodes(); ++id) {
    if (node_dist[id] >= r - 1e-12) continue;
    any = true;
    sup = std::max(sup, field.values[id]);
    inf = std::min(inf, field.values[id]);
  }
  if (!any || inf <= 0)
    fail(ErrorCode::BallExitsDomain, "ball has no positive field nodes");
  rep.ratio = sup / inf;

  // gradient energy of the log field over segments inside the ball
  double grad = 0.0;
  for (const MeshSegment& s : mesh.segments()) {
    if (node_dist[s.a] >= r - 1e-12 || node_dist[s.b] >= r - 1e-12) continue;
    double diff = std::log(field.values[s.a]) - std::log(field.values[s.b]);
    grad += diff * diff / s.len;
  }
  rep.gradient_integral = grad;

  // max sphere cardinality over branching radii in [r, r + l]
  auto vdist = g.distances_from_point(center);
  std::vector<double> radii = {r, r + l};
  for (int v = 0; v < g.num_vertices(); ++v)
    if (vdist[v] > r + 1e-12 && vdist[v] < r + l - 1e-12) radii.push_back(vdist[v]);
  std::sort(radii.begin(), radii.end());
  int sphere_max = 0;
  for (size_t i = 0; i + 1 < radii.size(); ++i) {
    double mid = 0.5 * (radii[i] + radii[i + 1]);
    sphere_max = std::max(sphere_max, g.sphere_cardinality(center, mid));
  }
  rep.sphere_max = sphere_max;
  rep.ball_measure = g.ball_measure(center, r);
  rep.d_rl = std::sqrt(4.0 * sphere_max * rep.ball_measure / l);
  rep.paper_bound = std::exp(rep.d_rl);
  rep.gradient_bound = 4.0 * sphere_max / l;
  rep.ratio_ok = rep.ratio <= rep.paper_bound;
  rep.gradient_ok = rep.gradient_integral <= rep.gradient_bound * 1.05;
  return rep;
}

}  // namespace graphpot
