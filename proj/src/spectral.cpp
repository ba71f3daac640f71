#include "graphpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace graphpot {
namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Vec deterministic_start(int n) {
  Vec v(n);
  uint64_t s = 0x5DEECE66Dull;
  for (int i = 0; i < n; ++i)
    v[i] = static_cast<double>(splitmix64(s) >> 11) / 9007199254740992.0 - 0.5;
  return v;
}

void canonical_sign(Vec& phi, const Vec& mass) {
  double mean = phi.dot(mass);
  if (std::abs(mean) > 1e-10 * phi.norm()) {
    if (mean < 0) phi = -phi;
    return;
  }
  for (int i = 0; i < phi.size(); ++i)
    if (std::abs(phi[i]) > 1e-12) {
      if (phi[i] < 0) phi = -phi;
      return;
    }
}

struct Pencil {
  const SparseMat* A;
  Vec sqrt_m, inv_sqrt_m;
};

// Shift-invert Lanczos with full reorthogonalization on the standard-form
// operator C = M^{1/2} (A - sigma M)^{-1} M^{1/2}; largest Ritz values of C
// are the smallest pencil eigenvalues.
bool lanczos_smallest(const Pencil& p, double sigma, int k, int max_iter,
                      std::vector<double>& lambdas, std::vector<Vec>& ys) {
  const int n = static_cast<int>(p.A->rows());
  SparseMat shifted = *p.A;
  if (sigma != 0.0) {
    SparseMat Ms(n, n);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i)
      t.emplace_back(i, i, p.sqrt_m[i] * p.sqrt_m[i]);
    Ms.setFromTriplets(t.begin(), t.end());
    shifted = *p.A - sigma * Ms;
  }
  Eigen::SimplicialLDLT<SparseMat> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) return false;

  auto apply = [&](const Vec& v) -> Vec {
    Vec rhs = p.sqrt_m.cwiseProduct(v);
    Vec sol = ldlt.solve(rhs);
    return p.sqrt_m.cwiseProduct(sol);
  };

  const int m_cap = std::min(n, max_iter);
  std::vector<Vec> V;
  V.reserve(m_cap + 1);
  std::vector<double> alpha, beta;
  Vec v = deterministic_start(n);
  v.normalize();
  V.push_back(v);

  Eigen::MatrixXd ritz_vecs;
  Eigen::VectorXd ritz_vals;
  int converged_upto = 0;

  for (int j = 0; j < m_cap; ++j) {
    Vec w = apply(V[j]);
    double a = V[j].dot(w);
    alpha.push_back(a);
    w -= a * V[j];
    if (j > 0) w -= beta[j - 1] * V[j - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& u : V) w -= u.dot(w) * u;
    double b = w.norm();
    if (b < 1e-13) {
      // invariant subspace hit: restart with a fresh orthogonal direction
      Vec fresh = deterministic_start(n);
      fresh[j % n] += 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const Vec& u : V) fresh -= u.dot(fresh) * u;
      double fn = fresh.norm();
      if (fn < 1e-13) { beta.push_back(0); break; }
      w = fresh / fn;
      b = 0.0;
    } else {
      w /= b;
    }
    beta.push_back(b);
    V.push_back(w);

    const int dim = j + 1;
    bool last = (j == m_cap - 1);
    if (dim >= k && (dim % 8 == 0 || last)) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
      for (int i = 0; i < dim; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      if (es.info() != Eigen::Success) continue;
      // largest k Ritz values of C
      converged_upto = 0;
      for (int i = 0; i < k; ++i) {
        int idx = dim - 1 - i;
        if (idx < 0) break;
        double theta = es.eigenvalues()[idx];
        double res = std::abs(beta[dim - 1] * es.eigenvectors()(dim - 1, idx));
        if (theta <= 0 || res > 1e-11 * std::max(1.0, std::abs(theta))) break;
        ++converged_upto;
      }
      if (converged_upto >= k || last) {
        if (converged_upto < k && !last) continue;
        ritz_vals = es.eigenvalues();
        ritz_vecs = es.eigenvectors();
        if (converged_upto >= k) break;
      }
    }
  }
  if (ritz_vals.size() == 0 || converged_upto < k) return false;

  const int dim = static_cast<int>(ritz_vals.size());
  lambdas.clear();
  ys.clear();
  for (int i = 0; i < k; ++i) {
    int idx = dim - 1 - i;
    double theta = ritz_vals[idx];
    lambdas.push_back(sigma + 1.0 / theta);
    Vec y = Vec::Zero(n);
    for (int c = 0; c < dim; ++c) y += ritz_vecs(c, idx) * V[c];
    y.normalize();
    ys.push_back(y);
  }
  // ascending eigenvalues
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lambdas[a] < lambdas[b]; });
  std::vector<double> l2;
  std::vector<Vec> y2;
  for (int i : order) {
    l2.push_back(lambdas[i]);
    y2.push_back(ys[i]);
  }
  lambdas = std::move(l2);
  ys = std::move(y2);
  return true;
}

}  // namespace

SpectralBasis dirichlet_eigensystem(const DiscreteOperator& op, int k) {
  const int n = op.size();
  if (k < 1 || k > n)
    fail(ErrorCode::ConvergenceFailure, "requested mode count exceeds interior size");

  Vec sqrt_m = op.mass().cwiseSqrt();
  Vec inv_sqrt_m = sqrt_m.cwiseInverse();

  std::vector<double> lambdas;
  std::vector<Vec> ys;  // eigenvectors of the standard form

  if (n <= 1200) {
    Eigen::MatrixXd B = Eigen::MatrixXd(op.stiffness());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) *= inv_sqrt_m[i] * inv_sqrt_m[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
    for (int i = 0; i < k; ++i) {
      lambdas.push_back(es.eigenvalues()[i]);
      ys.push_back(es.eigenvectors().col(i));
    }
  } else {
    Pencil p{&op.stiffness(), sqrt_m, inv_sqrt_m};
    int max_iter = std::min(n, std::max(4 * k + 60, 120));
    bool ok = lanczos_smallest(p, 0.0, k, max_iter, lambdas, ys);
    if (!ok) ok = lanczos_smallest(p, -1e-8, k, max_iter, lambdas, ys);
    if (!ok) fail(ErrorCode::ConvergenceFailure, "Lanczos iteration budget exceeded");
  }

  SpectralBasis basis;
  basis.op = &op;
  const Mesh& mesh = op.mesh();
  for (int i = 0; i < k; ++i) {
    Vec phi_rows = inv_sqrt_m.cwiseProduct(ys[i]);
    Vec full = Vec::Zero(mesh.num_nodes());
    for (int r = 0; r < n; ++r) full[op.node_of_row(r)] = phi_rows[r];
    basis.eigenvalues.push_back(lambdas[i]);
    basis.eigenvectors.push_back(full);
  }
  Vec full_mass(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) full_mass[i] = mesh.node(i).mass;
  for (Vec& phi : basis.eigenvectors) canonical_sign(phi, full_mass);

  // residual guard: refuse partial results
  for (int i = 0; i < k; ++i) {
    Vec phi = op.restrict_to_rows(basis.eigenvectors[i]);
    Vec r = op.stiffness() * phi - basis.eigenvalues[i] * op.mass().cwiseProduct(phi);
    double ref = (op.stiffness() * phi).norm();
    if (r.norm() > 1e-8 * std::max(ref, 1e-30))
      fail(ErrorCode::ConvergenceFailure, "eigenpair residual above tolerance");
  }
  return basis;
}

double smallest_eigenvalue(const DiscreteOperator& op) {
  return dirichlet_eigensystem(op, 1).eigenvalues[0];
}

HeatValue heat_kernel(const SpectralBasis& basis, double t, int x, int y) {
  if (!(t > 0)) fail(ErrorCode::InvalidPoint, "heat kernel needs t > 0");
  if (basis.count() < 1) fail(ErrorCode::ConvergenceFailure, "empty basis");
  const Mesh& mesh = basis.op->mesh();
  if (x < 0 || x >= mesh.num_nodes() || y < 0 || y >= mesh.num_nodes())
    fail(ErrorCode::InvalidPoint, "node out of range");
  double value = 0.0;
  for (int i = 0; i < basis.count(); ++i)
    value += std::exp(-basis.eigenvalues[i] * t) * basis.eigenvectors[i][x] *
             basis.eigenvectors[i][y];
  HeatValue out;
  out.value = value;
  const int interior = static_cast<int>(basis.op->size());
  if (basis.count() < interior) {
    double mx = mesh.node(x).mass, my = mesh.node(y).mass;
    out.tail_bound = (interior - basis.count()) *
                     std::exp(-basis.eigenvalues.back() * t) / std::sqrt(mx * my);
  }
  return out;
}

double heat_mass(const SpectralBasis& basis, double t, int x) {
  if (!(t > 0)) fail(ErrorCode::InvalidPoint, "heat mass needs t > 0");
  const Mesh& mesh = basis.op->mesh();
  double total = 0.0;
  for (int i = 0; i < basis.count(); ++i) {
    double w = 0.0;
    for (int nd = 0; nd < mesh.num_nodes(); ++nd)
      w += basis.eigenvectors[i][nd] * mesh.node(nd).mass;
    total += std::exp(-basis.eigenvalues[i] * t) * basis.eigenvectors[i][x] * w;
  }
  return total;
}

namespace {

// Fit L + c/(R+a)^2 (+ d/(R+a)^4 with >= 4 points) to the tail of the
// exhaustion sequence; grid-refined search over the offset a.
bool power_extrapolate(const std::vector<double>& radii, const std::vector<double>& vals,
                       double& out) {
  const int n = static_cast<int>(radii.size());
  if (n < 3) return false;
  const int use = std::min(n, 4);
  std::vector<double> R(radii.end() - use, radii.end());
  std::vector<double> y(vals.end() - use, vals.end());
  const int terms = use >= 4 ? 3 : 2;  // [1, w, w^2] with w = 1/(R+a)^2

  auto residual = [&](double a, double* L_out) {
    Eigen::MatrixXd X(use, terms);
    Eigen::VectorXd b(use);
    for (int i = 0; i < use; ++i) {
      double w = 1.0 / ((R[i] + a) * (R[i] + a));
      X(i, 0) = 1.0;
      X(i, 1) = w;
      if (terms == 3) X(i, 2) = w * w;
      b(i) = y[i];
    }
    Eigen::VectorXd coef = X.colPivHouseholderQr().solve(b);
    if (L_out) *L_out = coef[0];
    return (X * coef - b).norm();
  };

  double lo = -R.front() + 0.25, hi = 200.0;
  double best_a = lo, best_r = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 4; ++round) {
    const int grid = 80;
    for (int i = 0; i <= grid; ++i) {
      double a = lo + (hi - lo) * i / grid;
      double r = residual(a, nullptr);
      if (r < best_r) {
        best_r = r;
        best_a = a;
      }
    }
    double span = (hi - lo) / grid * 4;
    lo = std::max(-R.front() + 0.25, best_a - span);
    hi = best_a + span;
  }
  double L = 0.0;
  residual(best_a, &L);
  if (!std::isfinite(L) || L > vals.back() + 1e-12 || L < -0.1 * std::abs(vals.back()))
    return false;
  out = std::max(0.0, L);
  return true;
}

}  // namespace

Lambda0Report lambda0_exhaustion(const MetricGraph& g, GraphPoint x0,
                                 const std::vector<double>& radii, double h) {
  if (radii.empty()) fail(ErrorCode::RadiusExceedsTruncation, "no radii given");
  Lambda0Report rep;
  rep.h = h;
  for (double R : radii) {
    if (g.truncation_radius() >= 0 && R > g.truncation_radius() + 1e-12)
      fail(ErrorCode::RadiusExceedsTruncation,
           "ball radius " + std::to_string(R) + " exceeds truncation");
    Domain ball = Domain::make(g, {{x0, R}});
    Mesh mesh = Mesh::build(ball, h);
    DiscreteOperator op = assemble_operator(mesh, true);
    rep.radii.push_back(R);
    rep.values.push_back(smallest_eigenvalue(op));
  }
  rep.estimate = rep.values.back();
  rep.last_decrement = rep.values.size() >= 2
                           ? rep.values[rep.values.size() - 2] - rep.values.back()
                           : 0.0;
  if (rep.values.size() >= 3) {
    double a = rep.values[rep.values.size() - 3];
    double b = rep.values[rep.values.size() - 2];
    double c = rep.values.back();
    double denom = (c - b) - (b - a);
    rep.aitken = std::abs(denom) > 1e-15 ? c - (c - b) * (c - b) / denom : c;
  } else {
    rep.aitken = rep.estimate;
  }
  rep.power_fit_valid = power_extrapolate(rep.radii, rep.values, rep.power_fit);
  if (!rep.power_fit_valid) rep.power_fit = rep.aitken;
  return rep;
}

MaxPrincipleReport maximum_principle_check(const DiscreteOperator& op, const Vec& u0,
                                           double T, int steps) {
  if (u0.size() != op.size()) fail(ErrorCode::ZeroVector, "initial data size mismatch");
  if (steps < 1 || !(T > 0)) fail(ErrorCode::InvalidPoint, "bad time interval");
  const double dt = T / steps;
  SparseMat M(op.size(), op.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < op.size(); ++i) t.emplace_back(i, i, op.mass()[i]);
  M.setFromTriplets(t.begin(), t.end());
  SparseMat lhs = M + dt * op.stiffness();
  Eigen::SimplicialLDLT<SparseMat> ldlt(lhs);
  if (ldlt.info() != Eigen::Success) fail(ErrorCode::SolveFailure, "heat step factorization failed");

  MaxPrincipleReport rep;
  rep.steps = steps;
  double parabolic_max = u0.maxCoeff();
  const bool has_boundary = op.dirichlet() && !op.mesh().boundary_nodes().empty();
  if (has_boundary) parabolic_max = std::max(parabolic_max, 0.0);
  double interior_max = -std::numeric_limits<double>::infinity();
  rep.min_value = u0.minCoeff();
  Vec u = u0;
  for (int s = 0; s < steps; ++s) {
    u = ldlt.solve(op.mass().cwiseProduct(u).eval());
    interior_max = std::max(interior_max, u.maxCoeff());
    rep.min_value = std::min(rep.min_value, u.minCoeff());
  }
  rep.violation = interior_max - parabolic_max;
  return rep;
}

}  // namespace graphpot
