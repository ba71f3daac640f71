#include <doctest.h>

#include <cmath>

#include "graphpot/builders.hpp"
#include "graphpot/spectral.hpp"
#include "oracles.hpp"

using namespace graphpot;

namespace {

// domain/mesh/operator hold pointers up the chain, so the chain lives on the
// heap at stable addresses
struct Setup {
  std::unique_ptr<MetricGraph> graph;
  std::unique_ptr<Domain> domain;
  std::unique_ptr<Mesh> mesh_ptr;
  std::unique_ptr<DiscreteOperator> op_ptr;
  Mesh& mesh;
  DiscreteOperator& op;
};

Setup make_setup(MetricGraph&& g, const std::vector<BallSpec>& balls, double h) {
  auto graph = std::make_unique<MetricGraph>(std::move(g));
  auto domain = std::make_unique<Domain>(Domain::make(*graph, balls));
  auto mesh = std::make_unique<Mesh>(Mesh::build(*domain, h));
  auto op = std::make_unique<DiscreteOperator>(assemble_operator(*mesh, true));
  Mesh& mref = *mesh;
  DiscreteOperator& oref = *op;
  return {std::move(graph), std::move(domain), std::move(mesh), std::move(op), mref, oref};
}

Setup interval_setup(double h) {
  return make_setup(build_path(2, 1.0), {{GraphPoint{0, 0.5}, 0.5}}, h);
}

int node_at_offset(const Mesh& m, double offset) {
  auto hit = m.find_node(GraphPoint{0, offset});
  REQUIRE(hit.has_value());
  return *hit;
}

}  // namespace

TEST_CASE("interval spectrum matches (k pi)^2 within 0.2% at h=1/200") {
  Setup s = interval_setup(1.0 / 200);
  SpectralBasis basis = dirichlet_eigensystem(s.op, 3);
  for (int k = 1; k <= 3; ++k) {
    double exact = oracles::interval_dirichlet_eigenvalue(k);
    CHECK(std::abs(basis.eigenvalues[k - 1] - exact) / exact < 0.002);
  }
  // M-orthonormality and residuals
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int nd = 0; nd < s.mesh.num_nodes(); ++nd)
        dot += basis.eigenvectors[i][nd] * basis.eigenvectors[j][nd] * s.mesh.node(nd).mass;
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  }
  // ground state strictly positive on the interior
  for (int id : s.mesh.interior_nodes()) CHECK(basis.eigenvectors[0][id] > 0.0);
}

TEST_CASE("3-star lambda_1 matches the secular value pi^2/4 within 0.5%") {
  MetricGraph g = build_regular_tree(3, 1, 1.0);
  Domain d = Domain::make(g, {{g.vertex_point(0), 1.0}});
  Mesh m = Mesh::build(d, 1.0 / 200);
  DiscreteOperator op = assemble_operator(m, true);
  double l1 = smallest_eigenvalue(op);
  CHECK(std::abs(l1 - oracles::star3_lambda1()) / oracles::star3_lambda1() < 0.005);
}

TEST_CASE("Lanczos path agrees with the dense path on a mid-size domain") {
  // tree ball big enough to cross the dense-solver cutoff
  MetricGraph t = build_regular_tree(3, 8, 1.0);
  Domain d = Domain::make(t, {{t.vertex_point(0), 6.0}});
  Mesh m = Mesh::build(d, 0.125);
  DiscreteOperator op = assemble_operator(m, true);
  REQUIRE(op.size() > 1200);  // forces the iterative path
  SpectralBasis it = dirichlet_eigensystem(op, 6);
  // dense reference on the same matrix
  Eigen::MatrixXd B = Eigen::MatrixXd(op.stiffness());
  Vec inv_sqrt_m = op.mass().cwiseSqrt().cwiseInverse();
  for (int i = 0; i < op.size(); ++i)
    for (int j = 0; j < op.size(); ++j) B(i, j) *= inv_sqrt_m[i] * inv_sqrt_m[j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  for (int k = 0; k < 6; ++k)
    CHECK(it.eigenvalues[k] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-8));
}

TEST_CASE("heat kernel: symmetry, image-series oracle, Chapman-Kolmogorov") {
  Setup s = interval_setup(1.0 / 200);
  SpectralBasis basis = dirichlet_eigensystem(s.op, 60);
  int x = node_at_offset(s.mesh, 0.5);
  int y = node_at_offset(s.mesh, 0.3);

  for (double t : {0.05, 0.1, 0.5}) {
    HeatValue pv = heat_kernel(basis, t, x, y);
    HeatValue pr = heat_kernel(basis, t, y, x);
    CHECK(std::abs(pv.value - pr.value) <= 1e-14);
    double oracle = oracles::interval_heat_kernel_images(t, 0.5, 0.3);
    CHECK(std::abs(pv.value - oracle) / oracle < 1e-3);
  }
  // x = y diagonal against the oracle
  double diag = heat_kernel(basis, 0.05, x, x).value;
  CHECK(std::abs(diag - oracles::interval_heat_kernel_images(0.05, 0.5, 0.5)) /
            oracles::interval_heat_kernel_images(0.05, 0.5, 0.5) <
        1e-3);

  // Chapman-Kolmogorov at (t, s) pairs via discrete quadrature
  for (auto [t, u] : {std::pair{0.05, 0.05}, {0.1, 0.05}, {0.2, 0.3}}) {
    double conv = 0.0;
    for (int nd = 0; nd < s.mesh.num_nodes(); ++nd)
      conv += heat_kernel(basis, t, x, nd).value * heat_kernel(basis, u, nd, y).value *
              s.mesh.node(nd).mass;
    double direct = heat_kernel(basis, t + u, x, y).value;
    CHECK(std::abs(conv - direct) / std::abs(direct) < 1e-6);
  }

  // truncation bound reported and decreasing in t
  SpectralBasis small = dirichlet_eigensystem(s.op, 8);
  HeatValue a = heat_kernel(small, 0.05, x, y);
  HeatValue b = heat_kernel(small, 0.5, x, y);
  CHECK(a.tail_bound > 0.0);
  CHECK(b.tail_bound < a.tail_bound);
}

TEST_CASE("heat kernel positivity on connected domains") {
  MetricGraph t = build_regular_tree(3, 4, 1.0);
  Domain d = Domain::make(t, {{t.vertex_point(0), 3.0}});
  Mesh m = Mesh::build(d, 0.25);
  DiscreteOperator op = assemble_operator(m, true);
  // full basis: the spectral sum is then the exact positive semigroup kernel
  SpectralBasis basis = dirichlet_eigensystem(op, op.size());
  int x = *m.find_node(t.vertex_point(0));
  for (double tt : {0.1, 0.5, 1.0})
    for (int id : m.interior_nodes())
      CHECK(heat_kernel(basis, tt, x, id).value > 0.0);
}

TEST_CASE("heat mass: sub-stochastic, small-t limit, exhaustion toward 1") {
  Setup s = interval_setup(1.0 / 100);
  int x = node_at_offset(s.mesh, 0.5);
  // full basis: discrete sub-stochasticity is exact
  SpectralBasis full = dirichlet_eigensystem(s.op, s.op.size());
  for (double t : {1e-4, 0.01, 0.05, 0.5, 1.0, 3.0}) {
    double mass = heat_mass(full, t, x);
    CHECK(mass <= 1.0 + 1e-8);
    CHECK(mass > 0.0);
  }
  CHECK(heat_mass(full, 1e-4, x) == doctest::Approx(1.0).epsilon(1e-3));

  // exhaustion on the long path graph: mass at t=0.5 grows toward 1 in R
  MetricGraph lp = build_path(21, 1.0);
  GraphPoint center = lp.vertex_point(10);
  double prev = 0.0;
  for (double R : {2.0, 4.0, 8.0}) {
    Domain ball = Domain::make(lp, {{center, R}});
    Mesh mesh = Mesh::build(ball, 0.05);
    DiscreteOperator op = assemble_operator(mesh, true);
    SpectralBasis basis = dirichlet_eigensystem(op, std::min(120, op.size()));
    double mass = heat_mass(basis, 0.5, *mesh.find_node(center));
    CHECK(mass <= 1.0 + 1e-8);
    CHECK(mass >= prev - 1e-9);
    prev = mass;
  }
  CHECK(prev > 1.0 - 1e-2);
}

TEST_CASE("exhaustion kernel values grow with the domain") {
  MetricGraph lp = build_path(21, 1.0);
  GraphPoint center = lp.vertex_point(10);
  GraphPoint probe = lp.vertex_point(11);
  double prev = 0.0;
  for (double R : {2.0, 4.0, 6.0, 8.0}) {
    Domain ball = Domain::make(lp, {{center, R}});
    Mesh mesh = Mesh::build(ball, 0.05);
    DiscreteOperator op = assemble_operator(mesh, true);
    SpectralBasis basis = dirichlet_eigensystem(op, std::min(140, op.size()));
    double v = heat_kernel(basis, 0.5, *mesh.find_node(center), *mesh.find_node(probe)).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("eigenvalue domain monotonicity over nested balls") {
  MetricGraph t = build_regular_tree(3, 7, 1.0);
  GraphPoint root = t.vertex_point(0);
  double prev = std::numeric_limits<double>::infinity();
  for (double R : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    Domain ball = Domain::make(t, {{root, R}});
    Mesh mesh = Mesh::build(ball, 0.25);
    DiscreteOperator op = assemble_operator(mesh, true);
    double l1 = smallest_eigenvalue(op);
    CHECK(l1 <= prev + 1e-12);
    prev = l1;
  }
}

TEST_CASE("lambda0 exhaustion: path graph matches (pi/2R)^2 and tends to zero") {
  MetricGraph lp = build_path(41, 1.0);
  GraphPoint center = lp.vertex_point(20);
  Lambda0Report rep = lambda0_exhaustion(lp, center, {4, 8, 12, 16}, 0.05);
  for (size_t i = 0; i < rep.radii.size(); ++i) {
    double exact = std::pow(M_PI / (2 * rep.radii[i]), 2);
    CHECK(std::abs(rep.values[i] - exact) / exact < 0.01);
  }
  for (size_t i = 1; i < rep.values.size(); ++i)
    CHECK(rep.values[i] <= rep.values[i - 1] + 1e-12);
  CHECK(rep.power_fit < 0.2 * rep.values.front());
  CHECK(rep.estimate == doctest::Approx(rep.values.back()));
  CHECK(rep.last_decrement > 0.0);
}

TEST_CASE("lambda0 exhaustion: 3-regular tree extrapolates to the band edge") {
  MetricGraph t = build_regular_tree(3, 10, 1.0);
  GraphPoint root = t.vertex_point(0);
  Lambda0Report rep = lambda0_exhaustion(t, root, {4, 6, 8, 10}, 0.125);
  for (size_t i = 1; i < rep.values.size(); ++i)
    CHECK(rep.values[i] <= rep.values[i - 1] + 1e-12);
  // the raw last value overshoots; the labeled extrapolation must land close
  double oracle = oracles::tree3_lambda0();
  CHECK(rep.power_fit_valid);
  CHECK(std::abs(rep.power_fit - oracle) / oracle < 0.05);
  CHECK(rep.estimate > oracle);  // monotone from above
  CHECK_THROWS_WITH_AS(lambda0_exhaustion(t, root, {20}, 0.125),
                       doctest::Contains("RadiusExceedsTruncation"), Error);
}

TEST_CASE("maximum principle under implicit Euler") {
  Setup s = interval_setup(0.02);
  // bump initial data
  Vec u0 = Vec::Zero(s.op.size());
  for (int r = 0; r < s.op.size(); ++r) {
    double x = s.mesh.node(s.op.node_of_row(r)).point.offset;
    u0[r] = std::max(0.0, 0.1 - std::abs(x - 0.5)) * 10.0;
  }
  MaxPrincipleReport rep = maximum_principle_check(s.op, u0, 1.0, 200);
  CHECK(rep.violation <= 1e-10);
  CHECK(rep.min_value >= -1e-12);  // positivity preserved

  // constant data on a compact graph without boundary stays constant
  MetricGraph cyc = build_cycle(8, 1.0);
  Mesh mc = Mesh::build(Domain::whole(cyc), 0.25);
  DiscreteOperator free_op = assemble_operator(mc, false);
  Vec c0 = Vec::Constant(free_op.size(), 0.7);
  MaxPrincipleReport crep = maximum_principle_check(free_op, c0, 0.5, 50);
  CHECK(crep.violation <= 1e-10);
  CHECK(crep.min_value == doctest::Approx(0.7).epsilon(1e-12));
}
