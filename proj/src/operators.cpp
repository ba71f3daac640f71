#include "graphpot/operators.hpp"

#include <cstdio>
#include <fstream>

namespace graphpot {

DiscreteOperator assemble_operator(const Mesh& mesh, bool dirichlet) {
  DiscreteOperator op;
  op.mesh_ = &mesh;
  op.dirichlet_ = dirichlet;

  const int n_nodes = mesh.num_nodes();
  op.row_of_node_.assign(n_nodes, -1);
  if (dirichlet) {
    for (int id : mesh.interior_nodes()) {
      op.row_of_node_[id] = static_cast<int>(op.node_of_row_.size());
      op.node_of_row_.push_back(id);
    }
  } else {
    op.node_of_row_.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      op.node_of_row_[i] = i;
      op.row_of_node_[i] = i;
    }
  }

  const int n = static_cast<int>(op.node_of_row_.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.segments().size());
  for (const MeshSegment& s : mesh.segments()) {
    const double w = 1.0 / s.len;
    int ra = op.row_of_node_[s.a], rb = op.row_of_node_[s.b];
    if (ra >= 0) trip.emplace_back(ra, ra, w);
    if (rb >= 0) trip.emplace_back(rb, rb, w);
    if (ra >= 0 && rb >= 0) {
      trip.emplace_back(ra, rb, -w);
      trip.emplace_back(rb, ra, -w);
    }
  }
  op.A_.resize(n, n);
  op.A_.setFromTriplets(trip.begin(), trip.end());
  op.A_.makeCompressed();
  op.mass_.resize(n);
  for (int r = 0; r < n; ++r) op.mass_[r] = mesh.node(op.node_of_row_[r]).mass;
  return op;
}

Vec DiscreteOperator::lift(const Vec& reduced) const {
  Vec full = Vec::Zero(mesh_->num_nodes());
  for (int r = 0; r < size(); ++r) full[node_of_row_[r]] = reduced[r];
  return full;
}

Vec DiscreteOperator::restrict_to_rows(const Vec& full) const {
  Vec out(size());
  for (int r = 0; r < size(); ++r) out[r] = full[node_of_row_[r]];
  return out;
}

void DiscreteOperator::export_matrix(const std::string& matrix_path,
                                     const std::string& mass_path) const {
  std::ofstream mat(matrix_path);
  if (!mat) fail(ErrorCode::IoError, "cannot write " + matrix_path);
  char buf[96];
  for (int k = 0; k < A_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A_, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value());
      mat << buf;
    }
  std::ofstream ms(mass_path);
  if (!ms) fail(ErrorCode::IoError, "cannot write " + mass_path);
  for (int r = 0; r < size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g\n", mass_[r]);
    ms << buf;
  }
}

MeshStack MeshStack::build(const MetricGraph& g, const std::vector<BallSpec>& balls,
                           const std::vector<BallSpec>& holes, double h, bool dirichlet) {
  return build(Domain::make(g, balls, holes), h, dirichlet);
}

MeshStack MeshStack::build(Domain&& resolved, double h, bool dirichlet) {
  MeshStack st;
  st.domain = std::make_unique<Domain>(std::move(resolved));
  st.mesh = std::make_unique<Mesh>(Mesh::build(*st.domain, h));
  st.op = std::make_unique<DiscreteOperator>(assemble_operator(*st.mesh, dirichlet));
  return st;
}

double rayleigh_quotient(const DiscreteOperator& op, const Vec& f) {
  if (f.size() != op.size()) fail(ErrorCode::ZeroVector, "vector size mismatch");
  const double denom = f.dot(op.mass().cwiseProduct(f));
  if (denom <= 0) fail(ErrorCode::ZeroVector, "vector vanishes in the mass norm");
  return f.dot(op.stiffness() * f) / denom;
}

}  // namespace graphpot
