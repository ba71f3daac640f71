// Stiffness/mass pair realizing the energy form and the Kirchhoff Laplacian
// on a mesh. A is the graph Laplacian of the segment network with weights
// 1/len; M is the lumped (diagonal) mass. With Dirichlet applied, boundary
// rows and columns are eliminated so the pencil acts on interior nodes.
#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphpot/mesh.hpp"

namespace graphpot {

using SparseMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

class DiscreteOperator {
 public:
  const Mesh& mesh() const { return *mesh_; }
  const SparseMat& stiffness() const { return A_; }
  const Vec& mass() const { return mass_; }
  bool dirichlet() const { return dirichlet_; }

  int size() const { return static_cast<int>(A_.rows()); }
  // row index <-> mesh node id
  int node_of_row(int r) const { return node_of_row_[r]; }
  int row_of_node(int n) const { return row_of_node_[n]; }
  const std::vector<int>& rows_to_nodes() const { return node_of_row_; }

  // Lift a row vector to all mesh nodes (zero on eliminated boundary).
  Vec lift(const Vec& reduced) const;
  Vec restrict_to_rows(const Vec& full) const;

  void export_matrix(const std::string& matrix_path, const std::string& mass_path) const;

  friend DiscreteOperator assemble_operator(const Mesh& mesh, bool dirichlet);

 private:
  const Mesh* mesh_ = nullptr;
  SparseMat A_;
  Vec mass_;
  bool dirichlet_ = false;
  std::vector<int> node_of_row_, row_of_node_;
};

DiscreteOperator assemble_operator(const Mesh& mesh, bool dirichlet);

double rayleigh_quotient(const DiscreteOperator& op, const Vec& f);

// Owns one domain -> mesh -> operator chain at stable addresses. The graph
// stays caller-owned and must outlive the stack.
struct MeshStack {
  std::unique_ptr<Domain> domain;
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<DiscreteOperator> op;

  static MeshStack build(const MetricGraph& g, const std::vector<BallSpec>& balls,
                         const std::vector<BallSpec>& holes, double h, bool dirichlet);
  static MeshStack build(Domain&& resolved, double h, bool dirichlet);
};

}  // namespace graphpot
