// Dirichlet eigensystems of the (A, M) pencil, the spectral heat kernel,
// exhaustion estimates for the bottom of the spectrum, and the implicit
// Euler maximum-principle check.
#pragma once

#include <vector>

#include "graphpot/builders.hpp"
#include "graphpot/operators.hpp"

namespace graphpot {

// M-orthonormal eigenpairs, eigenvalues ascending. Eigenvectors are stored
// over all mesh nodes (zero on eliminated boundary nodes).
struct SpectralBasis {
  const DiscreteOperator* op = nullptr;
  std::vector<double> eigenvalues;
  std::vector<Vec> eigenvectors;  // full node-length vectors
  int count() const { return static_cast<int>(eigenvalues.size()); }
};

SpectralBasis dirichlet_eigensystem(const DiscreteOperator& op, int k);

// Convenience: smallest Dirichlet eigenvalue of the pencil.
double smallest_eigenvalue(const DiscreteOperator& op);

struct HeatValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

// Spectral kernel sum over the basis; x, y are mesh node ids.
HeatValue heat_kernel(const SpectralBasis& basis, double t, int x, int y);

// Total heat mass sum_y p(t,x,y) m_y.
double heat_mass(const SpectralBasis& basis, double t, int x);

struct Lambda0Report {
  std::vector<double> radii;
  std::vector<double> values;       // lambda_1 of B(x0, R)
  double estimate = 0.0;            // value at the largest radius
  double last_decrement = 0.0;      // error proxy
  double aitken = 0.0;              // Delta^2 accelerated value (labeled)
  double power_fit = 0.0;           // fit of L + c/(R+a)^2 (+ d/(R+a)^4)
  bool power_fit_valid = false;
  double h = 0.0;
};

Lambda0Report lambda0_exhaustion(const MetricGraph& g, GraphPoint x0,
                                 const std::vector<double>& radii, double h);

struct MaxPrincipleReport {
  double violation = 0.0;   // interior space-time max minus parabolic-boundary max
  double min_value = 0.0;   // most negative value seen over the run
  int steps = 0;
};

// Implicit Euler run of the heat equation with the assembled operator.
MaxPrincipleReport maximum_principle_check(const DiscreteOperator& op, const Vec& u0,
                                           double T, int steps);

}  // namespace graphpot
