#pragma once

#include "gradbif/grid.hpp"

namespace gradbif {

/// Principal Dirichlet eigenpair of the discrete -Δ; phi1 has max value 1.
struct EigenPair {
  double lambda1 = 0.0;
  ScalarField phi1;
  double residual = 0.0;  ///< ‖-Δ_h φ₁ - λ₁φ₁‖∞
  int iterations = 0;
};

/// Inverse power iteration from the all-ones field.
///
/// Stops when the eigenvalue increment is below tol·λ₁ and the residual is
/// below tol times the operator scale (λ₁ + ‖-Δ_h‖∞). Throws
/// std::runtime_error with the last residual when max_iter is exceeded.
EigenPair principal_eigenpair(const DomainSpec& domain, double tol = 1e-12, int max_iter = 1000);

struct BoundaryBounds {
  double c1 = 0.0;  ///< min φ₁/dist
  double c2 = 0.0;  ///< max φ₁/dist
};

BoundaryBounds eigen_boundary_bounds(const EigenPair& pair);

/// min and max of u/dist over the nodes.
BoundaryBounds boundary_ratios(const ScalarField& u);

}  // namespace gradbif
