#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <span>
#include <vector>

#include "gradbif/grid.hpp"

namespace gradbif::linsolve {

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Solves (-Δ_h + diag(shift)) x = rhs for shift >= 0.
///
/// Intervals use the Thomas algorithm on the tridiagonal band; rectangles use
/// Jacobi-preconditioned conjugate gradients started from `x` (reduction order
/// is fixed, so results are bitwise reproducible).
CgStats solve_shifted_laplacian(const DomainSpec& domain, std::span<const double> shift,
                                std::span<const double> rhs, std::span<double> x,
                                double cg_tol = 1e-14, int cg_max_iter = 0);

/// Tridiagonal solve without pivoting; sub[0] and sup[n-1] are ignored.
void thomas(std::span<const double> sub, std::span<const double> diag,
            std::span<const double> sup, std::span<const double> rhs, std::span<double> x);

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Sparse LU solve of J x = rhs assembled from triplets. Returns false when the
/// factorization reports a singular or numerically broken matrix.
bool sparse_lu_solve(std::size_t n, const Triplets& entries, std::span<const double> rhs,
                     std::span<double> x);

}  // namespace gradbif::linsolve
