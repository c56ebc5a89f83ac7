#include "gradbif/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gradbif/linsolve.hpp"

namespace gradbif {

EigenPair principal_eigenpair(const DomainSpec& domain, double tol, int max_iter) {
  domain.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("eigenpair: tol must be positive");
  const std::size_t n = domain.size();
  const std::vector<double> zero(n, 0.0);
  double op_scale = 4.0 / (domain.hx() * domain.hx());
  if (domain.dim() == 2) op_scale += 4.0 / (domain.hy() * domain.hy());

  std::vector<double> x(n, 1.0), y(n, 0.0), ax(n);
  double lambda = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    // y = A^{-1} x, started from the previous direction scaled by 1/λ.
    if (lambda > 0.0) {
      for (std::size_t k = 0; k < n; ++k) y[k] = x[k] / lambda;
    }
    linsolve::solve_shifted_laplacian(domain, zero, x, y);
    const double ymax = *std::max_element(y.begin(), y.end());
    for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / ymax;

    stencil::neg_laplacian(domain, x, ax);
    const double num = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
    const double den = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    const double next = num / den;
    residual = 0.0;
    for (std::size_t k = 0; k < n; ++k) residual = std::max(residual, std::abs(ax[k] - next * x[k]));
    const double increment = std::abs(next - lambda);
    lambda = next;
    if (increment <= tol * lambda && residual <= tol * (lambda + op_scale)) {
      return {lambda, ScalarField(domain, x), residual, it};
    }
  }
  throw std::runtime_error("eigenpair: no convergence in " + std::to_string(max_iter) +
                           " iterations (residual " + format_real(residual) + ")");
}

BoundaryBounds boundary_ratios(const ScalarField& u) {
  const ScalarField dist = boundary_distance(u.domain());
  BoundaryBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double r = u[k] / dist[k];
    b.c1 = std::min(b.c1, r);
    b.c2 = std::max(b.c2, r);
  }
  return b;
}

BoundaryBounds eigen_boundary_bounds(const EigenPair& pair) { return boundary_ratios(pair.phi1); }

}  // namespace gradbif
