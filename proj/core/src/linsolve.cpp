#include "gradbif/linsolve.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradbif::linsolve {

void thomas(std::span<const double> sub, std::span<const double> diag,
            std::span<const double> sup, std::span<const double> rhs, std::span<double> x) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n);
  double beta = diag[0];
  c[0] = sup[0] / beta;
  d[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = diag[i] - sub[i] * c[i - 1];
    c[i] = i + 1 < n ? sup[i] / beta : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

CgStats solve_shifted_laplacian(const DomainSpec& domain, std::span<const double> shift,
                                std::span<const double> rhs, std::span<double> x,
                                double cg_tol, int cg_max_iter) {
  const std::size_t n = domain.size();
  if (shift.size() != n || rhs.size() != n || x.size() != n) {
    throw std::invalid_argument("solve_shifted_laplacian: size mismatch");
  }
  CgStats stats;
  if (domain.dim() == 1) {
    const double ih2 = 1.0 / (domain.hx() * domain.hx());
    std::vector<double> sub(n, -ih2), sup(n, -ih2), diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * ih2 + shift[i];
    thomas(sub, diag, sup, rhs, x);
    stats.converged = true;
    return stats;
  }

  const double dshift = 2.0 / (domain.hx() * domain.hx()) + 2.0 / (domain.hy() * domain.hy());
  std::vector<double> r(n), z(n), p(n), ap(n), inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / (dshift + shift[k]);

  auto apply = [&](std::span<const double> v, std::span<double> out) {
    stencil::neg_laplacian(domain, v, out);
    for (std::size_t k = 0; k < n; ++k) out[k] += shift[k] * v[k];
  };

  apply(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
  const double bnorm = std::sqrt(dot(rhs, rhs));
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);
  const int max_iter = cg_max_iter > 0 ? cg_max_iter : static_cast<int>(4 * n + 100);
  double rnorm = std::sqrt(dot(r, r));
  while (stats.iterations < max_iter && rnorm > cg_tol * scale) {
    apply(p, ap);
    const double alpha = rz / dot(p, ap);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    rnorm = std::sqrt(dot(r, r));
    ++stats.iterations;
  }
  stats.relative_residual = rnorm / scale;
  // Near-converged stagnation at rounding level is acceptable.
  stats.converged = stats.relative_residual <= std::max(cg_tol, 1e-12);
  return stats;
}

bool sparse_lu_solve(std::size_t n, const Triplets& entries, std::span<const double> rhs,
                     std::span<double> x) {
  Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  jac.setFromTriplets(entries.begin(), entries.end());
  jac.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(jac);
  lu.factorize(jac);
  if (lu.info() != Eigen::Success) return false;
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd sol = lu.solve(b);
  if (lu.info() != Eigen::Success) return false;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(sol[static_cast<Eigen::Index>(k)])) return false;
    x[k] = sol[static_cast<Eigen::Index>(k)];
  }
  return true;
}

}  // namespace gradbif::linsolve
