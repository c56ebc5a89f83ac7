#include "equation.hpp"

#include <cmath>
#include <limits>

namespace gradbif::detail {

namespace {

// Neighbour offsets of node k: calls fn(j, inv_h2, inv_2h, axis, sign) with
// j = -1 for a boundary ghost.
template <class Fn>
void for_neighbours(const DomainSpec& d, std::size_t k, Fn&& fn) {
  const int n = d.n;
  const double ihx2 = 1.0 / (d.hx() * d.hx());
  const double ihx = 0.5 / d.hx();
  if (d.dim() == 1) {
    const int i = static_cast<int>(k);
    fn(i > 0 ? static_cast<long>(k) - 1 : -1L, ihx2, ihx, 0, -1.0);
    fn(i + 1 < n ? static_cast<long>(k) + 1 : -1L, ihx2, ihx, 0, 1.0);
    return;
  }
  const double ihy2 = 1.0 / (d.hy() * d.hy());
  const double ihy = 0.5 / d.hy();
  const int i = static_cast<int>(k) / n;
  const int j = static_cast<int>(k) % n;
  const long kk = static_cast<long>(k);
  fn(i > 0 ? kk - n : -1L, ihx2, ihx, 0, -1.0);
  fn(i + 1 < n ? kk + n : -1L, ihx2, ihx, 0, 1.0);
  fn(j > 0 ? kk - 1 : -1L, ihy2, ihy, 1, -1.0);
  fn(j + 1 < n ? kk + 1 : -1L, ihy2, ihy, 1, 1.0);
}

constexpr double kGradDelta2 = 1e-32;

}  // namespace

DirectEquation::DirectEquation(const ProblemSpec& problem, double g_shift)
    : problem_(problem), g_shift_(g_shift), weight_(weight_field(problem.domain, problem.f)) {}

void DirectEquation::residual(std::span<const double> u, std::span<double> r,
                              std::span<double> scale) const {
  const DomainSpec& d = problem_.domain;
  const std::size_t n = d.size();
  std::vector<double> grad(n, 0.0);
  stencil::neg_laplacian(d, u, r);
  if (problem_.lambda != 0.0) stencil::gradient_p(d, u, problem_.p, grad);
  if (!scale.empty()) stencil::neg_laplacian_magnitude(d, u, scale);
  for (std::size_t k = 0; k < n; ++k) {
    const double gv = eval_g(problem_.g, u[k] + g_shift_);
    const double conv = problem_.lambda * grad[k];
    const double src = problem_.mu == 0.0 ? 0.0 : problem_.mu * weight_[k] * eval_f_profile(problem_.f, u[k]);
    r[k] -= gv + conv + src;
    if (!scale.empty()) scale[k] += std::abs(gv) + std::abs(conv) + std::abs(src);
  }
}

void DirectEquation::jacobian(std::span<const double> u, linsolve::Triplets& out) const {
  const DomainSpec& d = problem_.domain;
  const std::size_t n = d.size();
  const double lambda = problem_.lambda, p = problem_.p;
  std::vector<double> gx(n), gy(n);
  if (lambda != 0.0) stencil::gradient(d, u, gx, gy);
  out.clear();
  out.reserve(n * (2 * d.dim() + 1));
  for (std::size_t k = 0; k < n; ++k) {
    double diag = -eval_g_derivative(problem_.g, u[k] + g_shift_);
    if (problem_.mu != 0.0) {
      diag -= problem_.mu * weight_[k] * eval_f_profile_derivative(problem_.f, u[k]);
    }
    // d|∇u|^p = p (|∇u|² + δ²)^{(p-2)/2} ∇u · d∇u
    double coef = 0.0;
    if (lambda != 0.0) {
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      coef = lambda * (p == 2.0 ? 2.0 : p * std::pow(g2 + kGradDelta2, 0.5 * (p - 2.0)));
    }
    for_neighbours(d, k, [&](long j, double ih2, double i2h, int axis, double sign) {
      diag += ih2;
      if (j < 0) return;
      const double gcomp = axis == 0 ? gx[k] : gy[k];
      out.emplace_back(static_cast<int>(k), static_cast<int>(j), -ih2 - coef * gcomp * sign * i2h);
    });
    out.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
}

LogEquation::LogEquation(const ProblemSpec& problem, double offset)
    : problem_(problem), weight_(weight_field(problem.domain, problem.f)), offset_(offset) {}

void LogEquation::residual(std::span<const double> u, std::span<double> r,
                           std::span<double> scale) const {
  const DomainSpec& d = problem_.domain;
  const double lambda = problem_.lambda;
  for (std::size_t k = 0; k < d.size(); ++k) {
    double acc = 0.0, mag = 0.0;
    for_neighbours(d, k, [&](long j, double ih2, double, int, double) {
      const double uj = j < 0 ? -offset_ : u[static_cast<std::size_t>(j)];
      const double e = std::exp(lambda * (uj - u[k]));
      acc += (1.0 - e) * ih2;
      mag += (1.0 + e) * ih2;
    });
    const double gv = eval_g(problem_.g, u[k] + offset_);
    const double src = problem_.mu * weight_[k];
    r[k] = acc / lambda - gv - src;
    if (!scale.empty()) scale[k] = mag / lambda + std::abs(gv) + src;
  }
}

void LogEquation::jacobian(std::span<const double> u, linsolve::Triplets& out) const {
  const DomainSpec& d = problem_.domain;
  const double lambda = problem_.lambda;
  out.clear();
  out.reserve(d.size() * (2 * d.dim() + 1));
  for (std::size_t k = 0; k < d.size(); ++k) {
    double diag = -eval_g_derivative(problem_.g, u[k] + offset_);
    for_neighbours(d, k, [&](long j, double ih2, double, int, double) {
      const double uj = j < 0 ? -offset_ : u[static_cast<std::size_t>(j)];
      const double e = std::exp(lambda * (uj - u[k])) * ih2;
      diag += e;
      if (j >= 0) out.emplace_back(static_cast<int>(k), static_cast<int>(j), -e);
    });
    out.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
}

ExpEquation::ExpEquation(const ProblemSpec& problem)
    : problem_(problem), weight_(weight_field(problem.domain, problem.f)) {}

void ExpEquation::residual(std::span<const double> v, std::span<double> r,
                           std::span<double> scale) const {
  const DomainSpec& d = problem_.domain;
  const double lambda = problem_.lambda;
  for (std::size_t k = 0; k < d.size(); ++k) {
    double acc = 0.0, mag = 0.0;
    for_neighbours(d, k, [&](long j, double ih2, double, int, double) {
      const double vj = j < 0 ? 0.0 : v[static_cast<std::size_t>(j)];
      acc += (v[k] - vj) * ih2;
      mag += (std::abs(v[k]) + std::abs(vj)) * ih2;
    });
    const double phi =
        lambda * (v[k] + 1.0) * (eval_g(problem_.g, to_field(v[k])) + problem_.mu * weight_[k]);
    r[k] = acc - phi;
    if (!scale.empty()) scale[k] = mag + std::abs(phi);
  }
}

void ExpEquation::jacobian(std::span<const double> v, linsolve::Triplets& out) const {
  const DomainSpec& d = problem_.domain;
  const double lambda = problem_.lambda;
  out.clear();
  out.reserve(d.size() * (2 * d.dim() + 1));
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double u = to_field(v[k]);
    // Φ'(s) = λ(g(u) + μw) + g'(u), u = ln(s + 1)/λ
    double diag = -(lambda * (eval_g(problem_.g, u) + problem_.mu * weight_[k]) +
                    eval_g_derivative(problem_.g, u));
    for_neighbours(d, k, [&](long j, double ih2, double, int, double) {
      diag += ih2;
      if (j >= 0) out.emplace_back(static_cast<int>(k), static_cast<int>(j), -ih2);
    });
    out.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
}

double scaled_residual_inf(const Equation& eq, std::span<const double> u) {
  const std::size_t n = eq.domain().size();
  std::vector<double> r(n), s(n);
  eq.residual(u, r, s);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = std::abs(r[k]) / (1.0 + s[k]);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace gradbif::detail
