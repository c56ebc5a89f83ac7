#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gradbif/linsolve.hpp"
#include "gradbif/problem.hpp"

namespace gradbif::detail {

/// Discrete nonlinear system R(u) = 0 on the interior nodes.
class Equation {
 public:
  virtual ~Equation() = default;
  virtual const DomainSpec& domain() const = 0;
  /// Fills r = R(u) and, when `scale` is non-empty, the per-node magnitude of
  /// the terms making up R_i (used to scale the residual).
  virtual void residual(std::span<const double> u, std::span<double> r,
                        std::span<double> scale) const = 0;
  virtual void jacobian(std::span<const double> u, linsolve::Triplets& out) const = 0;
  /// Maps between the unknown x and the field value u.
  virtual double to_field(double x) const { return x; }
  virtual double to_unknown(double u) const { return u; }
};

/// R(u) = -Δ_h u - g(u + g_shift) - λ|∇_h u|^p - μ w(x) f(u).
class DirectEquation final : public Equation {
 public:
  DirectEquation(const ProblemSpec& problem, double g_shift);
  const DomainSpec& domain() const override { return problem_.domain; }
  void residual(std::span<const double> u, std::span<double> r,
                std::span<double> scale) const override;
  void jacobian(std::span<const double> u, linsolve::Triplets& out) const override;

 private:
  ProblemSpec problem_;
  double g_shift_;
  std::vector<double> weight_;
};

/// p = 2 with s-independent f, written for u after the exponential change of
/// variables v = e^{λu} - 1:
/// R_i = Σ_j (1 - e^{λ(u_j - u_i)}) / (λ h_j²) - g(u_i) - μ w(x_i),
/// summed over the stencil neighbours j (u_j = 0 on the boundary).
///
/// The unknown is z = u - c for a fixed c, so that differences z_j - z_i keep
/// full precision when u is large and nearly flat.
class LogEquation final : public Equation {
 public:
  explicit LogEquation(const ProblemSpec& problem, double offset = 0.0);
  double to_field(double x) const override { return x + offset_; }
  double to_unknown(double u) const override { return u - offset_; }
  const DomainSpec& domain() const override { return problem_.domain; }
  void residual(std::span<const double> u, std::span<double> r,
                std::span<double> scale) const override;
  void jacobian(std::span<const double> u, linsolve::Triplets& out) const override;

 private:
  ProblemSpec problem_;
  std::vector<double> weight_;
  double offset_;
};

/// The same system in v = e^{λu} - 1: R_i = -Δ_h v - Φ(v_i) with
/// Φ(s) = λ(s + 1)(g(ln(s + 1)/λ) + μ w(x)). Equals the LogEquation residual
/// times λe^{λu_i}, so the roots agree, but Φ is close to linear for large v
/// and Newton behaves well from far above the solution. Needs λu small enough
/// for e^{λu} to stay finite.
class ExpEquation final : public Equation {
 public:
  explicit ExpEquation(const ProblemSpec& problem);
  double to_field(double x) const override { return std::log1p(x) / problem_.lambda; }
  double to_unknown(double u) const override { return std::expm1(problem_.lambda * u); }
  const DomainSpec& domain() const override { return problem_.domain; }
  void residual(std::span<const double> v, std::span<double> r,
                std::span<double> scale) const override;
  void jacobian(std::span<const double> v, linsolve::Triplets& out) const override;

 private:
  ProblemSpec problem_;
  std::vector<double> weight_;
};

/// max_i |R_i| / (1 + scale_i); +inf if anything is non-finite.
double scaled_residual_inf(const Equation& eq, std::span<const double> u);

}  // namespace gradbif::detail
