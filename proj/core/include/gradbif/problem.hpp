#pragma once

#include <vector>

#include "gradbif/grid.hpp"
#include "gradbif/nonlin.hpp"

namespace gradbif {

/// Numerical controls shared by every nonlinear solver.
struct SolverOpts {
  double tol = 1e-10;        ///< on the node-scaled residual sup-norm
  int max_iter = 500;
  double sup_cap = 1e6;      ///< iterates above this sup-norm count as divergence
  double step_floor = 0x1p-20;
  double floor_abs = 1e-12;  ///< positivity floor: floor_abs + floor_dist * dist(x)
  double floor_dist = 1e-6;
  int divergence_window = 50;  ///< consecutive residual increases before giving up
  int polish_steps = 2;        ///< extra Newton steps taken after reaching tol
  double eta = 1.0;            ///< h-profile endpoint
  double hprime_eta = 1.0;     ///< h'(eta)

  void validate() const;
  friend bool operator==(const SolverOpts&, const SolverOpts&) = default;
};

/// -Δu = g(u) + λ|∇u|^p + μ f(x, u) in Ω, u = 0 on ∂Ω.
struct ProblemSpec {
  DomainSpec domain;
  GSpec g;
  FSpec f;
  double lambda = 0.0;
  double mu = 0.0;
  double p = 2.0;

  void validate() const;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

enum class Axis { lambda, mu };

std::string to_string(Axis axis);
double param_of(const ProblemSpec& problem, Axis axis);
ProblemSpec with_param(ProblemSpec problem, Axis axis, double value);

/// floor_abs + floor_dist * dist(x, ∂Ω) at every node.
std::vector<double> positivity_floor(const DomainSpec& domain, const SolverOpts& opts);

/// Weight w(x) of f sampled at the nodes.
std::vector<double> weight_field(const DomainSpec& domain, const FSpec& f);

}  // namespace gradbif
