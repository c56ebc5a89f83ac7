#pragma once

#include <span>
#include <vector>

#include "gradbif/grid.hpp"
#include "gradbif/nonlin.hpp"
#include "gradbif/problem.hpp"
#include "gradbif/spectral.hpp"

namespace gradbif {

/// Tabulated solution of h'' = -g(h) on [0, eta] with h(0) = 0, h'(eta) = hprime_eta.
struct HProfile {
  double eta = 1.0;
  double hprime_eta = 1.0;
  GSpec g;
  std::vector<double> t;       ///< strictly increasing, t.front() = 0, t.back() = eta
  std::vector<double> h;       ///< h.front() = 0
  std::vector<double> hprime;  ///< hprime.front() is +inf when g is not integrable at 0

  double h_eta() const { return h.back(); }
};

/// Integrates the profile.
///
/// h(eta) is fixed by requiring the travel time ∫_0^{h(eta)} dh / h'(h) to
/// equal eta, with h' given by the energy relation. The trajectory is then
/// integrated in h from h(eta) down to a small switch level with adaptive
/// Dormand-Prince, and the remaining stretch to h = 0 uses the energy form.
/// Throws std::runtime_error if the calibration does not converge.
HProfile solve_h(const GSpec& g, double eta = 1.0, double hprime_eta = 1.0, double tol = 1e-12);

/// max over nodes of |h'(t)² - 2∫_{h(t)}^{h(eta)} g - h'(eta)²|, skipping infinite h'.
double energy_residual(const HProfile& hp);

struct GrowthCheck {
  double c1 = 0.0;  ///< 2 h(eta)
  double c2 = 0.0;  ///< h'(eta)² + 1
  bool verified = false;
  int witness = -1;  ///< first node violating (h')^p <= c1 g(h) + c2
};

GrowthCheck growth_constants(const HProfile& hp, double p);

/// Monotone cubic interpolant of h evaluated at each t in [0, eta].
std::vector<double> eval_h(const HProfile& hp, std::span<const double> t);

/// M · h(c φ₁) at every node. Requires M > 0 and c ‖φ₁‖∞ < eta.
ScalarField build_supersolution(const HProfile& hp, const EigenPair& pair, double M, double c);

struct SuperCheck {
  double min_excess = 0.0;
  bool ok = false;
  double slack = 0.0;
  std::size_t witness = 0;  ///< node of the minimum excess
  ScalarField excess;
};

/// excess = -Δ_h ū - g(ū) - λ|∇ū|^p - μ f(x, ū); ok when min excess >= -slack
/// with slack = h_min² ‖-Δ_h ū‖∞. Throws on a nonpositive candidate.
SuperCheck verify_supersolution(const ScalarField& candidate, const ProblemSpec& problem);

struct SuperSearch {
  bool found = false;
  double M = 0.0;
  double c = 0.0;
  int tried = 0;
  ScalarField candidate;  ///< first verified candidate, or the best rejected one
  SuperCheck check;
};

/// Walks M over a geometric ladder 1.5·2^k up to 1e6 and, for each M,
/// c ∈ {0.9, 0.5, 0.25, 0.1}·eta; returns the first verified candidate.
SuperSearch search_supersolution(const ProblemSpec& problem, const HProfile& hp,
                                 const EigenPair& pair);

}  // namespace gradbif
