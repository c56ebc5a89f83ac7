#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradbif/grid.hpp"
#include "gradbif/nonlin.hpp"
#include "gradbif/problem.hpp"

namespace gradbif {

enum class SolveVerdict { converged, diverged, iteration_cap, precondition_failed };

std::string to_string(SolveVerdict v);

struct HistoryEntry {
  double sup_norm = 0.0;
  double residual = 0.0;
};

struct SolveReport {
  SolveVerdict verdict = SolveVerdict::diverged;
  std::optional<ScalarField> solution;  ///< set when converged
  double residual_inf = 0.0;            ///< node-scaled residual of the last iterate
  int iterations = 0;
  std::vector<HistoryEntry> history;
  std::string message;   ///< why the solve stopped, when it did not converge
  long projections = 0;  ///< monotone iteration: node clamps onto [sub, sup]

  bool converged() const { return verdict == SolveVerdict::converged; }
};

/// Node-scaled residual sup-norm of the direct discretisation:
/// max_i |R_i| / (1 + Σ_j |A_ij u_j| + |g| + λ|∇u|^p + μ|f|).
double residual_inf(const ProblemSpec& problem, const ScalarField& u);

/// Minimal solution ζ of -Δζ = g(ζ), by continuation on -Δζ = g(ζ + ε) with
/// ε = 1e-2, 1e-3, ..., 1e-8, 0, each stage solved by damped Newton.
SolveReport minimal_subsolution(const GSpec& g, const DomainSpec& domain,
                                const SolverOpts& opts = {});

/// Monotone iteration from `sup` with a per-node shift, projected onto [sub, sup].
SolveReport solve_monotone(const ProblemSpec& problem, const ScalarField& sub,
                           const ScalarField& sup, const SolverOpts& opts = {});

/// Damped Newton with a halving line search on the direct discretisation.
SolveReport solve_newton(const ProblemSpec& problem, const ScalarField& init,
                         const SolverOpts& opts = {});

/// p = 2 path after v = e^{λu} - 1, solved for u. Needs λ > 0 and f
/// independent of u; starts from `init`, or from ζ when absent.
SolveReport solve_transformed_p2(const ProblemSpec& problem, const SolverOpts& opts = {},
                                 const std::optional<ScalarField>& init = {});

/// Node-scaled residual of the transformed system at u.
double transformed_residual_inf(const ProblemSpec& problem, const ScalarField& u);

struct ComparisonResult {
  bool ordered = false;                         ///< v <= w + 2 tol everywhere
  Verdict quotient_monotone = Verdict::undetermined;  ///< (g + μf)/s strictly decreasing
  bool signs_hold = false;  ///< v is a sub-solution and w a super-solution
  bool defect = false;      ///< every premise holds but the fields are not ordered
  bool heuristic = false;   ///< λ > 0: the gradient term is outside the comparison lemma
  double max_violation = 0.0;  ///< max (v - w), 0 when ordered
};

ComparisonResult comparison_check(const ScalarField& v, const ScalarField& w,
                                  const ProblemSpec& problem, double tol = 1e-10);

}  // namespace gradbif
