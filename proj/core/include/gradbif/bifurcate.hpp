#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradbif/odeprofile.hpp"
#include "gradbif/problem.hpp"
#include "gradbif/solver.hpp"
#include "gradbif/spectral.hpp"

namespace gradbif {

/// Quantities that depend only on (domain, g) and are reused across probes:
/// the eigenpair, the minimal sub-solution ζ and the h-profile.
class Workbench {
 public:
  Workbench(const DomainSpec& domain, const GSpec& g, const SolverOpts& opts = {});

  const DomainSpec& domain() const { return domain_; }
  const GSpec& g() const { return g_; }
  const EigenPair& eigenpair() const { return pair_; }
  /// Converged ζ, or nullopt when its solve failed.
  const std::optional<ScalarField>& zeta() const { return zeta_; }
  const HProfile& profile() const { return profile_; }

  bool matches(const ProblemSpec& problem) const {
    return problem.domain == domain_ && problem.g == g_;
  }

 private:
  DomainSpec domain_;
  GSpec g_;
  EigenPair pair_;
  std::optional<ScalarField> zeta_;
  HProfile profile_;
};

enum class Outcome { exists, numerically_nonexistent, inconclusive };

std::string to_string(Outcome o);

struct Attempt {
  std::string strategy;
  SolveVerdict verdict = SolveVerdict::diverged;
  std::string message;
};

struct ExistenceVerdict {
  Outcome outcome = Outcome::inconclusive;
  SolveReport report;  ///< the converged solve, else the last attempt
  std::vector<Attempt> attempts;
  bool supersolution_found = false;
};

/// Strategy ladder, stopping at the first convergence:
/// (1) Newton from the warm start; (2) monotone iteration between ζ and the
/// first verified M·h(cφ₁); (3) the p = 2 transformed solve from the warm
/// start and from ζ; (4) Newton from {0.01, 0.1, 1, 10, 100}·φ₁.
/// numerically_nonexistent needs every applicable attempt to end in
/// `diverged` and the super-solution search to fail.
ExistenceVerdict existence_predicate(const ProblemSpec& problem,
                                     const std::optional<ScalarField>& warm_start,
                                     const SolverOpts& opts, const Workbench& bench);
ExistenceVerdict existence_predicate(const ProblemSpec& problem,
                                     const std::optional<ScalarField>& warm_start = {},
                                     const SolverOpts& opts = {});

/// λ₁ / (a + μ) with a = lim_{s→∞} g(s). Throws when a + μ = 0.
double closed_form_threshold(const GSpec& g, double mu, const EigenPair& pair);

struct ThresholdEstimate {
  double lo = 0.0;
  double hi = 0.0;
  double estimate = 0.0;
  int bisection_steps = 0;
  std::optional<double> closed_form;  ///< p = 2, f ≡ 1, λ axis only
  bool inconclusive = false;          ///< some probe stayed inconclusive and counted as nonexistent
  int probes = 0;
};

/// Thrown when the bracket does not straddle a threshold.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, Outcome lo, Outcome hi)
      : std::runtime_error(what), lo_outcome(lo), hi_outcome(hi) {}
  Outcome lo_outcome;
  Outcome hi_outcome;
};

/// Bisection on the existence predicate along `axis` until hi - lo <= param_tol.
/// Each probe is warm-started from the largest parameter known to exist.
ThresholdEstimate bisect_threshold(const ProblemSpec& problem, Axis axis, double lo, double hi,
                                   double param_tol, const SolverOpts& opts,
                                   const Workbench& bench);
ThresholdEstimate bisect_threshold(const ProblemSpec& problem, Axis axis, double lo, double hi,
                                   double param_tol, const SolverOpts& opts = {});

struct CurveRecord {
  double param = 0.0;
  Outcome outcome = Outcome::inconclusive;
  double sup_norm = 0.0;      ///< NaN unless the point exists
  double center_value = 0.0;  ///< NaN unless the point exists
  double ratio_min = 0.0;     ///< min u/dist, NaN unless the point exists
  double ratio_max = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct BifurcationCurve {
  Axis axis = Axis::lambda;
  std::vector<CurveRecord> records;
};

struct SweepOptions {
  bool warm_start = true;
  bool parallel = false;  ///< cold mode only; one task per parameter value
};

/// Solves at each value in order and records every point, existing or not.
/// The converged solutions are returned through `solutions` when non-null.
BifurcationCurve sweep(const ProblemSpec& problem, Axis axis, const std::vector<double>& values,
                       const SolverOpts& opts, const SweepOptions& mode, const Workbench& bench,
                       std::vector<std::optional<ScalarField>>* solutions = nullptr);
BifurcationCurve sweep(const ProblemSpec& problem, Axis axis, const std::vector<double>& values,
                       const SolverOpts& opts = {}, const SweepOptions& mode = {});

/// True when no `exists` record follows a `numerically_nonexistent` one.
bool down_closed(const BifurcationCurve& curve);

/// Header: param,outcome,sup_norm,center_value,ratio_min,ratio_max,iterations,residual
void write_curve_csv(std::ostream& os, const BifurcationCurve& curve);

}  // namespace gradbif
