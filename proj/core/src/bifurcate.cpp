#include "gradbif/bifurcate.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

namespace gradbif {

Workbench::Workbench(const DomainSpec& domain, const GSpec& g, const SolverOpts& opts)
    : domain_(domain), g_(g), pair_(principal_eigenpair(domain)) {
  SolveReport z = minimal_subsolution(g, domain, opts);
  if (z.converged()) zeta_ = std::move(z.solution);
  profile_ = solve_h(g, opts.eta, opts.hprime_eta);
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::exists:
      return "exists";
    case Outcome::numerically_nonexistent:
      return "numerically_nonexistent";
    case Outcome::inconclusive:
      return "inconclusive";
  }
  return {};
}

namespace {

bool transform_applies(const ProblemSpec& problem) {
  return problem.p == 2.0 && problem.lambda > 0.0 && problem.f.independent_of_u();
}

}  // namespace

ExistenceVerdict existence_predicate(const ProblemSpec& problem,
                                     const std::optional<ScalarField>& warm_start,
                                     const SolverOpts& opts, const Workbench& bench) {
  problem.validate();
  if (!bench.matches(problem)) {
    throw std::invalid_argument("existence_predicate: workbench built for another domain or g");
  }
  ExistenceVerdict out;
  bool decisive = true;
  auto record = [&](const std::string& name, SolveReport rep) {
    out.attempts.push_back({name, rep.verdict, rep.message});
    if (rep.verdict == SolveVerdict::iteration_cap) decisive = false;
    const bool ok = rep.converged();
    out.report = std::move(rep);
    if (ok) out.outcome = Outcome::exists;
    return ok;
  };

  if (warm_start && record("newton_warm", solve_newton(problem, *warm_start, opts))) return out;

  const SuperSearch search = search_supersolution(problem, bench.profile(), bench.eigenpair());
  out.supersolution_found = search.found;
  if (search.found && bench.zeta()) {
    if (record("monotone", solve_monotone(problem, *bench.zeta(), search.candidate, opts))) {
      return out;
    }
  } else {
    out.attempts.push_back({"supersolution_search", SolveVerdict::diverged,
                            search.found ? "no minimal sub-solution" : "no verified candidate"});
  }

  if (transform_applies(problem)) {
    if (warm_start &&
        record("transformed_warm", solve_transformed_p2(problem, opts, warm_start))) {
      return out;
    }
    if (bench.zeta() &&
        record("transformed_zeta", solve_transformed_p2(problem, opts, bench.zeta()))) {
      return out;
    }
  }

  for (double scale : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const ScalarField init = bench.eigenpair().phi1.scaled(scale);
    char name[40];
    std::snprintf(name, sizeof name, "newton_phi1_x%g", scale);
    if (record(name, solve_newton(problem, init, opts))) {
      return out;
    }
  }
  out.outcome = decisive && !search.found ? Outcome::numerically_nonexistent
                                          : Outcome::inconclusive;
  return out;
}

ExistenceVerdict existence_predicate(const ProblemSpec& problem,
                                     const std::optional<ScalarField>& warm_start,
                                     const SolverOpts& opts) {
  const Workbench bench(problem.domain, problem.g, opts);
  return existence_predicate(problem, warm_start, opts, bench);
}

double closed_form_threshold(const GSpec& g, double mu, const EigenPair& pair) {
  const double denom = g_asymptote(g) + mu;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("closed_form_threshold: needs a + mu > 0");
  }
  return pair.lambda1 / denom;
}

namespace {

struct Probe {
  Outcome outcome;
  bool flagged;  // stayed inconclusive after the retry
  std::optional<ScalarField> solution;
};

Probe run_probe(const ProblemSpec& problem, const std::optional<ScalarField>& warm,
                const SolverOpts& opts, const Workbench& bench) {
  ExistenceVerdict v = existence_predicate(problem, warm, opts, bench);
  if (v.outcome == Outcome::inconclusive) {
    SolverOpts longer = opts;
    longer.max_iter *= 2;
    v = existence_predicate(problem, warm, longer, bench);
  }
  Probe p{v.outcome, false, std::nullopt};
  if (p.outcome == Outcome::inconclusive) {
    p.outcome = Outcome::numerically_nonexistent;
    p.flagged = true;
  }
  if (p.outcome == Outcome::exists) p.solution = std::move(v.report.solution);
  return p;
}

}  // namespace

ThresholdEstimate bisect_threshold(const ProblemSpec& problem, Axis axis, double lo, double hi,
                                   double param_tol, const SolverOpts& opts,
                                   const Workbench& bench) {
  problem.validate();
  if (!(lo >= 0.0 && hi > lo)) throw std::invalid_argument("bisect_threshold: need 0 <= lo < hi");
  if (!(param_tol > 0.0)) throw std::invalid_argument("bisect_threshold: param_tol must be positive");
  ThresholdEstimate est;
  std::optional<ScalarField> warm;

  Outcome lo_outcome = Outcome::exists;
  if (lo > 0.0) {
    Probe p = run_probe(with_param(problem, axis, lo), std::nullopt, opts, bench);
    ++est.probes;
    lo_outcome = p.flagged ? Outcome::inconclusive : p.outcome;
    warm = std::move(p.solution);
  }
  Probe top = run_probe(with_param(problem, axis, hi), std::nullopt, opts, bench);
  ++est.probes;
  const Outcome hi_outcome = top.flagged ? Outcome::inconclusive : top.outcome;
  est.inconclusive = top.flagged;
  if (lo_outcome != Outcome::exists || top.outcome == Outcome::exists) {
    const std::string why = top.outcome == Outcome::exists ? "no threshold in range" : "invalid bracket";
    throw BracketError(why + ": " + to_string(axis) + "=" + format_real(lo) + " " +
                           to_string(lo_outcome) + ", " + to_string(axis) + "=" +
                           format_real(hi) + " " + to_string(hi_outcome),
                       lo_outcome, hi_outcome);
  }

  while (hi - lo > param_tol) {
    const double mid = 0.5 * (lo + hi);
    Probe p = run_probe(with_param(problem, axis, mid), warm, opts, bench);
    ++est.probes;
    ++est.bisection_steps;
    est.inconclusive = est.inconclusive || p.flagged;
    if (p.outcome == Outcome::exists) {
      lo = mid;
      warm = std::move(p.solution);
    } else {
      hi = mid;
    }
  }
  est.lo = lo;
  est.hi = hi;
  est.estimate = 0.5 * (lo + hi);
  if (axis == Axis::lambda && problem.p == 2.0 && problem.f.family == FFamily::constant &&
      !problem.f.weight && g_asymptote(problem.g) + problem.mu > 0.0) {
    est.closed_form = closed_form_threshold(problem.g, problem.mu, bench.eigenpair());
  }
  return est;
}

ThresholdEstimate bisect_threshold(const ProblemSpec& problem, Axis axis, double lo, double hi,
                                   double param_tol, const SolverOpts& opts) {
  const Workbench bench(problem.domain, problem.g, opts);
  return bisect_threshold(problem, axis, lo, hi, param_tol, opts, bench);
}

namespace {

CurveRecord make_record(double param, const ExistenceVerdict& v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CurveRecord rec{param, v.outcome, nan, nan, nan, nan, v.report.iterations, v.report.residual_inf};
  if (v.outcome == Outcome::exists) {
    const ScalarField& u = *v.report.solution;
    rec.sup_norm = u.sup_norm();
    rec.center_value = u.center_value();
    const BoundaryBounds b = boundary_ratios(u);
    rec.ratio_min = b.c1;
    rec.ratio_max = b.c2;
  }
  return rec;
}

}  // namespace

BifurcationCurve sweep(const ProblemSpec& problem, Axis axis, const std::vector<double>& values,
                       const SolverOpts& opts, const SweepOptions& mode, const Workbench& bench,
                       std::vector<std::optional<ScalarField>>* solutions) {
  problem.validate();
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) {
      throw std::invalid_argument("sweep: values must be strictly increasing");
    }
  }
  BifurcationCurve curve;
  curve.axis = axis;
  std::vector<ExistenceVerdict> verdicts(values.size());
  if (mode.parallel && !mode.warm_start) {
    std::vector<std::future<ExistenceVerdict>> tasks;
    for (double v : values) {
      tasks.push_back(std::async(std::launch::async, [&, v] {
        return existence_predicate(with_param(problem, axis, v), std::nullopt, opts, bench);
      }));
    }
    for (std::size_t k = 0; k < tasks.size(); ++k) verdicts[k] = tasks[k].get();
  } else {
    std::optional<ScalarField> warm;
    for (std::size_t k = 0; k < values.size(); ++k) {
      verdicts[k] = existence_predicate(with_param(problem, axis, values[k]),
                                        mode.warm_start ? warm : std::nullopt, opts, bench);
      if (verdicts[k].outcome == Outcome::exists) warm = verdicts[k].report.solution;
    }
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    curve.records.push_back(make_record(values[k], verdicts[k]));
  }
  if (solutions) {
    solutions->clear();
    for (auto& v : verdicts) {
      solutions->push_back(v.outcome == Outcome::exists ? std::move(v.report.solution)
                                                        : std::nullopt);
    }
  }
  return curve;
}

BifurcationCurve sweep(const ProblemSpec& problem, Axis axis, const std::vector<double>& values,
                       const SolverOpts& opts, const SweepOptions& mode) {
  const Workbench bench(problem.domain, problem.g, opts);
  return sweep(problem, axis, values, opts, mode, bench);
}

bool down_closed(const BifurcationCurve& curve) {
  bool seen_gap = false;
  for (const CurveRecord& r : curve.records) {
    if (r.outcome == Outcome::numerically_nonexistent) seen_gap = true;
    if (r.outcome == Outcome::exists && seen_gap) return false;
  }
  return true;
}

void write_curve_csv(std::ostream& os, const BifurcationCurve& curve) {
  os << "param,outcome,sup_norm,center_value,ratio_min,ratio_max,iterations,residual\n";
  for (const CurveRecord& r : curve.records) {
    os << format_real(r.param) << ',' << to_string(r.outcome) << ',' << format_real(r.sup_norm)
       << ',' << format_real(r.center_value) << ',' << format_real(r.ratio_min) << ','
       << format_real(r.ratio_max) << ',' << r.iterations << ',' << format_real(r.residual)
       << '\n';
  }
}

}  // namespace gradbif
