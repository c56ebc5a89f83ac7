#include "gradbif/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "equation.hpp"
#include "gradbif/linsolve.hpp"
#include "gradbif/odeprofile.hpp"

namespace gradbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Eval {
  double inf = kInf;    // max |R_i| / (1 + scale_i)
  double merit = kInf;  // Euclidean norm of the scaled residual
};

Eval evaluate(const detail::Equation& eq, std::span<const double> u, std::vector<double>& r,
              std::vector<double>& scale) {
  eq.residual(u, r, scale);
  Eval e{0.0, 0.0};
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double v = std::abs(r[k]) / (1.0 + scale[k]);
    if (!std::isfinite(v)) return {};
    e.inf = std::max(e.inf, v);
    e.merit += v * v;
  }
  e.merit = std::sqrt(e.merit);
  return e;
}

double sup_abs(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double sup_field(const detail::Equation& eq, std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(eq.to_field(v)));
  return m;
}

SolveReport newton(const detail::Equation& eq, std::vector<double> u, const SolverOpts& opts) {
  const DomainSpec& d = eq.domain();
  const std::size_t n = d.size();
  std::vector<double> floor = positivity_floor(d, opts);
  for (std::size_t k = 0; k < n; ++k) {
    floor[k] = eq.to_unknown(floor[k]);
    u[k] = std::max(eq.to_unknown(u[k]), floor[k]);
  }

  SolveReport rep;
  std::vector<double> r(n), scale(n), du(n), trial(n), rhs(n);
  linsolve::Triplets jac;
  Eval cur = evaluate(eq, u, r, scale);
  int polished = 0;
  int growth = 0;
  bool met = false;

  auto finish = [&](SolveVerdict v, std::string msg) {
    rep.verdict = v;
    rep.residual_inf = cur.inf;
    rep.message = std::move(msg);
    if (v == SolveVerdict::converged) {
      for (double& x : u) x = eq.to_field(x);
      rep.solution = ScalarField(d, u);
    }
    return rep;
  };

  rep.history.push_back({sup_field(eq, u), cur.inf});
  if (!std::isfinite(cur.inf)) return finish(SolveVerdict::diverged, "non-finite initial residual");
  while (true) {
    if (cur.inf <= opts.tol) {
      met = true;
      if (polished >= opts.polish_steps) return finish(SolveVerdict::converged, {});
    }
    if (rep.iterations >= opts.max_iter) {
      return met ? finish(SolveVerdict::converged, {})
                 : finish(SolveVerdict::iteration_cap, "iteration cap reached");
    }
    eq.jacobian(u, jac);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -r[k];
    if (!linsolve::sparse_lu_solve(n, jac, rhs, du)) {
      return met ? finish(SolveVerdict::converged, {})
                 : finish(SolveVerdict::diverged, "singular Jacobian");
    }
    double step = 1.0;
    Eval next;
    std::vector<double> r_next(n), s_next(n);
    while (true) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = std::max(u[k] + step * du[k], floor[k]);
      next = evaluate(eq, trial, r_next, s_next);
      if (met) break;  // polishing: judged below without a line search
      if (next.merit <= (1.0 - 1e-4 * step) * cur.merit) break;
      step *= 0.5;
      if (step < opts.step_floor) {
        return finish(SolveVerdict::diverged, "line search failed");
      }
    }
    if (met) {
      if (!(next.merit <= cur.merit && next.inf <= opts.tol)) {
        return finish(SolveVerdict::converged, {});
      }
      ++polished;
    }
    growth = next.inf > cur.inf ? growth + 1 : 0;
    u.swap(trial);
    r.swap(r_next);
    scale.swap(s_next);
    cur = next;
    ++rep.iterations;
    const double sup = sup_field(eq, u);
    rep.history.push_back({sup, cur.inf});
    if (sup > opts.sup_cap) return finish(SolveVerdict::diverged, "sup-norm above cap");
    if (growth >= opts.divergence_window) {
      return finish(SolveVerdict::diverged, "residual grew for " + std::to_string(growth) +
                                                " consecutive iterations");
    }
  }
}

std::vector<double> solve_shifted(const DomainSpec& d, const std::vector<double>& shift,
                                  const std::vector<double>& rhs, std::vector<double> guess) {
  linsolve::solve_shifted_laplacian(d, shift, rhs, guess);
  return guess;
}

/// Residual of the direct problem at u with sign convention R = -Δu - F.
std::vector<double> direct_residual(const ProblemSpec& problem, std::span<const double> u) {
  const detail::DirectEquation eq(problem, 0.0);
  std::vector<double> r(u.size());
  eq.residual(u, r, {});
  return r;
}

double lap_sup(const DomainSpec& d, std::span<const double> u) {
  std::vector<double> lap(u.size());
  stencil::neg_laplacian(d, u, lap);
  return sup_abs(lap);
}

}  // namespace

std::string to_string(SolveVerdict v) {
  switch (v) {
    case SolveVerdict::converged:
      return "converged";
    case SolveVerdict::diverged:
      return "diverged";
    case SolveVerdict::iteration_cap:
      return "iteration_cap";
    case SolveVerdict::precondition_failed:
      return "precondition_failed";
  }
  return {};
}

double residual_inf(const ProblemSpec& problem, const ScalarField& u) {
  const detail::DirectEquation eq(problem, 0.0);
  return detail::scaled_residual_inf(eq, u.values());
}

double transformed_residual_inf(const ProblemSpec& problem, const ScalarField& u) {
  const detail::LogEquation eq(problem);
  return detail::scaled_residual_inf(eq, u.values());
}

SolveReport minimal_subsolution(const GSpec& g, const DomainSpec& domain, const SolverOpts& opts) {
  g.validate();
  domain.validate();
  opts.validate();
  ProblemSpec zeta_problem;
  zeta_problem.domain = domain;
  zeta_problem.g = g;
  std::vector<double> u = boundary_distance(domain).vector();
  SolveReport total;
  for (double eps = 1e-2;; eps *= 0.1) {
    if (eps < 1e-8) eps = 0.0;
    const detail::DirectEquation eq(zeta_problem, eps);
    SolveReport stage = newton(eq, u, opts);
    total.iterations += stage.iterations;
    total.history.insert(total.history.end(), stage.history.begin(), stage.history.end());
    total.verdict = stage.verdict;
    total.residual_inf = stage.residual_inf;
    total.message = stage.message;
    if (!stage.converged()) {
      total.message = "stage eps=" + format_real(eps) + ": " + stage.message;
      return total;
    }
    u = stage.solution->vector();
    if (eps == 0.0) {
      total.solution = std::move(stage.solution);
      return total;
    }
  }
}

SolveReport solve_newton(const ProblemSpec& problem, const ScalarField& init,
                         const SolverOpts& opts) {
  problem.validate();
  opts.validate();
  if (!(init.domain() == problem.domain)) {
    throw std::invalid_argument("solve_newton: initial field grid differs from the problem");
  }
  const detail::DirectEquation eq(problem, 0.0);
  return newton(eq, init.vector(), opts);
}

SolveReport solve_transformed_p2(const ProblemSpec& problem, const SolverOpts& opts,
                                 const std::optional<ScalarField>& init) {
  problem.validate();
  opts.validate();
  SolveReport rep;
  if (problem.p != 2.0 || !(problem.lambda > 0.0) || !problem.f.independent_of_u()) {
    rep.verdict = SolveVerdict::precondition_failed;
    rep.message = "transform needs p = 2, lambda > 0 and f independent of u";
    return rep;
  }
  std::vector<double> u0;
  if (init) {
    if (!(init->domain() == problem.domain)) {
      throw std::invalid_argument("solve_transformed_p2: initial field grid differs");
    }
    u0 = init->vector();
  } else {
    SolveReport zeta = minimal_subsolution(problem.g, problem.domain, opts);
    if (!zeta.converged()) {
      rep.verdict = SolveVerdict::precondition_failed;
      rep.message = "minimal sub-solution failed: " + zeta.message;
      return rep;
    }
    u0 = zeta.solution->vector();
  }
  // While e^{λu} is representable, start in v = e^{λu} - 1 where Newton
  // recovers from starts far above the solution, then finish in log form.
  constexpr double kMaxExponent = 300.0;
  SolveReport first;
  if (problem.lambda * *std::max_element(u0.begin(), u0.end()) <= kMaxExponent) {
    SolverOpts rough = opts;
    rough.tol = std::max(opts.tol, 1e-6);
    rough.polish_steps = 0;
    first = newton(detail::ExpEquation(problem), u0, rough);
    if (first.converged()) u0 = first.solution->vector();
  }
  const double offset = *std::max_element(u0.begin(), u0.end());
  const detail::LogEquation eq(problem, offset);
  SolveReport rep_log = newton(eq, std::move(u0), opts);
  if (first.converged()) {
    rep_log.iterations += first.iterations;
    rep_log.history.insert(rep_log.history.begin(), first.history.begin(), first.history.end());
  }
  return rep_log;
}

SolveReport solve_monotone(const ProblemSpec& problem, const ScalarField& sub,
                           const ScalarField& sup, const SolverOpts& opts) {
  problem.validate();
  opts.validate();
  const DomainSpec& d = problem.domain;
  SolveReport rep;
  auto fail = [&](std::string msg) {
    rep.verdict = SolveVerdict::precondition_failed;
    rep.message = std::move(msg);
    return rep;
  };
  if (!(sub.domain() == d) || !(sup.domain() == d)) return fail("grid mismatch");
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(sub[k] > 0.0)) return fail("sub-solution is not positive");
    if (sub[k] > sup[k]) return fail("sub > sup at node " + std::to_string(k));
  }
  const double h2 = d.min_h() * d.min_h();
  {
    const std::vector<double> rs = direct_residual(problem, sub.values());
    const double slack = h2 * lap_sup(d, sub.values());
    for (std::size_t k = 0; k < n; ++k) {
      if (rs[k] > slack) return fail("sub is not a sub-solution at node " + std::to_string(k));
    }
    const SuperCheck sc = verify_supersolution(sup, problem);
    if (!sc.ok) return fail("sup is not a super-solution at node " + std::to_string(sc.witness));
  }

  // Per-node shift: 1.1 x the steepest decrease of s -> g(s) + μ w f(s) on [sub, sup].
  const std::vector<double> weight = weight_field(d, problem.f);
  auto F = [&](std::size_t k, double s) {
    return eval_g(problem.g, s) + problem.mu * weight[k] * eval_f_profile(problem.f, s);
  };
  std::vector<double> shift(n, 0.0);
  constexpr int kSamples = 33;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = sub[k], hi = sup[k];
    if (hi <= lo) continue;
    double prev_s = lo, prev_f = F(k, lo), worst = 0.0;
    for (int m = 1; m < kSamples; ++m) {
      const double s = lo * std::pow(hi / lo, static_cast<double>(m) / (kSamples - 1));
      const double fs = F(k, s);
      worst = std::max(worst, -(fs - prev_f) / (s - prev_s));
      prev_s = s;
      prev_f = fs;
    }
    shift[k] = 1.1 * worst;
  }

  std::vector<double> u = sup.vector(), rhs(n), grad(n, 0.0);
  double prev_res = detail::scaled_residual_inf(detail::DirectEquation(problem, 0.0), u);
  rep.history.push_back({sup_abs(u), prev_res});
  int growth = 0;
  const detail::DirectEquation eq(problem, 0.0);
  for (int it = 1; it <= opts.max_iter; ++it) {
    if (problem.lambda != 0.0) stencil::gradient_p(d, u, problem.p, grad);
    for (std::size_t k = 0; k < n; ++k) {
      rhs[k] = F(k, u[k]) + problem.lambda * grad[k] + shift[k] * u[k];
    }
    std::vector<double> next = solve_shifted(d, shift, rhs, u);
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (next[k] < sub[k] || next[k] > sup[k]) {
        next[k] = std::clamp(next[k], sub[k], sup[k]);
        ++rep.projections;
      }
      diff = std::max(diff, std::abs(next[k] - u[k]));
    }
    u.swap(next);
    const double res = detail::scaled_residual_inf(eq, u);
    rep.iterations = it;
    rep.history.push_back({sup_abs(u), res});
    rep.residual_inf = res;
    if (res <= opts.tol && diff <= opts.tol * (1.0 + sup_abs(u))) {
      rep.verdict = SolveVerdict::converged;
      rep.solution = ScalarField(d, u);
      return rep;
    }
    growth = res > prev_res ? growth + 1 : 0;
    prev_res = res;
    if (growth >= opts.divergence_window) {
      rep.verdict = SolveVerdict::diverged;
      rep.message = "residual grew for " + std::to_string(growth) + " consecutive iterations";
      return rep;
    }
  }
  rep.verdict = SolveVerdict::iteration_cap;
  rep.message = "iteration cap reached";
  return rep;
}

ComparisonResult comparison_check(const ScalarField& v, const ScalarField& w,
                                  const ProblemSpec& problem, double tol) {
  problem.validate();
  if (!(v.domain() == w.domain()) || !(v.domain() == problem.domain)) {
    throw std::invalid_argument("comparison_check: grid mismatch");
  }
  ComparisonResult res;
  res.heuristic = problem.lambda > 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    res.max_violation = std::max(res.max_violation, v[k] - w[k]);
  }
  res.ordered = res.max_violation <= 2.0 * tol;
  if (res.ordered) res.max_violation = 0.0;

  // Zeroth-order quotient (g(s) + μ w f(s)) / s at the extreme weights.
  const std::vector<double> weight = weight_field(problem.domain, problem.f);
  const auto [wmin, wmax] = std::minmax_element(weight.begin(), weight.end());
  res.quotient_monotone = Verdict::holds;
  constexpr int kSamples = 241;
  for (double wt : {*wmin, *wmax}) {
    double prev = kInf;
    for (int m = 0; m < kSamples; ++m) {
      const double s = std::pow(10.0, -6.0 + 12.0 * m / (kSamples - 1));
      const double q = (eval_g(problem.g, s) + problem.mu * wt * eval_f_profile(problem.f, s)) / s;
      if (!(q < prev)) {
        res.quotient_monotone = Verdict::fails;
        break;
      }
      prev = q;
    }
  }

  const DomainSpec& d = problem.domain;
  const double h2 = d.min_h() * d.min_h();
  const std::vector<double> rv = direct_residual(problem, v.values());
  const std::vector<double> rw = direct_residual(problem, w.values());
  const double sv = h2 * lap_sup(d, v.values()) + tol;
  const double sw = h2 * lap_sup(d, w.values()) + tol;
  res.signs_hold = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (rv[k] > sv || rw[k] < -sw) res.signs_hold = false;
  }
  res.defect = res.quotient_monotone == Verdict::holds && res.signs_hold && !res.ordered;
  return res;
}

}  // namespace gradbif
