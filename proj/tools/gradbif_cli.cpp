#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gradbif/bifurcate.hpp"
#include "gradbif/nonlin.hpp"
#include "gradbif/odeprofile.hpp"
#include "gradbif/problem_file.hpp"
#include "gradbif/solver.hpp"
#include "gradbif/spectral.hpp"

namespace {

using nlohmann::ordered_json;
using namespace gradbif;

constexpr int kOk = 0;
constexpr int kNoSolution = 1;
constexpr int kUsage = 2;

// NaN and inf have no JSON spelling.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

bool wants_json(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

ordered_json report_json(const SolveReport& r) {
  ordered_json j;
  j["verdict"] = to_string(r.verdict);
  if (r.solution) {
    j["solution"] = r.solution->vector();
  } else {
    j["solution"] = nullptr;
  }
  j["residual_inf"] = num(r.residual_inf);
  j["iterations"] = r.iterations;
  ordered_json hist = ordered_json::array();
  for (const HistoryEntry& h : r.history) {
    hist.push_back({{"sup_norm", num(h.sup_norm)}, {"residual", num(h.residual)}});
  }
  j["history"] = std::move(hist);
  j["message"] = r.message;
  j["projections"] = r.projections;
  return j;
}

ordered_json verdict_json(const ExistenceVerdict& v) {
  ordered_json j;
  j["outcome"] = to_string(v.outcome);
  j["supersolution_found"] = v.supersolution_found;
  ordered_json attempts = ordered_json::array();
  for (const Attempt& a : v.attempts) {
    attempts.push_back(
        {{"strategy", a.strategy}, {"verdict", to_string(a.verdict)}, {"message", a.message}});
  }
  j["attempts"] = std::move(attempts);
  j["report"] = report_json(v.report);
  return j;
}

std::string estimate_csv(const ThresholdEstimate& e) {
  std::ostringstream os;
  os << "lo,hi,estimate,bisection_steps,probes,closed_form,inconclusive\n"
     << format_real(e.lo) << ',' << format_real(e.hi) << ',' << format_real(e.estimate) << ','
     << e.bisection_steps << ',' << e.probes << ','
     << (e.closed_form ? format_real(*e.closed_form) : std::string("nan")) << ','
     << (e.inconclusive ? 1 : 0) << '\n';
  return os.str();
}

Axis parse_axis(const std::string& s) { return s == "mu" ? Axis::mu : Axis::lambda; }

SolverOpts with_overrides(SolverOpts opts, std::optional<int> max_iter, std::optional<double> tol) {
  if (max_iter) opts.max_iter = *max_iter;
  if (tol) opts.tol = *tol;
  opts.validate();
  return opts;
}

struct Common {
  std::string problem;
  std::string out;
  std::optional<int> max_iter;
  std::optional<double> tol;
};

void add_problem_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--problem,-p", c.problem, "problem file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out,-o", c.out, "result file (.json for JSON, CSV otherwise)");
  cmd->add_option("--max-iter", c.max_iter, "override solver max_iter");
  cmd->add_option("--tol", c.tol, "override solver tol");
}

int run_solve(const Common& c, const std::string& method, const std::string& field_out) {
  const ProblemFile pf = load_problem(c.problem);
  const SolverOpts opts = with_overrides(pf.opts, c.max_iter, c.tol);
  const ProblemSpec& P = pf.problem;

  ExistenceVerdict v;
  if (method == "ladder") {
    v = existence_predicate(P, std::nullopt, opts);
  } else {
    SolveReport r;
    if (method == "newton") {
      r = solve_newton(P, boundary_distance(P.domain), opts);
    } else if (method == "transformed") {
      r = solve_transformed_p2(P, opts);
    } else {
      const Workbench bench(P.domain, P.g, opts);
      const SuperSearch s = search_supersolution(P, bench.profile(), bench.eigenpair());
      if (!bench.zeta() || !s.found) {
        r.verdict = SolveVerdict::precondition_failed;
        r.message = !bench.zeta() ? "no minimal sub-solution" : "no verified super-solution";
      } else {
        r = solve_monotone(P, *bench.zeta(), s.candidate, opts);
      }
    }
    v.attempts.push_back({method, r.verdict, r.message});
    v.outcome = r.converged() ? Outcome::exists
                : r.verdict == SolveVerdict::diverged ? Outcome::numerically_nonexistent
                                                      : Outcome::inconclusive;
    v.report = std::move(r);
  }

  std::printf("outcome %s\n", to_string(v.outcome).c_str());
  for (const Attempt& a : v.attempts) {
    std::printf("  %-20s %s%s%s\n", a.strategy.c_str(), to_string(a.verdict).c_str(),
                a.message.empty() ? "" : ": ", a.message.c_str());
  }
  if (v.report.solution) {
    const ScalarField& u = *v.report.solution;
    std::printf("sup_norm %s\ncenter_value %s\nresidual %s\niterations %d\n",
                format_real(u.sup_norm()).c_str(), format_real(u.center_value()).c_str(),
                format_real(v.report.residual_inf).c_str(), v.report.iterations);
  }
  if (!c.out.empty()) {
    if (wants_json(c.out)) {
      write_text(c.out, verdict_json(v).dump(2) + "\n");
    } else if (v.report.solution) {
      write_field_csv(c.out, *v.report.solution);
    } else {
      write_text(c.out, "x,value\n");
    }
  }
  if (!field_out.empty() && v.report.solution) write_field_csv(field_out, *v.report.solution);
  return v.outcome == Outcome::exists ? kOk : kNoSolution;
}

std::vector<double> sweep_values(const std::vector<double>& listed, std::optional<double> from,
                                 std::optional<double> to, int count) {
  if (!listed.empty()) return listed;
  if (!from || !to || count < 2) {
    throw CLI::ValidationError("sweep", "give --values or --from, --to and --count >= 2");
  }
  std::vector<double> v(count);
  for (int k = 0; k < count; ++k) v[k] = *from + (*to - *from) * k / (count - 1);
  return v;
}

int run_sweep(const Common& c, const std::string& axis, const std::vector<double>& values,
              bool cold, bool parallel) {
  const ProblemFile pf = load_problem(c.problem);
  const SolverOpts opts = with_overrides(pf.opts, c.max_iter, c.tol);
  SweepOptions mode;
  mode.warm_start = !cold && !parallel;
  mode.parallel = parallel;
  const BifurcationCurve curve = sweep(pf.problem, parse_axis(axis), values, opts, mode);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  std::fputs(csv.str().c_str(), stdout);
  if (!c.out.empty()) {
    if (wants_json(c.out)) {
      ordered_json j;
      j["axis"] = to_string(curve.axis);
      ordered_json recs = ordered_json::array();
      for (const CurveRecord& r : curve.records) {
        recs.push_back({{"param", num(r.param)},
                        {"outcome", to_string(r.outcome)},
                        {"sup_norm", num(r.sup_norm)},
                        {"center_value", num(r.center_value)},
                        {"ratio_min", num(r.ratio_min)},
                        {"ratio_max", num(r.ratio_max)},
                        {"iterations", r.iterations},
                        {"residual", num(r.residual)}});
      }
      j["records"] = std::move(recs);
      j["down_closed"] = down_closed(curve);
      write_text(c.out, j.dump(2) + "\n");
    } else {
      write_text(c.out, csv.str());
    }
  }
  if (!down_closed(curve)) std::fprintf(stderr, "warning: existence set is not down-closed\n");
  return kOk;
}

int run_bisect(const Common& c, const std::string& axis, double lo, double hi, double tol) {
  const ProblemFile pf = load_problem(c.problem);
  const SolverOpts opts = with_overrides(pf.opts, c.max_iter, c.tol);
  ThresholdEstimate e;
  try {
    e = bisect_threshold(pf.problem, parse_axis(axis), lo, hi, tol, opts);
  } catch (const BracketError& err) {
    std::printf("bracket rejected: %s\n", err.what());
    if (!c.out.empty() && wants_json(c.out)) {
      ordered_json j{{"error", err.what()},
                     {"lo_outcome", to_string(err.lo_outcome)},
                     {"hi_outcome", to_string(err.hi_outcome)}};
      write_text(c.out, j.dump(2) + "\n");
    }
    return kNoSolution;
  }
  std::printf("estimate %s\nbracket [%s, %s]\nsteps %d\n", format_real(e.estimate).c_str(),
              format_real(e.lo).c_str(), format_real(e.hi).c_str(), e.bisection_steps);
  if (e.closed_form) {
    std::printf("closed_form %s\nrelative_error %.3e\n", format_real(*e.closed_form).c_str(),
                e.estimate / *e.closed_form - 1.0);
  }
  if (e.inconclusive) std::printf("flag: some probes stayed inconclusive\n");
  if (!c.out.empty()) {
    if (wants_json(c.out)) {
      ordered_json j{{"lo", num(e.lo)},
                     {"hi", num(e.hi)},
                     {"estimate", num(e.estimate)},
                     {"bisection_steps", e.bisection_steps},
                     {"probes", e.probes},
                     {"closed_form", e.closed_form ? num(*e.closed_form) : ordered_json(nullptr)},
                     {"inconclusive", e.inconclusive}};
      write_text(c.out, j.dump(2) + "\n");
    } else {
      write_text(c.out, estimate_csv(e));
    }
  }
  return kOk;
}

int run_eigen(const std::string& domain, const std::string& out) {
  const DomainSpec d = parse_domain_arg(domain);
  const EigenPair pair = principal_eigenpair(d);
  const BoundaryBounds b = eigen_boundary_bounds(pair);
  std::printf("lambda1 %s\nresidual %.3e\niterations %d\nc1 %s\nc2 %s\n",
              format_real(pair.lambda1).c_str(), pair.residual, pair.iterations,
              format_real(b.c1).c_str(), format_real(b.c2).c_str());
  if (!out.empty()) {
    if (wants_json(out)) {
      ordered_json j{{"lambda1", num(pair.lambda1)},
                     {"residual", num(pair.residual)},
                     {"iterations", pair.iterations},
                     {"c1", num(b.c1)},
                     {"c2", num(b.c2)},
                     {"phi1", pair.phi1.vector()}};
      write_text(out, j.dump(2) + "\n");
    } else {
      write_field_csv(out, pair.phi1);
    }
  }
  return kOk;
}

int run_ko(const std::string& expr, const std::string& out) {
  const GSpec g = parse_g_expr(expr);
  const KoResult ko = check_ko(g);
  std::printf("value %s\nstatus %s\ntail %.3e\n", format_real(ko.value).c_str(),
              to_string(ko.status).c_str(), ko.tail_estimate);
  if (!out.empty()) {
    if (wants_json(out)) {
      ordered_json j{{"g", render_g_expr(g)},
                     {"value", num(ko.value)},
                     {"satisfied", ko.satisfied},
                     {"status", to_string(ko.status)},
                     {"tail_estimate", num(ko.tail_estimate)}};
      write_text(out, j.dump(2) + "\n");
    } else {
      write_text(out, "g,value,status,tail_estimate\n\"" + render_g_expr(g) + "\"," +
                          format_real(ko.value) + ',' + to_string(ko.status) + ',' +
                          format_real(ko.tail_estimate) + '\n');
    }
  }
  return ko.status == KoStatus::violated ? kNoSolution : kOk;
}

int run_supersol(const Common& c) {
  const ProblemFile pf = load_problem(c.problem);
  const ProblemSpec& P = pf.problem;
  const EigenPair pair = principal_eigenpair(P.domain);
  const HProfile hp = solve_h(P.g, pf.opts.eta, pf.opts.hprime_eta);
  const SuperSearch s = search_supersolution(P, hp, pair);
  std::printf("found %s\ntried %d\nM %s\nc %s\nmin_excess %s\nslack %s\n",
              s.found ? "yes" : "no", s.tried, format_real(s.M).c_str(),
              format_real(s.c).c_str(), format_real(s.check.min_excess).c_str(),
              format_real(s.check.slack).c_str());
  if (!c.out.empty()) {
    if (wants_json(c.out)) {
      ordered_json j{{"found", s.found},
                     {"tried", s.tried},
                     {"M", num(s.M)},
                     {"c", num(s.c)},
                     {"min_excess", num(s.check.min_excess)},
                     {"slack", num(s.check.slack)},
                     {"witness", s.check.witness},
                     {"candidate", s.candidate.vector()}};
      write_text(c.out, j.dump(2) + "\n");
    } else {
      write_field_csv(c.out, s.candidate);
    }
  }
  return s.found ? kOk : kNoSolution;
}

int run_verify(const Common& c, const std::string& field) {
  const ProblemFile pf = load_problem(c.problem);
  const ScalarField u = read_field_csv(field, pf.problem.domain);
  const SuperCheck chk = verify_supersolution(u, pf.problem);
  const double res = residual_inf(pf.problem, u);
  std::printf("supersolution %s\nmin_excess %s\nslack %s\nwitness %zu\nresidual %s\n",
              chk.ok ? "yes" : "no", format_real(chk.min_excess).c_str(),
              format_real(chk.slack).c_str(), chk.witness, format_real(res).c_str());
  if (!c.out.empty()) {
    if (wants_json(c.out)) {
      ordered_json j{{"ok", chk.ok},
                     {"min_excess", num(chk.min_excess)},
                     {"slack", num(chk.slack)},
                     {"witness", chk.witness},
                     {"residual_inf", num(res)},
                     {"excess", chk.excess.vector()}};
      write_text(c.out, j.dump(2) + "\n");
    } else {
      write_field_csv(c.out, chk.excess);
    }
  }
  return chk.ok ? kOk : kNoSolution;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradbif: finite-difference lab for -Δu = g(u) + λ|∇u|^p + μ f(x,u)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gradbif 0.1.0");

  Common solve_c, sweep_c, bisect_c, super_c, verify_c;
  std::string method = "ladder", field_out;
  auto* solve = app.add_subcommand("solve", "existence ladder (or one method) for a problem file");
  add_problem_flags(solve, solve_c);
  solve->add_option("--method", method, "ladder, newton, monotone or transformed")
      ->check(CLI::IsMember({"ladder", "newton", "monotone", "transformed"}));
  solve->add_option("--field", field_out, "also write the solution as CSV");

  std::string sweep_axis = "lambda";
  std::vector<double> values;
  std::optional<double> from, to;
  int count = 0;
  bool cold = false, parallel = false;
  auto* sw = app.add_subcommand("sweep", "bifurcation curve along lambda or mu");
  add_problem_flags(sw, sweep_c);
  sw->add_option("--axis", sweep_axis)->check(CLI::IsMember({"lambda", "mu"}));
  sw->add_option("--values", values, "parameter values, increasing")->delimiter(',');
  sw->add_option("--from", from);
  sw->add_option("--to", to);
  sw->add_option("--count", count);
  sw->add_flag("--cold", cold, "no warm starts");
  sw->add_flag("--parallel", parallel, "cold mode, one task per value");

  std::string bisect_axis = "lambda";
  double lo = 0.0, hi = 0.0, ptol = 1e-6;
  auto* bi = app.add_subcommand("bisect", "threshold along lambda or mu");
  add_problem_flags(bi, bisect_c);
  bi->add_option("--axis", bisect_axis)->check(CLI::IsMember({"lambda", "mu"}));
  bi->add_option("--lo", lo)->required();
  bi->add_option("--hi", hi)->required();
  bi->add_option("--param-tol", ptol, "stop when hi - lo <= this");

  std::string domain, eigen_out;
  auto* eig = app.add_subcommand("eigen", "principal Dirichlet eigenpair");
  eig->add_option("--domain,-d", domain, "interval:a:b:n or rect:ax:bx:ay:by:n")->required();
  eig->add_option("--out,-o", eigen_out);

  std::string gexpr, ko_out;
  auto* ko = app.add_subcommand("ko", "Keller-Osserman integral of g");
  ko->add_option("--g", gexpr, "e.g. power(alpha=0.5)")->required();
  ko->add_option("--out,-o", ko_out);

  auto* sup = app.add_subcommand("supersol", "search M h(c phi1) super-solutions");
  add_problem_flags(sup, super_c);

  std::string field_in;
  auto* ver = app.add_subcommand("verify", "check a field (CSV) as a super-solution");
  add_problem_flags(ver, verify_c);
  ver->add_option("--field", field_in, "x,value or x,y,value CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return run_solve(solve_c, method, field_out);
    if (*sw) return run_sweep(sweep_c, sweep_axis, sweep_values(values, from, to, count), cold, parallel);
    if (*bi) return run_bisect(bisect_c, bisect_axis, lo, hi, ptol);
    if (*eig) return run_eigen(domain, eigen_out);
    if (*ko) return run_ko(gexpr, ko_out);
    if (*sup) return run_supersol(super_c);
    if (*ver) return run_verify(verify_c, field_in);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return kUsage;
}
