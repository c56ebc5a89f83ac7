// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   gradbif_acceptance [path/to/gradbif path/to/threshold_p2.prob]
//
// The determinism check runs the CLI twice and compares the output bytes; it
// is reported as FAIL when the CLI paths are not given.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gradbif/bifurcate.hpp"

using namespace gradbif;
using std::numbers::pi;

namespace {

__attribute__((format(printf, 1, 2))) std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

ProblemSpec threshold_problem(int n, double lambda) {
  ProblemSpec P;
  P.domain = DomainSpec::interval(0, 1, n);
  P.g = GSpec::power_shift(0.5, 1.0);
  P.f = FSpec::constant();
  P.mu = 1.0;
  P.p = 2.0;
  P.lambda = lambda;
  return P;
}

ProblemSpec sqrt_problem(int n, double p, double mu, double lambda) {
  ProblemSpec P;
  P.domain = DomainSpec::interval(0, 1, n);
  P.g = GSpec::power(0.5);
  P.f = FSpec::power(0.5);
  P.p = p;
  P.mu = mu;
  P.lambda = lambda;
  return P;
}

const std::vector<double> kSweepFractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};

BifurcationCurve threshold_sweep(int n) {
  const ProblemSpec P = threshold_problem(n, 1.0);
  const double star = closed_form_threshold(P.g, P.mu, principal_eigenpair(P.domain));
  std::vector<double> values;
  for (double f : kSweepFractions) values.push_back(f * star);
  return sweep(P, Axis::lambda, values);
}

Check eigenvalues() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  const double l1 = principal_eigenpair(DomainSpec::interval(0, 1, 256)).lambda1;
  const double t1 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const double l2 = principal_eigenpair(DomainSpec::rectangle(0, 1, 0, 1, 64)).lambda1;
  const double t2 = seconds_since(t0);
  const double e1 = std::abs(l1 / (pi * pi) - 1), e2 = std::abs(l2 / (2 * pi * pi) - 1);
  c.require(e1 < 1e-3, fmt("interval rel err %.2e < 1e-3", e1));
  c.require(e2 < 5e-3, fmt("square rel err %.2e < 5e-3", e2));
  c.require(t1 < 5 && t2 < 5, fmt("times %.2fs, %.2fs < 5s", t1, t2));
  return c;
}

Check closed_form() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const double target = pi * pi / 2;
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const int n = i == 0 ? 128 : 256;
    const ThresholdEstimate t =
        bisect_threshold(threshold_problem(n, 2.0), Axis::lambda, 0.0, pi * pi, 1e-6 * target);
    err[i] = std::abs(t.estimate / target - 1);
    c.require(err[i] < 0.05, fmt("n=%d estimate %.6f rel err %.2e < 5%%", n, t.estimate, err[i]));
  }
  c.require(err[1] < err[0], fmt("error shrinks %.2e -> %.2e", err[0], err[1]));
  const double secs = seconds_since(t0);
  c.require(secs < 120, fmt("time %.1fs < 120s", secs));
  return c;
}

Check transform_consistency() {
  Check c;
  double gap[2];
  for (int i = 0; i < 2; ++i) {
    const int n = i == 0 ? 256 : 512;
    const ProblemSpec P = threshold_problem(n, 0.3 * pi * pi / 2);
    const SolveReport t = solve_transformed_p2(P);
    const SolveReport d = solve_newton(P, boundary_distance(P.domain));
    if (!t.converged() || !d.converged()) {
      c.require(false, fmt("n=%d solve failed", n));
      return c;
    }
    gap[i] = sup_diff(*t.solution, *d.solution);
  }
  c.require(gap[0] <= 1e-3, fmt("n=256 gap %.2e <= 1e-3", gap[0]));
  c.require(gap[0] >= 3 * gap[1], fmt("n=512 gap %.2e, shrink %.2fx >= 3x", gap[1], gap[0] / gap[1]));
  return c;
}

Check monotone_blowup(const BifurcationCurve& curve) {
  Check c;
  bool increasing = true, all_exist = true;
  for (std::size_t k = 0; k < curve.records.size(); ++k) {
    all_exist = all_exist && curve.records[k].outcome == Outcome::exists;
    if (k > 0) increasing = increasing && curve.records[k].sup_norm > curve.records[k - 1].sup_norm;
  }
  c.require(all_exist, fmt("all %zu sweep points exist", curve.records.size()));
  c.require(increasing, fmt("sup_norm strictly increasing"));
  const double half = curve.records[4].center_value, top = curve.records.back().center_value;
  c.require(top >= 3 * half, fmt("center(0.99) %.4g >= 3 x center(0.5) %.4g", top, half));
  return c;
}

Check boundary_growth(const BifurcationCurve& coarse, const BifurcationCurve& fine) {
  Check c;
  bool bounded = true;
  double worst_min = 0.0, worst_max = 0.0;
  double worst_max_at = 0.0;
  for (std::size_t k = 0; k < coarse.records.size(); ++k) {
    for (const CurveRecord* r : {&coarse.records[k], &fine.records[k]}) {
      if (r->outcome != Outcome::exists) continue;
      bounded = bounded && 0 < r->ratio_min && r->ratio_min <= r->ratio_max && std::isfinite(r->ratio_max);
    }
    if (coarse.records[k].outcome != Outcome::exists || fine.records[k].outcome != Outcome::exists) continue;
    worst_min = std::max(worst_min, std::abs(fine.records[k].ratio_min / coarse.records[k].ratio_min - 1));
    const double dmax = std::abs(fine.records[k].ratio_max / coarse.records[k].ratio_max - 1);
    if (dmax > worst_max) {
      worst_max = dmax;
      worst_max_at = kSweepFractions[k];
    }
  }
  c.require(bounded, fmt("0 < ratio_min <= ratio_max < inf at every point"));
  c.require(worst_min <= 0.1, fmt("ratio_min drift %.3f <= 0.1", worst_min));
  c.require(worst_max <= 0.1,
            fmt("ratio_max drift %.3f <= 0.1 (worst at %.2f lambda*)", worst_max, worst_max_at));
  return c;
}

Check trichotomy() {
  Check c;
  const auto d = DomainSpec::interval(0, 1, 128);
  const Workbench bench(d, GSpec::power(0.5));
  for (double lambda : {1.0, 10.0, 100.0}) {
    const Outcome o =
        existence_predicate(sqrt_problem(128, 0.5, 1.0, lambda), std::nullopt, {}, bench).outcome;
    c.require(o == Outcome::exists, fmt("p=0.5 lambda=%g %s", lambda, to_string(o).c_str()));
  }
  try {
    const ThresholdEstimate t = bisect_threshold(sqrt_problem(128, 1.5, 1.0, 0.0), Axis::lambda, 0.0, 100.0,
                                                 1e-3, {}, bench);
    c.require(t.hi < 100.0 && !t.inconclusive, fmt("p=1.5 bracket [%.5f, %.5f]", t.lo, t.hi));
  } catch (const BracketError& e) {
    c.require(false, fmt("p=1.5 %s", e.what()));
  }
  ProblemSpec P = threshold_problem(128, 1.0);
  P.g = GSpec::power_shift(0.5, bench.eigenpair().lambda1 + 1);
  const Workbench shifted(d, P.g);
  for (double mu : {0.0, 1.0}) {
    P.mu = mu;
    const Outcome o = existence_predicate(P, std::nullopt, {}, shifted).outcome;
    c.require(o == Outcome::numerically_nonexistent, fmt("a0=lambda1+1 mu=%g %s", mu, to_string(o).c_str()));
  }
  return c;
}

Check ode_profiles() {
  Check c;
  double worst = 0.0;
  bool growth = true;
  for (double alpha : {0.25, 0.5, 0.9, 1.0, 1.5, 2.0}) {
    for (const GSpec& g : {GSpec::power(alpha), GSpec::power_shift(alpha, 1.0)}) {
      const HProfile hp = solve_h(g);
      worst = std::max(worst, energy_residual(hp));
      for (double p : {0.5, 1.0, 2.0}) growth = growth && growth_constants(hp, p).verified;
    }
  }
  c.require(worst <= 1e-8, fmt("max energy residual %.2e <= 1e-8", worst));
  c.require(growth, fmt("growth constants verified for p in {0.5, 1, 2}"));
  const double a = solve_h(GSpec::power(0.5)).hprime.front();
  const double b = solve_h(GSpec::power(1.5)).hprime.front();
  c.require(std::isfinite(a) && std::isinf(b), fmt("h'(0) = %.4f (alpha 0.5), %g (alpha 1.5)", a, b));
  return c;
}

Check keller_osserman() {
  Check c;
  for (double alpha : {0.5, 0.9}) {
    const KoResult r = check_ko(GSpec::power(alpha));
    const double oracle = std::sqrt(1 - alpha) * 2 / (1 + alpha);
    c.require(r.satisfied && std::abs(r.value - oracle) <= 1e-4,
              fmt("alpha=%g value %.6f oracle %.6f", alpha, r.value, oracle));
  }
  return c;
}

Check ordering() {
  Check c;
  const SolverOpts opts;
  std::mt19937 rng(20240531);
  std::uniform_real_distribution<double> alpha(0.2, 0.9), a0(0.0, 3.0), mu(0.1, 3.0), frac(0.1, 0.9),
      small(0.0, 0.5);
  const double ps[] = {0.5, 1.0, 1.5, 2.0};
  const auto d = DomainSpec::interval(0, 1, 128);
  const EigenPair pair = principal_eigenpair(d);
  double worst = -INFINITY;
  int solved = 0;
  for (int trial = 0; trial < 10; ++trial) {
    ProblemSpec P;
    P.domain = d;
    P.g = GSpec::power_shift(alpha(rng), a0(rng));
    P.mu = mu(rng);
    P.p = ps[trial % 4];
    if (P.p == 2.0) {
      P.f = FSpec::constant();
      P.lambda = frac(rng) * closed_form_threshold(P.g, P.mu, pair);
    } else {
      P.f = FSpec::power(0.5);
      P.lambda = small(rng);
    }
    const Workbench bench(d, P.g, opts);
    const ExistenceVerdict v = existence_predicate(P, std::nullopt, opts, bench);
    if (v.outcome != Outcome::exists || !bench.zeta()) continue;
    ++solved;
    for (std::size_t k = 0; k < d.size(); ++k) {
      worst = std::max(worst, (*bench.zeta())[k] - (*v.report.solution)[k]);
    }
  }
  c.require(solved == 10, fmt("%d/10 random specs solved", solved));
  c.require(worst <= 2 * opts.tol, fmt("max(zeta - u) = %.2e <= 2 tol", worst));

  const double star = closed_form_threshold(GSpec::power_shift(0.5, 1.0), 1.0, pair);
  const ProblemSpec P = threshold_problem(128, 0.5 * star);
  std::vector<ScalarField> sols;
  for (double scale : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const SolveReport r = solve_transformed_p2(P, opts, pair.phi1.scaled(scale));
    if (r.converged()) sols.push_back(*r.solution);
  }
  double spread = 0.0;
  for (const ScalarField& s : sols) spread = std::max(spread, sup_diff(s, sols.front()));
  c.require(sols.size() == 5, fmt("%zu/5 Newton starts (transformed system) converged", sols.size()));
  c.require(spread <= 10 * opts.tol, fmt("multistart spread %.2e <= 10 tol", spread));
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check determinism(int argc, char** argv) {
  Check c;
  if (argc < 3) {
    c.require(false, fmt("CLI path and recipe not given"));
    return c;
  }
  const auto dir = std::filesystem::temp_directory_path() / ("gradbif_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::string out[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".csv");
    const std::string cmd = std::string("\"") + argv[1] + "\" bisect -p \"" + argv[2] +
                            "\" --lo 0 --hi 9.8696 --param-tol 4.9348e-6 --out \"" + path.string() +
                            "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    c.require(rc == 0, fmt("run %d exit %d", i + 1, rc));
    out[i] = slurp(path);
  }
  std::filesystem::remove_all(dir);
  c.require(!out[0].empty() && out[0] == out[1], fmt("%zu-byte CSV identical across runs", out[0].size()));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Check()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.require(false, fmt("exception: %s", e.what()));
    }
    std::printf("%s %2d %s: %s (%.1fs)\n", c.pass ? "PASS" : "FAIL", id, name, c.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    failed += !c.pass;
  };

  report(1, "eigenvalue accuracy", eigenvalues);
  report(2, "closed-form threshold", closed_form);
  report(3, "transform consistency", transform_consistency);
  BifurcationCurve coarse, fine;
  report(4, "monotonicity and blow-up", [&] {
    coarse = threshold_sweep(128);
    return monotone_blowup(coarse);
  });
  report(5, "boundary growth", [&] {
    fine = threshold_sweep(256);
    return boundary_growth(coarse, fine);
  });
  report(6, "trichotomy in p", trichotomy);
  report(7, "ODE profile identities", ode_profiles);
  report(8, "Keller-Osserman values", keller_osserman);
  report(9, "comparison and ordering", ordering);
  report(10, "determinism", [&] { return determinism(argc, argv); });
  return failed == 0 ? 0 : 1;
}
