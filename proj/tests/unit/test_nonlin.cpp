#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gradbif/nonlin.hpp"

using namespace gradbif;

namespace {

// ∫_0^1 (∫_0^t s^{-α} ds)^{-1/2} dt = (1-α)^{1/2} · 2/(1+α) for 0 < α < 1.
double ko_oracle(double alpha) { return std::sqrt(1 - alpha) * 2 / (1 + alpha); }

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = lo * std::pow(hi / lo, double(k) / (n - 1));
  return s;
}

}  // namespace

TEST_CASE("eval_g values") {
  CHECK(eval_g(GSpec::power(0.5), 4.0) == 0.5);
  CHECK(eval_g(GSpec::power_shift(0.5, 1.0), 1.0) == 2.0);
  CHECK_THROWS_AS(eval_g(GSpec::power(0.5), 0.0), std::domain_error);
  CHECK_THROWS_AS(eval_g(GSpec::power(0.5), -1.0), std::domain_error);
}

TEST_CASE("g_asymptote") {
  CHECK(g_asymptote(GSpec::power(0.5)) == 0.0);
  CHECK(g_asymptote(GSpec::power_shift(0.5, 1.0)) == 1.0);
  CHECK(g_asymptote(GSpec::power_shift(0.5, 9.9)) == 9.9);
}

TEST_CASE("g derivative matches a central difference") {
  for (const GSpec& g : {GSpec::power(0.5), GSpec::power(1.5), GSpec::power_shift(0.9, 2.0)}) {
    for (double s : {1e-3, 0.1, 1.0, 7.0}) {
      const double d = 1e-6 * s;
      const double fd = (eval_g(g, s + d) - eval_g(g, s - d)) / (2 * d);
      CHECK(eval_g_derivative(g, s) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("g_integral: closed forms and divergence") {
  CHECK(g_integral(GSpec::power(0.5), 0.0, 4.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(g_integral(GSpec::power_shift(0.5, 1.0), 1.0, 4.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(std::isinf(g_integral(GSpec::power(1.5), 0.0, 1.0)));
  CHECK(std::isinf(g_integral(GSpec::power(1.0), 0.0, 1.0)));
  CHECK(g_integral(GSpec::power(1.0), 1.0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  // table primitive is exact for the piecewise-linear interpolant
  const GSpec t = GSpec::table({1, 3}, {4, 2});
  CHECK(g_integral(t, 0.0, 1.0) == doctest::Approx(4.0));
  CHECK(g_integral(t, 1.0, 3.0) == doctest::Approx(6.0));
  CHECK(g_integral(t, 3.0, 5.0) == doctest::Approx(4.0));
}

TEST_CASE("built-in g families are nonincreasing and bounded below by their limit") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> alpha(0.05, 3.0), a0(0.0, 20.0);
  const auto s = geometric(1e-9, 1e7, 400);
  for (int trial = 0; trial < 40; ++trial) {
    const GSpec g = trial % 2 ? GSpec::power(alpha(rng)) : GSpec::power_shift(alpha(rng), a0(rng));
    const double a = g_asymptote(g);
    double prev = INFINITY;
    for (double x : s) {
      const double v = eval_g(g, x);
      CHECK(v <= prev);
      CHECK(a <= v);
      prev = v;
    }
    CHECK(check_g_invariants(g).ok());
  }
}

TEST_CASE("check_g_invariants flags non-singular and increasing tables") {
  const GInvariantReport flat = check_g_invariants(GSpec::table({0.1, 10}, {2, 2}));
  CHECK(flat.positive);
  CHECK(flat.nonincreasing);
  CHECK_FALSE(flat.singular_at_zero);
  CHECK_THROWS(GSpec::table({0.1, 10}, {1, 2}));
  CHECK_THROWS(GSpec::table({0.1, 10}, {1, -1}));
  CHECK_THROWS(GSpec::power(0.0));
  CHECK_THROWS(GSpec::power_shift(0.5, -1.0));
}

TEST_CASE("Keller-Osserman values against the closed form") {
  const KoResult a = check_ko(GSpec::power(0.5));
  CHECK(a.status == KoStatus::satisfied);
  CHECK(a.satisfied);
  CHECK(a.value == doctest::Approx(4.0 / (3.0 * std::sqrt(2.0))).epsilon(1e-10));
  CHECK(std::abs(a.value - ko_oracle(0.5)) < 1e-10);

  const KoResult b = check_ko(GSpec::power(0.9));
  CHECK(b.satisfied);
  CHECK(std::abs(b.value - std::pow(10.0, -0.5) / 0.95) < 1e-8);

  const KoResult c = check_ko(GSpec::power(2.0));
  CHECK(c.satisfied);
  CHECK(c.value == 0.0);
}

TEST_CASE("Keller-Osserman: every power family is satisfied") {
  for (double alpha = 0.05; alpha < 3.0; alpha += 0.15) {
    const KoResult r = check_ko(GSpec::power(alpha));
    CHECK(r.satisfied);
    if (alpha < 1.0) CHECK(r.value == doctest::Approx(ko_oracle(alpha)).epsilon(1e-7));
  }
}

TEST_CASE("Keller-Osserman for a bounded g") {
  // g = 2: inner 2t, outer ∫_0^1 (2t)^{-1/2} dt = √2
  const KoResult r = check_ko(GSpec::table({1e-30, 1}, {2, 2}));
  CHECK(r.satisfied);
  CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("classify_f on the built-in truth table") {
  using V = Verdict;
  auto verdicts = [](const FSpec& f) {
    const HypothesisReport r = classify_f(f);
    return std::array<V, 4>{r.f1.verdict, r.f2.verdict, r.f3.verdict, r.f4.verdict};
  };
  const V H = V::holds, F = V::fails;
  CHECK(verdicts(FSpec::power(0.5)) == std::array<V, 4>{F, F, H, H});
  CHECK(verdicts(FSpec::power(2.0)) == std::array<V, 4>{F, H, F, F});
  CHECK(verdicts(FSpec::constant()) == std::array<V, 4>{F, F, H, H});
  CHECK(verdicts(FSpec::power(1.0)) == std::array<V, 4>{H, H, H, F});
  CHECK(verdicts(FSpec::linear(3.0)) == std::array<V, 4>{H, H, H, F});
  CHECK(verdicts(FSpec::arrhenius(0.0)) == std::array<V, 4>{H, F, F, F});
  CHECK(verdicts(FSpec::arrhenius(0.3))[2] == H);
  CHECK(verdicts(FSpec::arrhenius(0.1))[2] == F);
}

TEST_CASE("classify_f failures carry witnesses") {
  for (const FSpec& f : {FSpec::power(0.5), FSpec::power(2.0), FSpec::constant(),
                         FSpec::arrhenius(0.1), FSpec::linear(1.0)}) {
    const HypothesisReport r = classify_f(f);
    for (const HypothesisCheck* c : {&r.f1, &r.f2, &r.f3, &r.f4}) {
      CHECK(c->analytic);
      if (c->verdict == Verdict::fails) CHECK_FALSE(c->witnesses.empty());
    }
  }
  // the f3 witness for s² shows q increasing
  const HypothesisReport sq = classify_f(FSpec::power(2.0));
  REQUIRE_FALSE(sq.f3.witnesses.empty());
  const Witness w = sq.f3.witnesses.front();
  CHECK(w.s1 < w.s2);
  CHECK(w.q1 < w.q2);
}

TEST_CASE("classify_f samples table families") {
  const HypothesisReport r = classify_f(FSpec::table({0, 1, 2}, {1, 1, 1}));
  CHECK_FALSE(r.f3.analytic);
  CHECK(r.f3.verdict == Verdict::holds);
  CHECK(r.f1.verdict == Verdict::fails);
}

TEST_CASE("f families: values, derivative, weight") {
  CHECK(eval_f_profile(FSpec::constant(), 3.0) == 1.0);
  CHECK(eval_f_profile(FSpec::power(0.5), 4.0) == 2.0);
  CHECK(eval_f_profile(FSpec::linear(2.0), 4.0) == 8.0);
  CHECK(eval_f_profile(FSpec::arrhenius(0.0), 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(eval_f_profile_derivative(FSpec::power(2.0), 3.0) == doctest::Approx(6.0));
  FSpec w = FSpec::constant();
  w.weight = [](double x, double) { return 1.0 + x; };
  CHECK(eval_f(w, 0.5, 0.0, 2.0) == 1.5);
  CHECK_FALSE(w == FSpec::constant());
  CHECK(FSpec::power(0.5) == FSpec::power(0.5));
  CHECK_THROWS(FSpec::power(-1.0));
}

TEST_CASE("g and f expressions round-trip") {
  for (const GSpec& g : {GSpec::power(0.5), GSpec::power_shift(0.25, 10.869604401089358),
                         GSpec::power(1.5)}) {
    CHECK(parse_g_expr(render_g_expr(g)) == g);
  }
  for (const FSpec& f : {FSpec::constant(), FSpec::power(0.5), FSpec::linear(2.5),
                         FSpec::arrhenius(0.1)}) {
    CHECK(parse_f_expr(render_f_expr(f)) == f);
  }
  CHECK(parse_g_expr("power_shift( alpha = 0.5 , a0=1 )") == GSpec::power_shift(0.5, 1));
  CHECK(parse_f_expr("const") == FSpec::constant());
  CHECK_THROWS(parse_g_expr("power(beta=0.5)"));
  CHECK_THROWS(parse_g_expr("power(alpha=0.5, alpha=0.6)"));
  CHECK_THROWS(parse_g_expr("exp(alpha=1)"));
  CHECK_THROWS(parse_f_expr("power(beta=abc)"));
}
