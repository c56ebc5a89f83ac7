#include <doctest.h>

#include <string>

#include "gradbif/problem_file.hpp"

using namespace gradbif;

namespace {

const char* kValid = R"(# threshold problem
[domain] kind=interval a=0 b=1 n=256
[g] family=power_shift alpha=0.5 a0=1
[f] family=const
[params] lambda=2.0 mu=1.0 p=2.0
)";

int error_line(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("valid problem file") {
  const ProblemFile pf = parse_problem(kValid);
  CHECK(pf.problem.domain == DomainSpec::interval(0, 1, 256));
  CHECK(pf.problem.g == GSpec::power_shift(0.5, 1.0));
  CHECK(pf.problem.f == FSpec::constant());
  CHECK(pf.problem.lambda == 2.0);
  CHECK(pf.problem.mu == 1.0);
  CHECK(pf.problem.p == 2.0);
  CHECK(pf.opts == SolverOpts{});
}

TEST_CASE("expression form and solver section") {
  const ProblemFile pf = parse_problem(R"(
[domain]
kind = rectangle
ax = 0  bx = 1  ay = 0  by = 2  n = 16
[g]
g = power(alpha=0.75)   # singular at 0
[f]
f = arrhenius(eps=0.1)
[params]
lambda = 1  mu = 0.5  p = 1.5
[solver]
tol = 1e-8  max_iter = 50
)");
  CHECK(pf.problem.domain == DomainSpec::rectangle(0, 1, 0, 2, 16));
  CHECK(pf.problem.g == GSpec::power(0.75));
  CHECK(pf.problem.f == FSpec::arrhenius(0.1));
  CHECK(pf.problem.p == 1.5);
  CHECK(pf.opts.tol == 1e-8);
  CHECK(pf.opts.max_iter == 50);
}

TEST_CASE("parse errors") {
  std::string no_f = kValid;
  no_f.replace(no_f.find("[f] family=const\n"), 17, "");
  CHECK_THROWS_AS(parse_problem(no_f), ParseError);
  CHECK(error_text(no_f).find("[f]") != std::string::npos);

  std::string bad_p = kValid;
  bad_p.replace(bad_p.find("p=2.0"), 5, "p=2.5");
  CHECK(error_line(bad_p) == 5);
  CHECK(error_text(bad_p).find("(0, 2]") != std::string::npos);

  std::string bad_key = kValid;
  bad_key.replace(bad_key.find("a0=1"), 4, "b0=1");
  CHECK(error_line(bad_key) == 3);

  CHECK(error_line(std::string(kValid) + "[extra] x=1\n") == 6);
  CHECK(error_line(std::string(kValid) + "lambda 3\n") == 6);
}

TEST_CASE("render and parse round-trip") {
  ProblemFile pf = parse_problem(kValid);
  CHECK(parse_problem(render_problem(pf)) == pf);
  pf.problem.domain = DomainSpec::rectangle(-1, 1, 0, 0.3, 24);
  pf.problem.g = GSpec::power(0.1 + 0.2);
  pf.problem.f = FSpec::linear(1.0 / 3.0);
  pf.problem.lambda = 0.1;
  pf.problem.mu = 7.0 / 3.0;
  pf.problem.p = 0.7;
  pf.opts.tol = 3e-11;
  pf.opts.max_iter = 123;
  CHECK(parse_problem(render_problem(pf)) == pf);

  pf.problem.g = GSpec::table({1, 2}, {2, 1});
  CHECK_THROWS(render_problem(pf));
}

TEST_CASE("domain arguments") {
  CHECK(parse_domain_arg("interval:0:1:256") == DomainSpec::interval(0, 1, 256));
  CHECK(parse_domain_arg("rect:0:1:0:2:8") == DomainSpec::rectangle(0, 1, 0, 2, 8));
  CHECK_THROWS(parse_domain_arg("interval:0:1"));
  CHECK_THROWS(parse_domain_arg("disk:0:1:8"));
  CHECK_THROWS(parse_domain_arg("interval:0:1:two"));
}
