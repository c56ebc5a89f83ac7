#pragma once

#include <stdexcept>
#include <string>

#include "gradbif/problem.hpp"

namespace gradbif {

struct ProblemFile {
  ProblemSpec problem;
  SolverOpts opts;
  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(int line, const std::string& what)
      : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Line-oriented problem description:
///
///   [domain]  kind = interval  a = 0  b = 1  n = 256
///   [g]       family = power_shift  alpha = 0.5  a0 = 1     (or: g = power(alpha=0.5))
///   [f]       family = const                                 (or: f = power(beta=0.5))
///   [params]  lambda = 2  mu = 1  p = 2
///   [solver]  tol = 1e-10  max_iter = 500                    (optional)
///
/// Several `key = value` pairs may share a line, `#` starts a comment.
/// Rectangles use kind = rectangle with ax, bx, ay, by, n.
/// Throws ParseError citing the offending line.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);

/// Inverse of parse_problem; table families and spatial weights have no
/// textual form and are rejected.
std::string render_problem(const ProblemFile& file);

/// "interval:a:b:n" or "rect:ax:bx:ay:by:n".
DomainSpec parse_domain_arg(const std::string& text);

}  // namespace gradbif
