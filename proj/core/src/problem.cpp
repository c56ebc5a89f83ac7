#include "gradbif/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace gradbif {

void SolverOpts::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("solver: tol must lie in (0, 1)");
  if (max_iter <= 0) throw std::invalid_argument("solver: max_iter must be positive");
  if (!(sup_cap > 0.0)) throw std::invalid_argument("solver: sup_cap must be positive");
  if (!(step_floor > 0.0 && step_floor < 1.0)) {
    throw std::invalid_argument("solver: step_floor must lie in (0, 1)");
  }
  if (!(floor_abs > 0.0) || floor_dist < 0.0) {
    throw std::invalid_argument("solver: positivity floor must be positive");
  }
  if (divergence_window <= 0 || polish_steps < 0) {
    throw std::invalid_argument("solver: bad divergence_window or polish_steps");
  }
  if (!(eta > 0.0) || !(hprime_eta > 0.0)) {
    throw std::invalid_argument("solver: eta and hprime_eta must be positive");
  }
}

void ProblemSpec::validate() const {
  domain.validate();
  g.validate();
  f.validate();
  if (!(std::isfinite(lambda) && lambda >= 0.0)) {
    throw std::invalid_argument("lambda must be finite and >= 0, got " + format_real(lambda));
  }
  if (!(std::isfinite(mu) && mu >= 0.0)) {
    throw std::invalid_argument("mu must be finite and >= 0, got " + format_real(mu));
  }
  if (!(p > 0.0 && p <= 2.0)) {
    throw std::invalid_argument("p must lie in (0, 2], got " + format_real(p));
  }
}

std::string to_string(Axis axis) { return axis == Axis::lambda ? "lambda" : "mu"; }

double param_of(const ProblemSpec& problem, Axis axis) {
  return axis == Axis::lambda ? problem.lambda : problem.mu;
}

ProblemSpec with_param(ProblemSpec problem, Axis axis, double value) {
  (axis == Axis::lambda ? problem.lambda : problem.mu) = value;
  return problem;
}

std::vector<double> positivity_floor(const DomainSpec& domain, const SolverOpts& opts) {
  const ScalarField dist = boundary_distance(domain);
  std::vector<double> out(dist.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = opts.floor_abs + opts.floor_dist * dist[k];
  return out;
}

std::vector<double> weight_field(const DomainSpec& domain, const FSpec& f) {
  if (!f.weight) return std::vector<double>(domain.size(), 1.0);
  const ScalarField w =
      ScalarField::from_function(domain, [&](double x, double y) { return f.weight(x, y); });
  for (double v : w.values()) {
    if (!(v > 0.0)) throw std::invalid_argument("f: weight must be positive at every node");
  }
  return w.vector();
}

}  // namespace gradbif
