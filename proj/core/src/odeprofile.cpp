#include "gradbif/odeprofile.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "equation.hpp"

namespace gradbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Energy {
  const GSpec& g;
  double H;
  double q;
  double w(double h) const {
    const double G = g_integral(g, h, H);
    return std::isfinite(G) ? std::sqrt(2.0 * G + q * q) : kInf;
  }
};

/// ∫_lo^hi dh / h'(h) for the trajectory ending at h(eta) = H.
double travel_time(const GSpec& g, double H, double q, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const Energy e{g, H, q};
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double h) {
    const double w = e.w(h);
    return std::isfinite(w) ? 1.0 / w : 0.0;
  };
  double err = 0.0;
  return integrator.integrate(f, lo, hi, 1e-14, &err);
}

double calibrate_height(const GSpec& g, double eta, double q, double tol) {
  double lo = 0.0, hi = 0.5 * eta * q;
  int grow = 0;
  while (travel_time(g, hi, q, 0.0, hi) < eta) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200) throw std::runtime_error("solve_h: could not bracket h(eta)");
  }
  for (int it = 0; it < 200 && hi - lo > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (travel_time(g, mid, q, 0.0, mid) < eta ? lo : hi) = mid;
  }
  if (!(hi - lo <= tol * hi)) throw std::runtime_error("solve_h: calibration did not converge");
  return 0.5 * (lo + hi);
}

}  // namespace

HProfile solve_h(const GSpec& g, double eta, double hprime_eta, double tol) {
  g.validate();
  if (!(eta > 0.0) || !(hprime_eta > 0.0)) {
    throw std::invalid_argument("solve_h: eta and hprime_eta must be positive");
  }
  const double q = hprime_eta;
  const double H = calibrate_height(g, eta, q, tol);
  const Energy energy{g, H, q};

  // h nodes, descending: uniform near H, geometric toward 0.
  constexpr int kUniform = 2000;
  constexpr int kPerDecade = 20;
  std::vector<double> hs;
  for (int k = kUniform; k >= 1; --k) hs.push_back(H * k / kUniform);
  const double h_switch = 1e-6 * H;
  const double h_last = 1e-12 * H;
  for (double h = H / kUniform * std::pow(10.0, -1.0 / kPerDecade); h > h_last * 0.999;
       h *= std::pow(10.0, -1.0 / kPerDecade)) {
    hs.push_back(h);
  }
  // Stop where h'^2 outgrows what a double resolves to 1e-8 absolute.
  constexpr double kMaxSlope2 = 1e7;
  while (hs.size() > 1 && !(energy.w(hs.back()) * energy.w(hs.back()) <= kMaxSlope2)) hs.pop_back();

  // Adaptive RK in σ = ln(H / h) for the state (t, w = h'):
  // dt/dσ = -h / w, dw/dσ = h g(h) / w, which stays mild as h -> 0.
  using State = std::array<double, 2>;
  std::vector<double> hs_rk, sigmas{0.0};
  for (double h : hs) {
    if (h >= h_switch && h < H) {
      hs_rk.push_back(h);
      sigmas.push_back(std::log(H / h));
    }
  }
  auto rhs = [&](const State& y, State& dy, double sigma) {
    const double h = H * std::exp(-sigma);
    dy[0] = -h / y[1];
    dy[1] = h * eval_g(g, h) / y[1];
  };
  std::vector<State> states;
  State y0{eta, q};
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-15, 1e-14);
  ode::integrate_times(stepper, rhs, y0, sigmas.begin(), sigmas.end(), 1e-4,
                       [&](const State& y, double) { states.push_back(y); });

  HProfile hp;
  hp.eta = eta;
  hp.hprime_eta = q;
  hp.g = g;
  if (states.size() != sigmas.size()) throw std::runtime_error("solve_h: integration stopped early");
  // states[0] is t = eta; states[k] matches hs_rk[k-1].
  std::vector<double> t_desc, h_desc, w_desc;
  t_desc.push_back(eta);
  h_desc.push_back(H);
  w_desc.push_back(q);
  for (std::size_t k = 1; k < states.size(); ++k) {
    t_desc.push_back(states[k][0]);
    h_desc.push_back(hs_rk[k - 1]);
    w_desc.push_back(energy.w(hs_rk[k - 1]));
  }
  for (double h : hs) {
    if (h >= h_switch) continue;
    t_desc.push_back(travel_time(g, H, q, 0.0, h));
    h_desc.push_back(h);
    w_desc.push_back(energy.w(h));
  }
  t_desc.push_back(0.0);
  h_desc.push_back(0.0);
  w_desc.push_back(energy.w(0.0));

  hp.t.assign(t_desc.rbegin(), t_desc.rend());
  hp.h.assign(h_desc.rbegin(), h_desc.rend());
  hp.hprime.assign(w_desc.rbegin(), w_desc.rend());
  for (std::size_t k = 1; k < hp.t.size(); ++k) {
    if (!(hp.t[k] > hp.t[k - 1])) {
      throw std::runtime_error("solve_h: node times are not increasing near h = " +
                               format_real(hp.h[k]));
    }
  }
  return hp;
}

double energy_residual(const HProfile& hp) {
  const double H = hp.h_eta();
  const double q2 = hp.hprime_eta * hp.hprime_eta;
  double worst = 0.0;
  for (std::size_t k = 0; k < hp.h.size(); ++k) {
    if (!std::isfinite(hp.hprime[k])) continue;
    const double G = g_integral(hp.g, std::min(hp.h[k], H), H);
    if (!std::isfinite(G)) {
      worst = kInf;
      continue;
    }
    worst = std::max(worst, std::abs(hp.hprime[k] * hp.hprime[k] - 2.0 * G - q2));
  }
  return worst;
}

GrowthCheck growth_constants(const HProfile& hp, double p) {
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("growth_constants: p must lie in (0, 2]");
  GrowthCheck gc;
  gc.c1 = 2.0 * hp.h_eta();
  gc.c2 = hp.hprime_eta * hp.hprime_eta + 1.0;
  gc.verified = true;
  for (std::size_t k = 0; k < hp.h.size(); ++k) {
    if (!(hp.h[k] > 0.0)) continue;  // g(0) = +inf bounds everything
    const double lhs = std::pow(hp.hprime[k], p);
    const double rhs = gc.c1 * eval_g(hp.g, hp.h[k]) + gc.c2;
    if (!(lhs <= rhs * (1.0 + 1e-12))) {
      gc.verified = false;
      gc.witness = static_cast<int>(k);
      break;
    }
  }
  return gc;
}

std::vector<double> eval_h(const HProfile& hp, std::span<const double> t) {
  // Hermite cubic on the exact slopes, limited (Fritsch-Carlson) so the
  // interpolant stays monotone; an infinite slope at t = 0 becomes the secant.
  const std::size_t m = hp.t.size();
  std::vector<double> xs = hp.t, ys = hp.h, dydx = hp.hprime;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double delta = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    if (!std::isfinite(dydx[k])) dydx[k] = delta;
    const double a = dydx[k] / delta, b = dydx[k + 1] / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      dydx[k] = tau * a * delta;
      dydx[k + 1] = tau * b * delta;
    }
  }
  boost::math::interpolators::cubic_hermite<std::vector<double>> interp(
      std::move(xs), std::move(ys), std::move(dydx));
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] >= 0.0 && t[k] <= hp.eta)) {
      throw std::domain_error("eval_h: t = " + format_real(t[k]) + " outside [0, eta]");
    }
    out[k] = interp(t[k]);
  }
  return out;
}

ScalarField build_supersolution(const HProfile& hp, const EigenPair& pair, double M, double c) {
  if (!(M > 0.0)) throw std::invalid_argument("build_supersolution: M must be positive");
  if (!(c > 0.0) || !(c * pair.phi1.sup_norm() < hp.eta)) {
    throw std::invalid_argument("build_supersolution: need 0 < c·‖φ₁‖∞ < eta");
  }
  std::vector<double> t(pair.phi1.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = c * pair.phi1[k];
  std::vector<double> h = eval_h(hp, t);
  for (double& v : h) v *= M;
  return ScalarField(pair.phi1.domain(), std::move(h));
}

SuperCheck verify_supersolution(const ScalarField& candidate, const ProblemSpec& problem) {
  problem.validate();
  if (!(candidate.domain() == problem.domain)) {
    throw std::invalid_argument("verify_supersolution: candidate grid differs from the problem");
  }
  if (!(candidate.min() > 0.0)) {
    throw std::invalid_argument("verify_supersolution: candidate must be positive");
  }
  const detail::DirectEquation eq(problem, 0.0);
  std::vector<double> excess(candidate.size()), lap(candidate.size());
  eq.residual(candidate.values(), excess, {});
  stencil::neg_laplacian(problem.domain, candidate.values(), lap);
  double lap_sup = 0.0;
  for (double v : lap) lap_sup = std::max(lap_sup, std::abs(v));

  SuperCheck sc;
  sc.slack = problem.domain.min_h() * problem.domain.min_h() * lap_sup;
  const auto it = std::min_element(excess.begin(), excess.end());
  sc.witness = static_cast<std::size_t>(it - excess.begin());
  sc.min_excess = *it;
  sc.ok = sc.min_excess >= -sc.slack;
  sc.excess = ScalarField(problem.domain, std::move(excess));
  return sc;
}

SuperSearch search_supersolution(const ProblemSpec& problem, const HProfile& hp,
                                 const EigenPair& pair) {
  SuperSearch out;
  const double phi_sup = pair.phi1.sup_norm();
  double best = -kInf;
  for (double M = 1.5; M <= 1e6; M *= 2.0) {
    for (double frac : {0.9, 0.5, 0.25, 0.1}) {
      const double c = frac * hp.eta / phi_sup;
      ScalarField cand = build_supersolution(hp, pair, M, c);
      SuperCheck chk = verify_supersolution(cand, problem);
      ++out.tried;
      if (chk.ok || chk.min_excess > best) {
        best = chk.min_excess;
        out.M = M;
        out.c = c;
        out.candidate = std::move(cand);
        out.check = std::move(chk);
      }
      if (out.check.ok) {
        out.found = true;
        return out;
      }
    }
  }
  return out;
}

}  // namespace gradbif
