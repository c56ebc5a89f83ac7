#include "gradbif/nonlin.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "gradbif/grid.hpp"

namespace gradbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_table(const std::vector<double>& s, const std::vector<double>& v,
                    const char* what, bool allow_zero_s) {
  if (s.empty() || s.size() != v.size()) {
    throw std::invalid_argument(std::string(what) + ": table needs matching, non-empty knots");
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k]) || !std::isfinite(v[k])) {
      throw std::invalid_argument(std::string(what) + ": non-finite table entry");
    }
    if (s[k] < 0.0 || (!allow_zero_s && s[k] == 0.0)) {
      throw std::invalid_argument(std::string(what) + ": table abscissas must be positive");
    }
    if (k > 0 && !(s[k] > s[k - 1])) {
      throw std::invalid_argument(std::string(what) + ": table abscissas must increase");
    }
  }
}

/// Piecewise-linear interpolation with constant extension.
double table_eval(const std::vector<double>& s, const std::vector<double>& v, double x) {
  if (x <= s.front()) return v.front();
  if (x >= s.back()) return v.back();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s.begin());
  const double t = (x - s[k - 1]) / (s[k] - s[k - 1]);
  return v[k - 1] + t * (v[k] - v[k - 1]);
}

double table_slope(const std::vector<double>& s, const std::vector<double>& v, double x) {
  if (x <= s.front() || x >= s.back()) return 0.0;
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s.begin());
  return (v[k] - v[k - 1]) / (s[k] - s[k - 1]);
}

/// ∫_0^x of the table interpolant (with constant extension).
double table_primitive(const std::vector<double>& s, const std::vector<double>& v, double x) {
  if (x <= s.front()) return v.front() * x;
  double acc = v.front() * s.front();
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (x <= s[k]) {
      const double vx = table_eval(s, v, x);
      return acc + 0.5 * (v[k - 1] + vx) * (x - s[k - 1]);
    }
    acc += 0.5 * (v[k - 1] + v[k]) * (s[k] - s[k - 1]);
  }
  return acc + v.back() * (x - s.back());
}

/// ∫_lo^hi τ^{-α} dτ.
double power_integral(double alpha, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (alpha == 1.0) return lo == 0.0 ? kInf : std::log(hi / lo);
  if (lo == 0.0) return alpha > 1.0 ? kInf : std::pow(hi, 1.0 - alpha) / (1.0 - alpha);
  const double e = 1.0 - alpha;
  // hi^e - lo^e = hi^e (1 - (lo/hi)^e), written to keep accuracy when lo ≈ hi.
  return std::pow(hi, e) * -std::expm1(e * std::log(lo / hi)) / e;
}

}  // namespace

GSpec GSpec::power(double alpha) {
  GSpec g;
  g.family = GFamily::power;
  g.alpha = alpha;
  g.validate();
  return g;
}

GSpec GSpec::power_shift(double alpha, double a0) {
  GSpec g;
  g.family = GFamily::power_shift;
  g.alpha = alpha;
  g.a0 = a0;
  g.validate();
  return g;
}

GSpec GSpec::table(std::vector<double> s, std::vector<double> values) {
  GSpec g;
  g.family = GFamily::table;
  g.table_s = std::move(s);
  g.table_g = std::move(values);
  g.validate();
  return g;
}

void GSpec::validate() const {
  switch (family) {
    case GFamily::power:
    case GFamily::power_shift:
      if (!(std::isfinite(alpha) && alpha > 0.0)) {
        throw std::invalid_argument("g: alpha must be positive, got " + format_real(alpha));
      }
      if (family == GFamily::power_shift && !(std::isfinite(a0) && a0 >= 0.0)) {
        throw std::invalid_argument("g: a0 must be nonnegative, got " + format_real(a0));
      }
      return;
    case GFamily::table:
      validate_table(table_s, table_g, "g", false);
      for (std::size_t k = 0; k < table_g.size(); ++k) {
        if (!(table_g[k] > 0.0)) throw std::invalid_argument("g: table values must be positive");
        if (k > 0 && table_g[k] > table_g[k - 1]) {
          throw std::invalid_argument("g: table values must be nonincreasing");
        }
      }
      return;
  }
}

double eval_g(const GSpec& g, double s) {
  if (!(s > 0.0)) throw std::domain_error("g evaluated at s <= 0");
  switch (g.family) {
    case GFamily::power:
      return std::pow(s, -g.alpha);
    case GFamily::power_shift:
      return std::pow(s, -g.alpha) + g.a0;
    case GFamily::table:
      return table_eval(g.table_s, g.table_g, s);
  }
  return 0.0;
}

double eval_g_derivative(const GSpec& g, double s) {
  if (!(s > 0.0)) throw std::domain_error("g' evaluated at s <= 0");
  switch (g.family) {
    case GFamily::power:
    case GFamily::power_shift:
      return -g.alpha * std::pow(s, -g.alpha - 1.0);
    case GFamily::table:
      return table_slope(g.table_s, g.table_g, s);
  }
  return 0.0;
}

double g_integral(const GSpec& g, double lo, double hi) {
  if (lo < 0.0 || hi < lo) throw std::domain_error("g_integral: need 0 <= lo <= hi");
  switch (g.family) {
    case GFamily::power:
      return power_integral(g.alpha, lo, hi);
    case GFamily::power_shift:
      return power_integral(g.alpha, lo, hi) + g.a0 * (hi - lo);
    case GFamily::table:
      return table_primitive(g.table_s, g.table_g, hi) - table_primitive(g.table_s, g.table_g, lo);
  }
  return 0.0;
}

double g_asymptote(const GSpec& g) {
  switch (g.family) {
    case GFamily::power:
      return 0.0;
    case GFamily::power_shift:
      return g.a0;
    case GFamily::table:
      g.validate();  // the tail value is only the limit for a monotone table
      return g.table_g.back();
  }
  return 0.0;
}

GInvariantReport check_g_invariants(const GSpec& g) {
  GInvariantReport rep;
  const int count = 361;
  double prev = kInf;
  for (int k = 0; k < count; ++k) {
    const double s = std::pow(10.0, -12.0 + 18.0 * k / (count - 1));
    const double v = eval_g(g, s);
    if (!(v > 0.0) || !std::isfinite(v)) rep.positive = false;
    if (v > prev * (1.0 + 1e-12)) rep.nonincreasing = false;
    prev = v;
  }
  const double g12 = eval_g(g, 1e-12), g9 = eval_g(g, 1e-9), g6 = eval_g(g, 1e-6);
  rep.singular_at_zero = g12 > g9 * (1.0 + 1e-6) && g9 > g6 * (1.0 + 1e-6);
  return rep;
}

KoResult check_ko(const GSpec& g, double quad_tol) {
  using boost::math::quadrature::gauss_kronrod;
  KoResult res;
  auto integrand = [&](double t) {
    const double inner = g_integral(g, 0.0, t);
    if (!std::isfinite(inner)) return 0.0;
    return 1.0 / std::sqrt(inner);
  };
  constexpr int kSegments = 64;
  double total = 0.0;
  double prev = 0.0, last = 0.0;
  bool quad_ok = true;
  for (int k = 0; k < kSegments; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = 0.5 * hi;
    double err = 0.0;
    // Integrate over a unit reference interval: boost compares its local error
    // estimate in reference units, which stalls refinement on tiny segments.
    auto mapped = [&](double x) { return (hi - lo) * integrand(lo + (hi - lo) * x); };
    const double c = gauss_kronrod<double, 15>::integrate(mapped, 0.0, 1.0, 15, quad_tol, &err);
    if (!std::isfinite(c) || err > 1e3 * quad_tol * std::max(1.0, std::abs(c))) quad_ok = false;
    total += c;
    prev = last;
    last = c;
  }
  if (last == 0.0) {
    res.value = total;
    res.satisfied = true;
    res.status = quad_ok ? KoStatus::satisfied : KoStatus::undetermined;
    return res;
  }
  const double ratio = prev > 0.0 ? last / prev : kInf;
  if (!(ratio < 1.0 - 1e-3)) {
    res.value = kInf;
    res.satisfied = false;
    res.status = quad_ok ? KoStatus::violated : KoStatus::undetermined;
    return res;
  }
  // Segment contributions decay geometrically; sum the remaining series.
  res.tail_estimate = last * ratio / (1.0 - ratio);
  res.value = total + res.tail_estimate;
  res.satisfied = true;
  res.status = quad_ok ? KoStatus::satisfied : KoStatus::undetermined;
  if (!quad_ok) res.satisfied = false;
  return res;
}

FSpec FSpec::constant() { return FSpec{}; }

FSpec FSpec::power(double beta) {
  FSpec f;
  f.family = FFamily::power;
  f.beta = beta;
  f.validate();
  return f;
}

FSpec FSpec::linear(double c) {
  FSpec f;
  f.family = FFamily::linear;
  f.c = c;
  f.validate();
  return f;
}

FSpec FSpec::arrhenius(double eps) {
  FSpec f;
  f.family = FFamily::arrhenius;
  f.eps = eps;
  f.validate();
  return f;
}

FSpec FSpec::table(std::vector<double> s, std::vector<double> values) {
  FSpec f;
  f.family = FFamily::table;
  f.table_s = std::move(s);
  f.table_f = std::move(values);
  f.validate();
  return f;
}

void FSpec::validate() const {
  switch (family) {
    case FFamily::constant:
      return;
    case FFamily::power:
      if (!(std::isfinite(beta) && beta >= 0.0)) {
        throw std::invalid_argument("f: beta must be nonnegative, got " + format_real(beta));
      }
      return;
    case FFamily::linear:
      if (!(std::isfinite(c) && c > 0.0)) {
        throw std::invalid_argument("f: c must be positive, got " + format_real(c));
      }
      return;
    case FFamily::arrhenius:
      if (!(std::isfinite(eps) && eps >= 0.0)) {
        throw std::invalid_argument("f: eps must be nonnegative, got " + format_real(eps));
      }
      return;
    case FFamily::table:
      validate_table(table_s, table_f, "f", true);
      for (std::size_t k = 0; k < table_f.size(); ++k) {
        if (table_f[k] < 0.0) throw std::invalid_argument("f: table values must be >= 0");
        if (k > 0 && table_f[k] < table_f[k - 1]) {
          throw std::invalid_argument("f: table values must be nondecreasing");
        }
      }
      return;
  }
}

bool operator==(const FSpec& a, const FSpec& b) {
  if (a.family != b.family) return false;
  if (static_cast<bool>(a.weight) || static_cast<bool>(b.weight)) return false;
  switch (a.family) {
    case FFamily::constant:
      return true;
    case FFamily::power:
      return a.beta == b.beta;
    case FFamily::linear:
      return a.c == b.c;
    case FFamily::arrhenius:
      return a.eps == b.eps;
    case FFamily::table:
      return a.table_s == b.table_s && a.table_f == b.table_f;
  }
  return false;
}

double eval_f_profile(const FSpec& f, double s) {
  s = std::max(s, 0.0);
  switch (f.family) {
    case FFamily::constant:
      return 1.0;
    case FFamily::power:
      return f.beta == 0.0 ? 1.0 : std::pow(s, f.beta);
    case FFamily::linear:
      return f.c * s;
    case FFamily::arrhenius:
      return std::exp(s / (1.0 + f.eps * s));
    case FFamily::table:
      return table_eval(f.table_s, f.table_f, s);
  }
  return 0.0;
}

double eval_f_profile_derivative(const FSpec& f, double s) {
  s = std::max(s, 0.0);
  switch (f.family) {
    case FFamily::constant:
      return 0.0;
    case FFamily::power:
      if (f.beta == 0.0) return 0.0;
      if (s == 0.0) return f.beta < 1.0 ? kInf : (f.beta == 1.0 ? 1.0 : 0.0);
      return f.beta * std::pow(s, f.beta - 1.0);
    case FFamily::linear:
      return f.c;
    case FFamily::arrhenius: {
      const double d = 1.0 + f.eps * s;
      return std::exp(s / d) / (d * d);
    }
    case FFamily::table:
      return table_slope(f.table_s, f.table_f, s);
  }
  return 0.0;
}

double eval_weight(const FSpec& f, double x, double y) { return f.weight ? f.weight(x, y) : 1.0; }

namespace {

struct Sampled {
  std::vector<double> s;
  std::vector<double> q;
};

Sampled sample_quotient(const FSpec& f, int samples) {
  Sampled out;
  samples = std::max(samples, 25);
  out.s.resize(samples);
  out.q.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double s = std::pow(10.0, -6.0 + 12.0 * k / (samples - 1));
    out.s[k] = s;
    out.q[k] = eval_f_profile(f, s) / s;
  }
  return out;
}

std::size_t index_near(const Sampled& smp, double s) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < smp.s.size(); ++k) {
    if (std::abs(std::log(smp.s[k] / s)) < std::abs(std::log(smp.s[best] / s))) best = k;
  }
  return best;
}

Witness make_witness(const FSpec& f, double s1, double s2) {
  return {s1, eval_f_profile(f, s1) / s1, s2, eval_f_profile(f, s2) / s2};
}

HypothesisCheck monotone_check(const Sampled& smp, bool nondecreasing) {
  HypothesisCheck chk;
  chk.verdict = Verdict::holds;
  for (std::size_t k = 0; k + 1 < smp.q.size(); ++k) {
    const double a = smp.q[k], b = smp.q[k + 1];
    const bool bad = nondecreasing ? b < a * (1.0 - 1e-12) : b > a * (1.0 + 1e-12);
    if (bad) {
      chk.verdict = Verdict::fails;
      chk.witnesses.push_back({smp.s[k], a, smp.s[k + 1], b});
      break;
    }
  }
  return chk;
}

HypothesisCheck tail_to_zero_check(const Sampled& smp) {
  HypothesisCheck chk;
  const std::size_t end = smp.s.size() - 1;
  const std::size_t mid = index_near(smp, 1e3);
  bool tail_monotone = true;
  for (std::size_t k = mid; k < end; ++k) {
    if (smp.q[k + 1] > smp.q[k] * (1.0 + 1e-12)) tail_monotone = false;
  }
  if (tail_monotone && smp.q[end] < 0.5 * smp.q[mid]) {
    chk.verdict = Verdict::holds;
  } else if (smp.q[end] >= smp.q[mid] * (1.0 - 1e-9)) {
    chk.verdict = Verdict::fails;
    chk.witnesses.push_back({smp.s[mid], smp.q[mid], smp.s[end], smp.q[end]});
  }
  return chk;
}

HypothesisCheck linear_lower_bound_check(const Sampled& smp) {
  HypothesisCheck chk;
  const std::size_t end = smp.s.size() - 1;
  const std::size_t hi_mid = index_near(smp, 1e3);
  const std::size_t lo_mid = index_near(smp, 1e-3);
  const bool decays_high = smp.q[end] < 0.5 * smp.q[hi_mid];
  const bool decays_low = smp.q[0] < 0.5 * smp.q[lo_mid];
  if (decays_high) chk.witnesses.push_back({smp.s[hi_mid], smp.q[hi_mid], smp.s[end], smp.q[end]});
  if (decays_low) chk.witnesses.push_back({smp.s[lo_mid], smp.q[lo_mid], smp.s[0], smp.q[0]});
  if (!chk.witnesses.empty()) {
    chk.verdict = Verdict::fails;
  } else if (*std::min_element(smp.q.begin(), smp.q.end()) > 0.0) {
    chk.verdict = Verdict::holds;
  }
  return chk;
}

void apply_analytic(HypothesisCheck& chk, Verdict v, const Witness& fallback) {
  chk.analytic = true;
  chk.verdict = v;
  if (v != Verdict::fails) {
    chk.witnesses.clear();
  } else if (chk.witnesses.empty()) {
    chk.witnesses.push_back(fallback);
  }
}

}  // namespace

HypothesisReport classify_f(const FSpec& f, int samples) {
  f.validate();
  const Sampled smp = sample_quotient(f, samples);
  HypothesisReport rep;
  rep.f1 = linear_lower_bound_check(smp);
  rep.f2 = monotone_check(smp, true);
  rep.f3 = monotone_check(smp, false);
  rep.f4 = tail_to_zero_check(smp);
  if (f.family == FFamily::table) return rep;

  const Verdict H = Verdict::holds, F = Verdict::fails;
  Verdict v1 = F, v2 = F, v3 = H, v4 = H;
  // Fallback witnesses: q at the two ends of the sampled range.
  const Witness ends = make_witness(f, 1.0, 1e6);
  const Witness near0 = make_witness(f, 1e-6, 1.0);
  Witness w1 = ends, w2 = near0, w3 = ends, w4 = ends;
  switch (f.family) {
    case FFamily::constant:
      break;
    case FFamily::power:
      if (f.beta == 1.0) {
        v1 = H, v2 = H, v3 = H, v4 = F;
      } else if (f.beta > 1.0) {
        v1 = F, v2 = H, v3 = F, v4 = F;
        w1 = near0;
        w3 = near0;
      }
      break;
    case FFamily::linear:
      v1 = H, v2 = H, v3 = H, v4 = F;
      break;
    case FFamily::arrhenius:
      if (f.eps == 0.0) {
        v1 = H, v2 = F, v3 = F, v4 = F;
        w3 = make_witness(f, 2.0, 4.0);
      } else {
        // q'(s) > 0 exactly where s > (1 + εs)², which is nonempty iff ε < 1/4.
        v3 = f.eps >= 0.25 ? H : F;
        const double vertex = (1.0 - 2.0 * f.eps) / (2.0 * f.eps * f.eps);
        w3 = make_witness(f, vertex * 0.999, vertex * 1.001);
      }
      break;
    case FFamily::table:
      break;
  }
  apply_analytic(rep.f1, v1, w1);
  apply_analytic(rep.f2, v2, w2);
  apply_analytic(rep.f3, v3, w3);
  apply_analytic(rep.f4, v4, w4);
  return rep;
}

namespace {

struct CallExpr {
  std::string name;
  std::map<std::string, double> args;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) {
    throw std::invalid_argument(context + ": malformed number '" + t + "'");
  }
  return v;
}

CallExpr parse_call(const std::string& text) {
  CallExpr call;
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) {
    call.name = t;
  } else {
    if (t.back() != ')') throw std::invalid_argument("expression '" + t + "': missing ')'");
    call.name = trim(t.substr(0, open));
    const std::string body = t.substr(open + 1, t.size() - open - 2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const auto comma = body.find(',', pos);
      const std::string item =
          trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (!item.empty()) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          throw std::invalid_argument("expression '" + t + "': expected key=value, got '" +
                                      item + "'");
        }
        const std::string key = trim(item.substr(0, eq));
        if (call.args.count(key)) throw std::invalid_argument("duplicate argument '" + key + "'");
        call.args[key] = parse_number(item.substr(eq + 1), "argument '" + key + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (call.name.empty()) throw std::invalid_argument("empty nonlinearity expression");
  return call;
}

double take(CallExpr& call, const std::string& key, std::optional<double> fallback = {}) {
  const auto it = call.args.find(key);
  if (it == call.args.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument(call.name + ": missing argument '" + key + "'");
  }
  const double v = it->second;
  call.args.erase(it);
  return v;
}

void require_consumed(const CallExpr& call) {
  if (!call.args.empty()) {
    throw std::invalid_argument(call.name + ": unknown argument '" + call.args.begin()->first + "'");
  }
}

}  // namespace

GSpec parse_g_expr(const std::string& text) {
  CallExpr call = parse_call(text);
  GSpec g;
  if (call.name == "power") {
    g = GSpec::power(take(call, "alpha"));
  } else if (call.name == "power_shift") {
    const double alpha = take(call, "alpha");
    g = GSpec::power_shift(alpha, take(call, "a0"));
  } else {
    throw std::invalid_argument("unknown g family '" + call.name + "'");
  }
  require_consumed(call);
  return g;
}

FSpec parse_f_expr(const std::string& text) {
  CallExpr call = parse_call(text);
  FSpec f;
  if (call.name == "const" || call.name == "constant") {
    f = FSpec::constant();
  } else if (call.name == "power") {
    f = FSpec::power(take(call, "beta"));
  } else if (call.name == "linear") {
    f = FSpec::linear(take(call, "c"));
  } else if (call.name == "arrhenius") {
    f = FSpec::arrhenius(take(call, "eps"));
  } else {
    throw std::invalid_argument("unknown f family '" + call.name + "'");
  }
  require_consumed(call);
  return f;
}

std::string render_g_expr(const GSpec& g) {
  switch (g.family) {
    case GFamily::power:
      return "power(alpha=" + format_real(g.alpha) + ")";
    case GFamily::power_shift:
      return "power_shift(alpha=" + format_real(g.alpha) + ", a0=" + format_real(g.a0) + ")";
    case GFamily::table:
      return "table";
  }
  return {};
}

std::string render_f_expr(const FSpec& f) {
  switch (f.family) {
    case FFamily::constant:
      return "const";
    case FFamily::power:
      return "power(beta=" + format_real(f.beta) + ")";
    case FFamily::linear:
      return "linear(c=" + format_real(f.c) + ")";
    case FFamily::arrhenius:
      return "arrhenius(eps=" + format_real(f.eps) + ")";
    case FFamily::table:
      return "table";
  }
  return {};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::undetermined:
      return "undetermined";
  }
  return {};
}

std::string to_string(KoStatus s) {
  switch (s) {
    case KoStatus::satisfied:
      return "satisfied";
    case KoStatus::violated:
      return "violated";
    case KoStatus::undetermined:
      return "undetermined";
  }
  return {};
}

}  // namespace gradbif
