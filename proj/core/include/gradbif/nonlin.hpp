#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gradbif {

enum class GFamily { power, power_shift, table };

/// Singular absorption term g: (0, ∞) → (0, ∞), nonincreasing, g(0+) = +∞.
///
/// `table` interpolates (s, g) knots linearly and extends the end values as
/// constants; it exists for boundary cases and is not singular at 0.
struct GSpec {
  GFamily family = GFamily::power;
  double alpha = 0.5;
  double a0 = 0.0;
  std::vector<double> table_s;
  std::vector<double> table_g;

  static GSpec power(double alpha);
  static GSpec power_shift(double alpha, double a0);
  static GSpec table(std::vector<double> s, std::vector<double> g);

  /// Throws std::invalid_argument on malformed parameters.
  void validate() const;

  friend bool operator==(const GSpec&, const GSpec&) = default;
};

/// g(s). Throws std::domain_error for s <= 0.
double eval_g(const GSpec& g, double s);
/// g'(s) for s > 0.
double eval_g_derivative(const GSpec& g, double s);
/// ∫_lo^hi g(τ)dτ for 0 <= lo <= hi; +∞ when the integral diverges at 0.
double g_integral(const GSpec& g, double lo, double hi);
/// a = lim_{s→∞} g(s).
double g_asymptote(const GSpec& g);

struct GInvariantReport {
  bool positive = true;
  bool nonincreasing = true;
  bool singular_at_zero = true;
  bool ok() const { return positive && nonincreasing && singular_at_zero; }
};

/// Samples g on a geometric grid in [1e-12, 1e6].
GInvariantReport check_g_invariants(const GSpec& g);

enum class KoStatus { satisfied, violated, undetermined };

struct KoResult {
  double value = 0.0;  ///< ∫_0^1 (∫_0^t g)^{-1/2} dt, +∞ when violated
  bool satisfied = false;
  KoStatus status = KoStatus::undetermined;
  double tail_estimate = 0.0;  ///< extrapolated contribution of (0, 2^-K)
};

/// Keller–Osserman integral ∫_0^1 (∫_0^t g(s)ds)^{-1/2} dt.
///
/// The outer integral is summed over dyadic segments [2^-(k+1), 2^-k] with
/// adaptive Gauss–Kronrod, and the remainder near 0 is extrapolated from the
/// ratio of the last two segment contributions. A divergent inner integral
/// contributes 0.
KoResult check_ko(const GSpec& g, double quad_tol = 1e-12);

enum class FFamily { constant, power, linear, arrhenius, table };

/// Nonnegative source f(x, s) = w(x) · φ(s), nondecreasing in s.
struct FSpec {
  FFamily family = FFamily::constant;
  double beta = 1.0;  // power
  double c = 1.0;     // linear
  double eps = 0.1;   // arrhenius
  std::vector<double> table_s;
  std::vector<double> table_f;
  /// Spatial weight w(x, y) >= w0 > 0; empty means w ≡ 1.
  std::function<double(double, double)> weight;

  static FSpec constant();
  static FSpec power(double beta);
  static FSpec linear(double c);
  static FSpec arrhenius(double eps);
  static FSpec table(std::vector<double> s, std::vector<double> f);

  void validate() const;
  /// True when f does not depend on s (the exponential transform applies).
  bool independent_of_u() const { return family == FFamily::constant; }

  /// Compares family parameters; weights compare equal only when both are unset.
  friend bool operator==(const FSpec& a, const FSpec& b);
};

/// φ(s) without the weight, s >= 0.
double eval_f_profile(const FSpec& f, double s);
/// dφ/ds, s > 0.
double eval_f_profile_derivative(const FSpec& f, double s);
double eval_weight(const FSpec& f, double x, double y);
inline double eval_f(const FSpec& f, double x, double y, double s) {
  return eval_weight(f, x, y) * eval_f_profile(f, s);
}

enum class Verdict { holds, fails, undetermined };

/// Sample points demonstrating a failed hypothesis.
struct Witness {
  double s1 = 0.0;
  double q1 = 0.0;  ///< f(s1)/s1
  double s2 = 0.0;
  double q2 = 0.0;  ///< f(s2)/s2
};

struct HypothesisCheck {
  Verdict verdict = Verdict::undetermined;
  bool analytic = false;
  std::vector<Witness> witnesses;  ///< non-empty whenever verdict == fails
};

/// Sublinearity/superlinearity hypotheses on q(s) = f(s)/s:
/// f1: f(s) >= c s, f2: q nondecreasing, f3: q nonincreasing, f4: q → 0.
struct HypothesisReport {
  HypothesisCheck f1, f2, f3, f4;
};

/// Sampled checks on a geometric grid in [1e-6, 1e6]; built-in families carry
/// analytic verdicts that override the sampled ones.
HypothesisReport classify_f(const FSpec& f, int samples = 241);

/// Function-call grammar used on the command line and in problem files:
/// `power(alpha=0.5)`, `power_shift(alpha=0.5, a0=1.0)`, `const`,
/// `power(beta=0.5)`, `linear(c=2)`, `arrhenius(eps=0.1)`.
GSpec parse_g_expr(const std::string& text);
FSpec parse_f_expr(const std::string& text);
std::string render_g_expr(const GSpec& g);
std::string render_f_expr(const FSpec& f);

std::string to_string(Verdict v);
std::string to_string(KoStatus s);

}  // namespace gradbif
