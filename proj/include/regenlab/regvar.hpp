#pragma once

#include <string>

namespace regenlab::regvar {

/// Slowly varying factor: a constant c, or (offset + ln x)^p.  Evaluation
/// clamps the argument to [1, inf) so tails stay defined on all of (0, inf).
struct SlowlyVarying {
  enum class Kind { Constant, LogPower };
  Kind kind = Kind::Constant;
  double c = 1.0;      // Constant
  double p = 0.0;      // LogPower exponent
  double offset = 1.0; // LogPower offset, >= 1

  static SlowlyVarying constant(double c);
  static SlowlyVarying log_power(double p, double offset = 1.0);

  double operator()(double x) const;
  double log_at(double x) const;
  bool is_constant() const { return kind == Kind::Constant; }

  /// Parse "const:c" or "logpow:p[,offset]".
  static SlowlyVarying parse(const std::string& text);
  std::string to_string() const;
};

enum class TailRole { LevyTail, CountingFunction };

/// Regularly varying tail y -> y^{-alpha} ell(1/y), alpha in (0, 1].
struct RegVarTail {
  double alpha = 0.5;
  SlowlyVarying ell;
  TailRole role = TailRole::LevyTail;

  static RegVarTail stable(double alpha); // ell == 1/Gamma(1-alpha)
  void validate() const;
};

/// nu([y, inf)) for a Levy tail; domain error for y <= 0.
double levy_tail(const RegVarTail& tail, double y);

/// Moderate-part threshold: the r in [1, t] with
/// alpha t^alpha ell(t/r) / r^{alpha+1} = 1, located by bisection to a
/// residual of 1e-12.  Throws if no sign change exists on [1, t].
double solve_threshold(double alpha, const SlowlyVarying& ell, double t);

/// The naive candidate (alpha ell(t))^{1/(alpha+1)} t^{alpha/(alpha+1)}:
/// same index of regular variation, possibly a different slowly varying
/// factor.  Reported for comparison; solve_threshold is authoritative.
double naive_threshold(double alpha, const SlowlyVarying& ell, double t);

/// c_r = alpha Gamma(r - alpha) / (Gamma(1 - alpha) Gamma(r + 1)), the
/// small-count limit constant; computed in log-gamma space.
double small_count_constant(double alpha, long long r);

/// Integer-valued growth function q(t) = floor(raw(t)).
struct GrowthFunction {
  enum class Kind { Power, PowerLog, ThresholdR, Constant };
  Kind kind = Kind::Power;
  double theta = 0.5; // Power / PowerLog
  double p = 0.0;     // PowerLog
  double coef = 1.0;  // Power / PowerLog multiplier
  double value = 1.0; // Constant
  double alpha = 0.5; // ThresholdR
  SlowlyVarying ell;  // ThresholdR

  static GrowthFunction power(double theta, double coef = 1.0);
  static GrowthFunction power_log(double theta, double p);
  static GrowthFunction threshold_r(double alpha, const SlowlyVarying& ell);
  static GrowthFunction constant(double value);

  double raw(double t) const;

  /// Parse "pow:theta", "powlog:theta,p", "const:c".  ("r-star" is resolved
  /// by the caller, which knows the model's tail.)
  static GrowthFunction parse(const std::string& text);
  std::string to_string() const;
};

/// floor(g(t)), >= 1; domain error if g(t) < 1.
long long growth_eval(const GrowthFunction& g, double t);

} // namespace regenlab::regvar
