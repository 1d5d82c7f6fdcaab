#include "regenlab/regvar.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace regenlab::regvar {

SlowlyVarying SlowlyVarying::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::domain_error("SlowlyVarying: constant must be positive and finite");
  SlowlyVarying s;
  s.kind = Kind::Constant;
  s.c = c;
  return s;
}

SlowlyVarying SlowlyVarying::log_power(double p, double offset) {
  if (!(offset >= 1.0)) throw std::domain_error("SlowlyVarying: offset must be >= 1");
  if (!std::isfinite(p)) throw std::domain_error("SlowlyVarying: p must be finite");
  SlowlyVarying s;
  s.kind = Kind::LogPower;
  s.p = p;
  s.offset = offset;
  return s;
}

double SlowlyVarying::operator()(double x) const {
  if (kind == Kind::Constant) return c;
  double lx = x > 1.0 ? std::log(x) : 0.0;
  return std::pow(offset + lx, p);
}

double SlowlyVarying::log_at(double x) const {
  if (kind == Kind::Constant) return std::log(c);
  double lx = x > 1.0 ? std::log(x) : 0.0;
  return p * std::log(offset + lx);
}

SlowlyVarying SlowlyVarying::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "const") {
    return constant(std::stod(args));
  }
  if (head == "logpow") {
    auto comma = args.find(',');
    double p = std::stod(args.substr(0, comma));
    double offset = comma == std::string::npos ? 1.0 : std::stod(args.substr(comma + 1));
    return log_power(p, offset);
  }
  throw std::invalid_argument("SlowlyVarying: expected const:c or logpow:p[,offset], got '" +
                              text + "'");
}

std::string SlowlyVarying::to_string() const {
  char buf[64];
  if (kind == Kind::Constant) {
    std::snprintf(buf, sizeof(buf), "const:%.17g", c);
  } else {
    std::snprintf(buf, sizeof(buf), "logpow:%.17g,%.17g", p, offset);
  }
  return buf;
}

RegVarTail RegVarTail::stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("stable tail: alpha must be in (0,1)");
  RegVarTail t;
  t.alpha = alpha;
  t.ell = SlowlyVarying::constant(1.0 / std::tgamma(1.0 - alpha));
  t.role = TailRole::LevyTail;
  return t;
}

void RegVarTail::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("RegVarTail: alpha must be in (0,1]");
}

double levy_tail(const RegVarTail& tail, double y) {
  tail.validate();
  if (!(y > 0.0)) throw std::domain_error("levy_tail: y must be positive");
  return std::pow(y, -tail.alpha) * tail.ell(1.0 / y);
}

namespace {

double threshold_lhs(double alpha, const SlowlyVarying& ell, double t, double r) {
  // alpha t^alpha ell(t/r) / r^{alpha+1}, evaluated in logs.
  double lg = std::log(alpha) + alpha * std::log(t) + ell.log_at(t / r) -
              (alpha + 1.0) * std::log(r);
  return std::exp(lg);
}

} // namespace

double solve_threshold(double alpha, const SlowlyVarying& ell, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("solve_threshold: alpha must be in (0,1]");
  if (!(t > 1.0)) throw std::domain_error("solve_threshold: t must exceed 1");
  double lo = 1.0, hi = t;
  double flo = threshold_lhs(alpha, ell, t, lo);
  double fhi = threshold_lhs(alpha, ell, t, hi);
  if ((flo - 1.0) * (fhi - 1.0) > 0.0)
    throw std::runtime_error("solve_threshold: no sign change on [1, t]; t too small");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = threshold_lhs(alpha, ell, t, mid);
    if ((fmid - 1.0) * (flo - 1.0) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  double r = 0.5 * (lo + hi);
  if (std::fabs(threshold_lhs(alpha, ell, t, r) - 1.0) > 1e-12)
    throw std::runtime_error("solve_threshold: residual above tolerance");
  return r;
}

double naive_threshold(double alpha, const SlowlyVarying& ell, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("naive_threshold: alpha must be in (0,1]");
  return std::pow(alpha * ell(t), 1.0 / (alpha + 1.0)) *
         std::pow(t, alpha / (alpha + 1.0));
}

double small_count_constant(double alpha, long long r) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("small_count_constant: alpha must be in (0,1)");
  if (r < 1) throw std::domain_error("small_count_constant: r must be >= 1");
  double rr = static_cast<double>(r);
  double lg = std::log(alpha) + std::lgamma(rr - alpha) - std::lgamma(1.0 - alpha) -
              std::lgamma(rr + 1.0);
  return std::exp(lg);
}

GrowthFunction GrowthFunction::power(double theta, double coef) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("GrowthFunction: power exponent must be in (0,1)");
  if (!(coef > 0.0)) throw std::domain_error("GrowthFunction: coef must be positive");
  GrowthFunction g;
  g.kind = Kind::Power;
  g.theta = theta;
  g.coef = coef;
  return g;
}

GrowthFunction GrowthFunction::power_log(double theta, double p) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("GrowthFunction: power exponent must be in (0,1)");
  GrowthFunction g;
  g.kind = Kind::PowerLog;
  g.theta = theta;
  g.p = p;
  return g;
}

GrowthFunction GrowthFunction::threshold_r(double alpha, const SlowlyVarying& ell) {
  GrowthFunction g;
  g.kind = Kind::ThresholdR;
  g.alpha = alpha;
  g.ell = ell;
  return g;
}

GrowthFunction GrowthFunction::constant(double value) {
  if (!(value >= 1.0)) throw std::domain_error("GrowthFunction: constant must be >= 1");
  GrowthFunction g;
  g.kind = Kind::Constant;
  g.value = value;
  return g;
}

double GrowthFunction::raw(double t) const {
  switch (kind) {
    case Kind::Power:
      return coef * std::pow(t, theta);
    case Kind::PowerLog:
      return coef * std::pow(t, theta) * std::pow(std::log(t), p);
    case Kind::ThresholdR:
      return solve_threshold(alpha, ell, t);
    case Kind::Constant:
      return value;
  }
  return 0.0;
}

GrowthFunction GrowthFunction::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "pow") {
    auto comma = args.find(',');
    if (comma == std::string::npos) return power(std::stod(args));
    return power(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
  }
  if (head == "powlog") {
    auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("GrowthFunction: powlog needs theta,p");
    return power_log(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
  }
  if (head == "const") return constant(std::stod(args));
  throw std::invalid_argument("GrowthFunction: expected pow:, powlog:, or const:, got '" +
                              text + "'");
}

std::string GrowthFunction::to_string() const {
  char buf[96];
  switch (kind) {
    case Kind::Power:
      if (coef == 1.0)
        std::snprintf(buf, sizeof(buf), "pow:%.17g", theta);
      else
        std::snprintf(buf, sizeof(buf), "pow:%.17g,%.17g", theta, coef);
      break;
    case Kind::PowerLog:
      std::snprintf(buf, sizeof(buf), "powlog:%.17g,%.17g", theta, p);
      break;
    case Kind::ThresholdR:
      std::snprintf(buf, sizeof(buf), "r-star(alpha=%.17g)", alpha);
      break;
    case Kind::Constant:
      std::snprintf(buf, sizeof(buf), "const:%.17g", value);
      break;
  }
  return buf;
}

long long growth_eval(const GrowthFunction& g, double t) {
  if (!(t >= 1.0)) throw std::domain_error("growth_eval: t must be >= 1");
  double v = std::floor(g.raw(t));
  if (!(v >= 1.0)) throw std::domain_error("growth_eval: g(t) < 1 for this t");
  return static_cast<long long>(v);
}

} // namespace regenlab::regvar
