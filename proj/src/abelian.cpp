#include "regenlab/abelian.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "regenlab/quad.hpp"
#include "regenlab/special.hpp"

namespace regenlab::abelian {

namespace {

constexpr double kTailBudget = 1e-6;
constexpr double kMaxUpperEdge = 50.0;

double require_q(const AbelianCase& c, double t) {
  long long q = regvar::growth_eval(c.q, t);
  if (q < 2) throw std::domain_error("abelian: need q(t) >= 2");
  if (static_cast<double>(q) > 0.5 * t)
    throw std::domain_error("abelian: q(t)/t must be small (class Q)");
  return static_cast<double>(q);
}

// ln of ell(t/(q z)) / ell(t/q); the slowly varying drift across the window.
double log_ell_ratio(const regvar::SlowlyVarying& ell, double t, double q, double z) {
  return ell.log_at(t / (q * z)) - ell.log_at(t / q);
}

// int_0^a ell(t/(q z)) / ell(t/q) dz, used by the paper-style lower bound.
double ell_ratio_mass(const regvar::SlowlyVarying& ell, double t, double q, double a) {
  if (ell.is_constant()) return a;
  auto f = [&](double v) {
    double z = a * std::exp(-v);
    return a * std::exp(-v + log_ell_ratio(ell, t, q, z));
  };
  return quad::adaptive_simpson(f, 0.0, 46.0, 1e-9);
}

struct Window {
  double lo, hi;
  double main = 0.0;
  double tail_lo = 0.0, tail_hi = 0.0;
};

// Karamata family: integrand exp(q ln q - lgamma(q) + m ln z - q z) * Lam(z),
// m = q - 1 - beta, normalized so that the claimed equivalent equals 1.
Window karamata_window(const AbelianCase& c, double t, double q, double beta) {
  const double m = q - 1.0 - beta;
  if (m <= 0.0) throw std::domain_error("abelian: q(t) too small for this beta");
  const double log_c = q * std::log(q) - special::log_gamma(q);
  auto log_f = [&](double z) {
    return log_c + m * std::log(z) - q * z + log_ell_ratio(c.ell, t, q, z);
  };
  const double center = m / q;
  const double width = std::sqrt(m) / q;

  Window w{0.2, 5.0};
  for (int pass = 0; pass < 200; ++pass) {
    w.main = quad::integrate_log_peak(log_f, w.lo, w.hi, center, width);

    // Lower tail: z^m e^{-qz} increases on (0, a] when a <= m/q, so
    // T1 <= C a^m e^{-qa} int_0^a Lam.
    if (w.lo <= center) {
      double lg = log_c + m * std::log(w.lo) - q * w.lo;
      w.tail_lo = std::exp(lg) * ell_ratio_mass(c.ell, t, q, w.lo);
    } else {
      w.tail_lo = 1.05 * quad::integrate_log_peak(log_f, w.lo * 1e-6, w.lo, center, width);
    }

    // Upper tail: (1 + v/A)^m <= exp(m v / A) gives
    // T3 <= Lam_sup C A^m e^{-qA} / (q - m/A), valid for q > m/A.
    double lam_sup = 1.0;
    if (!c.ell.is_constant()) {
      double at_edge = std::exp(log_ell_ratio(c.ell, t, q, w.hi));
      double at_inf = std::exp(c.ell.log_at(1.0) - c.ell.log_at(t / q));
      lam_sup = std::max(at_edge, at_inf);
    }
    double denom = q - m / w.hi;
    if (denom > 0.0) {
      double lg = log_c + m * std::log(w.hi) - q * w.hi;
      w.tail_hi = lam_sup * std::exp(lg) / denom;
    } else {
      w.tail_hi = 1.05 * quad::integrate_log_peak(log_f, w.hi, w.hi + 200.0 / q, center, width);
    }

    double budget = kTailBudget * w.main;
    if (w.tail_lo + w.tail_hi <= budget) break;
    if (w.tail_lo > 0.5 * budget) w.lo *= 0.5;
    if (w.tail_hi > 0.5 * budget) {
      w.hi *= 1.3;
      if (w.hi > kMaxUpperEdge)
        throw std::runtime_error("abelian: upper window edge exceeded 50");
    }
  }
  return w;
}

struct LsIntegrator {
  // ln U and ln |U'| for U(x) = x^{sign*gamma} ell(1/x) with the slowly
  // varying factor clamped at x = 1.
  double gamma;
  int sign; // -1 decreasing, +1 increasing
  regvar::SlowlyVarying ell;

  double log_u(double x) const {
    double lx = std::log(x);
    return sign * gamma * lx + ell.log_at(1.0 / x);
  }
  double log_abs_du(double x) const {
    double lx = std::log(x);
    if (ell.is_constant())
      return std::log(gamma) + std::log(ell.c) + (sign * gamma - 1.0) * lx;
    if (x >= 1.0)
      return std::log(gamma) + ell.p * std::log(ell.offset) + (sign * gamma - 1.0) * lx;
    double big_l = ell.offset - lx;
    double bracket = gamma * big_l - sign * ell.p;
    if (!(bracket > 0.0))
      throw std::domain_error("abelian: integrator not monotone for these parameters");
    return (sign * gamma - 1.0) * lx + (ell.p - 1.0) * std::log(big_l) + std::log(bracket);
  }
};

// Roots of y e^{-y} = 1/4 bracketing the saddle (paper window).
double ye_root(double lo, double hi) {
  auto f = [](double y) { return y * std::exp(-y) - 0.25; };
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Window laplace_stieltjes_window(const AbelianCase& c, double t, double q) {
  const int sign = c.lemma == Lemma::LaplaceStieltjesInc ? 1 : -1;
  if (!(c.gamma > 0.0)) throw std::domain_error("abelian: gamma must be positive");
  if (!c.ell.is_constant() && c.gamma * c.ell.offset < std::fabs(c.ell.p))
    throw std::domain_error("abelian: unsupported integrator (need gamma*offset >= |p| "
                            "for monotone U)");
  LsIntegrator u{c.gamma, sign, c.ell};
  const double m = q + sign * c.gamma - 1.0;
  if (m <= 1.0) throw std::domain_error("abelian: q(t) too small for this gamma");

  const double log_coef = (q + 1.0) * std::log(q) - special::log_gamma(q + 1.0) -
                          std::log(t) - std::log(c.gamma) - u.log_u(q / t) + std::log(q);
  auto log_f = [&](double y) {
    return log_coef + q * (std::log(y) - y) + u.log_abs_du(q * y / t);
  };
  const double center = m / q;
  const double width = std::sqrt(std::max(m, 1.0)) / q;

  static const double y1 = ye_root(0.01, 1.0);
  static const double y2 = ye_root(1.0, 10.0);
  Window w{0.5 * y1, 2.0 * y2};

  auto decay_rate_after = [&](double y) {
    // Conservative exponential decay rate of the integrand beyond y.
    double h = 0.02 * y;
    double d1 = (log_f(y + h) - log_f(y)) / h;
    double d2 = (log_f(y + 3.0 * h) - log_f(y + 2.0 * h)) / h;
    return -std::max(d1, d2) * 0.9;
  };
  auto increasing_before = [&](double y) {
    double prev = log_f(y * 0.2);
    for (double k : {0.4, 0.6, 0.8, 1.0}) {
      double cur = log_f(y * k);
      if (cur < prev) return false;
      prev = cur;
    }
    return true;
  };

  for (int pass = 0; pass < 200; ++pass) {
    w.main = quad::integrate_log_peak(log_f, w.lo, w.hi, center, width);

    if (increasing_before(w.lo)) {
      w.tail_lo = 1.5 * w.lo * std::exp(log_f(w.lo));
    } else {
      w.tail_lo = 1.05 * quad::integrate_log_peak(log_f, w.lo * 1e-6, w.lo, center, width);
    }
    double lambda = decay_rate_after(w.hi);
    if (lambda > 0.0) {
      w.tail_hi = 1.5 * std::exp(log_f(w.hi)) / lambda;
    } else {
      w.tail_hi = 1.05 * quad::integrate_log_peak(log_f, w.hi, w.hi + 200.0 / q, center, width);
    }

    double budget = kTailBudget * w.main;
    if (w.tail_lo + w.tail_hi <= budget) break;
    if (w.tail_lo > 0.5 * budget) w.lo *= 0.5;
    if (w.tail_hi > 0.5 * budget) {
      w.hi *= 1.3;
      if (w.hi > kMaxUpperEdge)
        throw std::runtime_error("abelian: upper window edge exceeded 50");
    }
  }
  return w;
}

RatioResult from_window(const Window& w, long long q) {
  RatioResult r;
  r.ratio = w.main;
  r.tail_bound = (w.tail_lo + w.tail_hi) / w.main;
  r.window_lo = w.lo;
  r.window_hi = w.hi;
  r.q_t = q;
  return r;
}

} // namespace

std::string lemma_name(Lemma lemma) {
  switch (lemma) {
    case Lemma::Karamata: return "karamata";
    case Lemma::KaramataRegVar: return "karamata-regvar";
    case Lemma::LaplaceStieltjesDec: return "laplace-stieltjes-dec";
    case Lemma::LaplaceStieltjesInc: return "laplace-stieltjes-inc";
  }
  return "?";
}

Lemma parse_lemma(const std::string& name) {
  if (name == "karamata") return Lemma::Karamata;
  if (name == "karamata-regvar") return Lemma::KaramataRegVar;
  if (name == "laplace-stieltjes-dec" || name == "ls-dec") return Lemma::LaplaceStieltjesDec;
  if (name == "laplace-stieltjes-inc" || name == "ls-inc") return Lemma::LaplaceStieltjesInc;
  throw std::invalid_argument("unknown lemma '" + name + "'");
}

RatioResult karamata_ratio(const AbelianCase& c, double t) {
  double q = require_q(c, t);
  return from_window(karamata_window(c, t, q, 0.0), static_cast<long long>(q));
}

RatioResult karamata_regvar_ratio(const AbelianCase& c, double t) {
  double q = require_q(c, t);
  return from_window(karamata_window(c, t, q, c.beta), static_cast<long long>(q));
}

RatioResult laplace_stieltjes_ratio(const AbelianCase& c, double t) {
  double q = require_q(c, t);
  return from_window(laplace_stieltjes_window(c, t, q), static_cast<long long>(q));
}

RatioResult evaluate(const AbelianCase& c, double t) {
  switch (c.lemma) {
    case Lemma::Karamata: return karamata_ratio(c, t);
    case Lemma::KaramataRegVar: return karamata_regvar_ratio(c, t);
    default: return laplace_stieltjes_ratio(c, t);
  }
}

std::vector<ReportRow> report(const AbelianCase& c) {
  std::vector<ReportRow> rows;
  for (double t : c.t_grid) {
    RatioResult r = evaluate(c, t);
    rows.push_back({lemma_name(c.lemma), t, r.q_t, r.ratio, r.tail_bound});
  }
  return rows;
}

} // namespace regenlab::abelian
