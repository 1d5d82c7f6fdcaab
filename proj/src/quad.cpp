#include "regenlab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regenlab::quad {

namespace {

struct SimpsonCtx {
  const std::function<double(double)>& f;
  double rel_tol;
  double abs_floor;
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const SimpsonCtx& ctx, double a, double b, double fa, double fm,
             double fb, double whole, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = ctx.f(lm);
  double frm = ctx.f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = left + right - whole;
  double scale = std::max(std::fabs(left + right), ctx.abs_floor);
  if (depth <= 0 || std::fabs(err) <= 15.0 * std::max(ctx.rel_tol * scale, 1e-308)) {
    return left + right + err / 15.0;
  }
  return adapt(ctx, a, m, fa, flm, fm, left, depth - 1) +
         adapt(ctx, m, b, fm, frm, fb, right, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_floor) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson(fa, fm, fb, b - a);
  SimpsonCtx ctx{f, rel_tol, abs_floor};
  return adapt(ctx, a, b, fa, fm, fb, whole, 48);
}

double integrate_exp_tail(const std::function<double(double)>& f, double a,
                          double decay_rate, double rel_tol) {
  if (!(decay_rate > 0.0)) throw std::invalid_argument("integrate_exp_tail: rate <= 0");
  const double span = 46.0 / decay_rate; // exp(-46) ~ 1e-20
  // Geometric chunks resolve the fast variation near a.
  double total = 0.0;
  double lo = a;
  double step = std::min(span, 1.0 / decay_rate);
  while (lo < a + span) {
    double hi = std::min(lo + step, a + span);
    total += adaptive_simpson(f, lo, hi, rel_tol, std::fabs(total) * rel_tol);
    lo = hi;
    step *= 2.0;
  }
  return total;
}

double integrate_log_peak(const std::function<double(double)>& log_f, double lo,
                          double hi, double center, double width, double rel_tol) {
  if (!(hi > lo)) throw std::invalid_argument("integrate_log_peak: empty window");
  auto f = [&](double x) {
    double l = log_f(x);
    return l < -745.0 ? 0.0 : std::exp(l);
  };
  double c0 = std::clamp(center - 30.0 * width, lo, hi);
  double c1 = std::clamp(center + 30.0 * width, lo, hi);
  double total = 0.0;
  if (c0 > lo) total += adaptive_simpson(f, lo, c0, rel_tol);
  if (c1 > c0) total += adaptive_simpson(f, c0, c1, rel_tol);
  if (hi > c1) total += adaptive_simpson(f, c1, hi, rel_tol);
  return total;
}

} // namespace regenlab::quad
