#include "regenlab/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "regenlab/quad.hpp"

namespace regenlab::sub {

SubordinatorSpec SubordinatorSpec::stable(double alpha) {
  return SubordinatorSpec{regvar::RegVarTail::stable(alpha)};
}

SubordinatorSpec SubordinatorSpec::from_tail(const regvar::RegVarTail& tail) {
  tail.validate();
  if (tail.role != regvar::TailRole::LevyTail)
    throw std::invalid_argument("SubordinatorSpec: tail role must be levy-tail");
  if (tail.ell.kind == regvar::SlowlyVarying::Kind::LogPower &&
      tail.alpha * tail.ell.offset + tail.ell.p < 0.0)
    throw std::invalid_argument(
        "SubordinatorSpec: tail not monotone (need alpha*offset + p >= 0)");
  return SubordinatorSpec{tail};
}

double SubordinatorSpec::tail_value(double y) const { return regvar::levy_tail(tail, y); }

double SubordinatorSpec::inverse_tail(double level) const {
  if (!(level > 0.0) || !std::isfinite(level))
    throw std::domain_error("inverse_tail: level must be positive and finite");
  if (tail.ell.is_constant()) {
    return std::pow(tail.ell.c / level, 1.0 / tail.alpha);
  }
  // Bracket then bisect on log y; the tail is strictly decreasing.
  double guess = std::pow(tail.ell(1.0) / level, 1.0 / tail.alpha);
  double lo = guess, hi = guess;
  while (tail_value(lo) < level) lo *= 0.5;
  while (tail_value(hi) > level) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    double mid = std::sqrt(lo * hi);
    (tail_value(mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SubordinatorPath SubordinatorPath::from_jumps(std::vector<double> epochs,
                                              std::vector<double> jumps,
                                              double epsilon,
                                              const regvar::RegVarTail& tail) {
  if (epochs.size() != jumps.size())
    throw std::invalid_argument("from_jumps: epochs/jumps size mismatch");
  SubordinatorPath p;
  p.epochs = std::move(epochs);
  p.jumps = std::move(jumps);
  p.epsilon = epsilon;
  p.tail = tail;
  p.running.reserve(p.jumps.size());
  double sum = 0.0, comp = 0.0;
  double last_epoch = 0.0;
  for (std::size_t k = 0; k < p.jumps.size(); ++k) {
    if (!(p.jumps[k] > 0.0)) throw std::invalid_argument("from_jumps: jump <= 0");
    if (!(p.epochs[k] > last_epoch)) throw std::invalid_argument("from_jumps: epochs not increasing");
    last_epoch = p.epochs[k];
    double y = p.jumps[k] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    p.running.push_back(sum);
  }
  p.stop_mass = p.running.empty() ? 1.0 : std::exp(-p.running.back());
  return p;
}

std::string SubordinatorPath::to_csv() const {
  std::string out = "k,tau_k,j_k,S_k\n";
  char line[128];
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", k + 1, epochs[k],
                  jumps[k], running[k]);
    out += line;
  }
  return out;
}

SubordinatorPath simulate_path(const SubordinatorSpec& spec, double epsilon,
                               double stop_tol, rng::RngStream& rng) {
  if (!(epsilon > 0.0))
    throw std::domain_error("simulate_path: truncation level epsilon must be > 0 "
                            "(the Levy measure is infinite at zero)");
  if (!(stop_tol > 0.0 && stop_tol < 1.0))
    throw std::domain_error("simulate_path: stop_tol must lie in (0,1)");
  const double rate = spec.tail_value(epsilon);
  if (!std::isfinite(rate) || !(rate > 0.0))
    throw std::domain_error("simulate_path: nu([eps,inf)) must be finite and positive");

  const double s_stop = -std::log(stop_tol);
  SubordinatorPath path;
  path.epsilon = epsilon;
  path.tail = spec.tail;
  const bool stable_like = spec.tail.ell.is_constant();
  const double inv_alpha = 1.0 / spec.tail.alpha;

  double tau = 0.0;
  double sum = 0.0, comp = 0.0;
  while (sum <= s_stop) {
    tau += rng.exponential() / rate;
    double u = rng.u01();
    // Survival (nu_bar(y)/nu_bar(eps)) inverted at u; for constant ell this is
    // the closed form eps * u^{-1/alpha}.
    double j = stable_like ? epsilon * std::pow(u, -inv_alpha)
                           : spec.inverse_tail(u * rate);
    double y = j - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    path.epochs.push_back(tau);
    path.jumps.push_back(j);
    path.running.push_back(sum);
  }
  path.stop_mass = std::exp(-path.running.back());
  return path;
}

FrequencyVector frequencies(const SubordinatorPath& path) {
  if (path.size() == 0) throw std::invalid_argument("frequencies: empty path");
  FrequencyVector f;
  f.probs.reserve(path.size());
  double prev_s = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    // exp(-S_{k-1}) - exp(-S_k) without cancellation for tiny jumps.
    double p = std::exp(-prev_s) * (-std::expm1(-path.jumps[k]));
    f.probs.push_back(p);
    prev_s = path.running[k];
  }
  f.residual_mass = path.stop_mass;
  f.sorted_desc = f.probs;
  std::sort(f.sorted_desc.begin(), f.sorted_desc.end(), std::greater<double>());
  return f;
}

long long rho(const FrequencyVector& freqs, double x) {
  if (!(x > 0.0)) throw std::domain_error("rho: x must be positive");
  const auto& d = freqs.sorted_desc;
  auto it = std::lower_bound(d.begin(), d.end(), x,
                             [](double elem, double value) { return elem >= value; });
  return static_cast<long long>(it - d.begin());
}

PathSummary exp_functional(const SubordinatorPath& path, double alpha) {
  if (path.size() == 0) throw std::invalid_argument("exp_functional: empty path");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("exp_functional: alpha must be in (0,1]");
  double sum = path.epochs[0], comp = 0.0; // S == 0 on [0, tau_1)
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    double term = (path.epochs[k + 1] - path.epochs[k]) * std::exp(-alpha * path.running[k]);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  PathSummary s;
  s.exp_functional = sum;
  s.n_jumps = static_cast<long long>(path.size());
  double phi = truncated_laplace_exponent(path.tail, path.epsilon, alpha);
  s.bias_bound = std::pow(path.stop_mass, alpha) / phi;
  s.ignored_mass_rate = ignored_mass_rate(path.tail, path.epsilon);
  s.truncation_bias_bound = alpha * s.ignored_mass_rate / (phi * phi);
  return s;
}

double truncated_laplace_exponent(const regvar::RegVarTail& tail, double epsilon,
                                  double s) {
  if (!(epsilon > 0.0) || !(s > 0.0))
    throw std::domain_error("truncated_laplace_exponent: need epsilon > 0, s > 0");
  // Parts: int_eps^inf (1-e^{-sy}) nu(dy)
  //      = (1-e^{-s eps}) nu_bar(eps) + s int_eps^inf e^{-sy} nu_bar(y) dy,
  // the integral via y = eps e^v so the power factor is smooth in v.
  const double nb_eps = regvar::levy_tail(tail, epsilon);
  const double v_hi = std::log(46.0 / (s * epsilon) + 1.0) + 1.0;
  auto integrand = [&](double v) {
    double y = epsilon * std::exp(v);
    return std::exp(-s * y) * regvar::levy_tail(tail, y) * y;
  };
  double integral = quad::adaptive_simpson(integrand, 0.0, v_hi, 1e-11);
  return -std::expm1(-s * epsilon) * nb_eps + s * integral;
}

double ignored_mass_rate(const regvar::RegVarTail& tail, double epsilon) {
  if (!(epsilon > 0.0)) throw std::domain_error("ignored_mass_rate: epsilon must be > 0");
  if (tail.alpha >= 1.0) return std::numeric_limits<double>::infinity();
  // int_0^eps y nu(dy) = -eps nu_bar(eps) + int_0^eps nu_bar(y) dy.
  const double v_hi = 46.0 / (1.0 - tail.alpha) + 1.0;
  auto integrand = [&](double v) {
    double y = epsilon * std::exp(-v);
    return regvar::levy_tail(tail, y) * y;
  };
  double integral = quad::adaptive_simpson(integrand, 0.0, v_hi, 1e-11);
  return integral - epsilon * regvar::levy_tail(tail, epsilon);
}

} // namespace regenlab::sub
