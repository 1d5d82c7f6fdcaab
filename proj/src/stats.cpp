#include "regenlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "regenlab/special.hpp"

namespace regenlab::stats {

regvar::RegVarTail RegenerativeModel::tail() const {
  regvar::RegVarTail t;
  t.alpha = alpha;
  t.ell = ell;
  t.role = regvar::TailRole::LevyTail;
  t.validate();
  return t;
}

void ExperimentConfig::validate() const {
  if (!(scale > 0.0)) throw std::invalid_argument("config: scale (n or t) must be positive");
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (record.empty()) throw std::invalid_argument("config: no statistics to record");
  if (!poissonized && scale < 1.0)
    throw std::invalid_argument("config: fixed-n allocation needs n >= 1");
}

std::vector<long long> ReplicationTable::column(std::size_t level_index) const {
  std::vector<long long> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r.counts.at(level_index));
  return col;
}

std::vector<double> ReplicationTable::i_alpha_column() const {
  std::vector<double> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r.i_alpha);
  return col;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Index-sharded parallel loop; deterministic because all state is per-index.
void parallel_for(long long count, int threads, const std::function<void(long long)>& body) {
  threads = std::min<long long>(std::max(threads, 1), count);
  if (threads <= 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (long long i = w; i < count; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct ResolvedRegenerative {
  sub::SubordinatorSpec spec;
  double epsilon;
  double stop_tol;
};

ResolvedRegenerative resolve_regenerative(const RegenerativeModel& m, double scale,
                                          double freq_scale) {
  ResolvedRegenerative r{sub::SubordinatorSpec::from_tail(m.tail()), m.epsilon, m.stop_tol};
  if (r.epsilon <= 0.0) {
    if (!(freq_scale > 0.0))
      throw std::invalid_argument("config: epsilon rule needs a frequency scale");
    r.epsilon = m.kappa * freq_scale;
  }
  if (r.stop_tol <= 0.0) r.stop_tol = 1e-3 / scale;
  if (!(r.stop_tol > 0.0 && r.stop_tol < 1.0))
    throw std::invalid_argument("config: resolved stop_tol outside (0,1)");
  return r;
}

} // namespace

ReplicationTable run_replications(const ExperimentConfig& config) {
  config.validate();
  ReplicationTable table;
  for (const auto& g : config.record)
    table.levels.push_back(regvar::growth_eval(g, config.scale));
  table.rows.resize(static_cast<std::size_t>(config.replications));
  const int threads = resolve_threads(config.threads);

  if (std::holds_alternative<RegenerativeModel>(config.model)) {
    const auto& model = std::get<RegenerativeModel>(config.model);
    double freq_scale = config.freq_scale;
    if (freq_scale <= 0.0) {
      long long min_level = *std::min_element(table.levels.begin(), table.levels.end());
      freq_scale = static_cast<double>(min_level) / config.scale;
    }
    auto resolved = resolve_regenerative(model, config.scale, freq_scale);
    table.epsilon_used = resolved.epsilon;
    table.stop_tol_used = resolved.stop_tol;
    table.ignored_mass = sub::ignored_mass_rate(model.tail(), resolved.epsilon);
    occ::AllocatePolicy policy{config.strict, config.overflow_budget};

    parallel_for(config.replications, threads, [&](long long i) {
      rng::RngStream stream = rng::RngStream::derive(config.master_seed,
                                                     static_cast<std::uint64_t>(i));
      rng::RngStream path_rng = stream.spawn(0);
      rng::RngStream alloc_rng = stream.spawn(1);
      auto path = sub::simulate_path(resolved.spec, resolved.epsilon, resolved.stop_tol,
                                     path_rng);
      auto freqs = sub::frequencies(path);
      auto summary = sub::exp_functional(path, model.alpha);
      occ::OccupancyCounts counts =
          config.poissonized
              ? occ::allocate_poissonized(freqs, config.scale, alloc_rng)
              : occ::allocate_fixed(freqs, static_cast<long long>(config.scale),
                                    alloc_rng, policy);
      auto profile = occ::count_profile(counts);
      if (!config.poissonized &&
          profile.balls_in_boxes() + profile.overflow !=
              static_cast<long long>(config.scale))
        throw std::logic_error("run_replications: ball conservation violated");
      ReplicationRow& row = table.rows[static_cast<std::size_t>(i)];
      row.seed = stream.seed();
      row.i_alpha = summary.exp_functional;
      row.overflow = profile.overflow;
      row.counts.reserve(table.levels.size());
      for (long long level : table.levels) row.counts.push_back(profile.at(level));
    });
    return table;
  }

  const auto& model = std::get<PowerLawModel>(config.model);
  occ::PowerLawFrequencies plf = occ::power_law_frequencies(model.beta, model.tail_tol);
  if (config.strict && plf.residual_mass * config.scale > config.overflow_budget)
    throw std::runtime_error("run_replications: expected overflow exceeds budget; "
                             "lower tail_tol or disable strict mode");
  long long min_level = *std::min_element(table.levels.begin(), table.levels.end());
  const bool tail_mode = config.poissonized && min_level >= 20;
  std::vector<double> probs;
  if (!tail_mode) {
    if (plf.k_boxes > 5'000'000)
      throw std::runtime_error("run_replications: K too large to materialize; "
                               "poissonized tail sampling requires levels >= 20");
    probs = plf.materialize();
  }
  occ::AllocatePolicy policy{config.strict, config.overflow_budget};

  parallel_for(config.replications, threads, [&](long long i) {
    rng::RngStream stream = rng::RngStream::derive(config.master_seed,
                                                   static_cast<std::uint64_t>(i));
    rng::RngStream alloc_rng = stream.spawn(1);
    ReplicationRow& row = table.rows[static_cast<std::size_t>(i)];
    row.seed = stream.seed();
    row.i_alpha = std::numeric_limits<double>::quiet_NaN();
    row.counts.reserve(table.levels.size());
    if (tail_mode) {
      auto tail = occ::poissonized_profile_tail(plf, config.scale, min_level, alloc_rng);
      row.overflow = 0;
      for (long long level : table.levels) row.counts.push_back(tail.at(level));
    } else {
      occ::OccupancyCounts counts =
          config.poissonized
              ? occ::allocate_poissonized(probs, plf.residual_mass, config.scale, alloc_rng)
              : occ::allocate_fixed(probs, plf.residual_mass,
                                    static_cast<long long>(config.scale), alloc_rng, policy);
      auto profile = occ::count_profile(counts);
      row.overflow = profile.overflow;
      for (long long level : table.levels) row.counts.push_back(profile.at(level));
    }
  });
  return table;
}

std::vector<long long> mixed_poisson_reference(double alpha, double u,
                                               std::span<const double> i_alpha_samples,
                                               rng::RngStream& rng) {
  if (!(u > 0.0)) throw std::domain_error("mixed_poisson_reference: u must be positive");
  if (i_alpha_samples.empty())
    throw std::invalid_argument("mixed_poisson_reference: empty sample list");
  const double factor = std::pow(u, -alpha - 1.0);
  std::vector<long long> out;
  out.reserve(i_alpha_samples.size());
  for (double i_alpha : i_alpha_samples) {
    if (!(i_alpha > 0.0))
      throw std::domain_error("mixed_poisson_reference: I_alpha samples must be positive");
    out.push_back(rng.poisson(factor * i_alpha));
  }
  return out;
}

namespace {

struct BinnedPair {
  std::vector<double> oa, ob; // observed per bin
};

// Pool both samples over the integer support and merge adjacent values until
// every expected cell count reaches 5 on both sides.
BinnedPair pooled_quantile_bins(std::span<const long long> a, std::span<const long long> b) {
  std::map<long long, std::pair<long long, long long>> hist;
  for (long long v : a) ++hist[v].first;
  for (long long v : b) ++hist[v].second;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  // expected_a = bin_total * na/n >= 5 and likewise for b.
  const double needed = 5.0 * n / std::min(na, nb);
  BinnedPair bins;
  long long cur_a = 0, cur_b = 0;
  for (const auto& [value, counts] : hist) {
    (void)value;
    cur_a += counts.first;
    cur_b += counts.second;
    if (static_cast<double>(cur_a + cur_b) >= needed) {
      bins.oa.push_back(static_cast<double>(cur_a));
      bins.ob.push_back(static_cast<double>(cur_b));
      cur_a = cur_b = 0;
    }
  }
  if (cur_a + cur_b > 0) {
    if (!bins.oa.empty()) {
      bins.oa.back() += static_cast<double>(cur_a);
      bins.ob.back() += static_cast<double>(cur_b);
    } else {
      bins.oa.push_back(static_cast<double>(cur_a));
      bins.ob.push_back(static_cast<double>(cur_b));
    }
  }
  return bins;
}

} // namespace

TestReport two_sample_test(std::span<const long long> a, std::span<const long long> b) {
  if (a.size() < 200 || b.size() < 200)
    throw std::invalid_argument("two_sample_test: both samples must have size >= 200");
  TestReport report;
  report.name = "chi-square-two-sample";
  BinnedPair bins = pooled_quantile_bins(a, b);
  const std::size_t k = bins.oa.size();
  report.diagnostics["bins"] = static_cast<double>(k);
  report.diagnostics["n_a"] = static_cast<double>(a.size());
  report.diagnostics["n_b"] = static_cast<double>(b.size());
  if (k < 2) {
    report.statistic = 0.0;
    report.p_value = 1.0;
    report.pass = true;
    report.diagnostics["degenerate"] = 1.0;
    return report;
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double tot = bins.oa[i] + bins.ob[i];
    double ea = tot * na / (na + nb);
    double eb = tot * nb / (na + nb);
    stat += (bins.oa[i] - ea) * (bins.oa[i] - ea) / ea;
    stat += (bins.ob[i] - eb) * (bins.ob[i] - eb) / eb;
  }
  report.statistic = stat;
  report.p_value = special::chi_square_sf(stat, static_cast<double>(k - 1));
  report.pass = report.p_value > 0.01;
  return report;
}

TestReport dispersion_test(std::span<const long long> samples) {
  if (samples.size() < 500)
    throw std::invalid_argument("dispersion_test: sample size must be >= 500");
  TestReport report;
  report.name = "dispersion-index";
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (long long v : samples) mean += static_cast<double>(v);
  mean /= n;
  if (mean == 0.0) {
    report.statistic = std::numeric_limits<double>::quiet_NaN();
    report.p_value = std::numeric_limits<double>::quiet_NaN();
    report.pass = false;
    report.diagnostics["undefined-dispersion"] = 1.0;
    return report;
  }
  double ss = 0.0;
  for (long long v : samples) {
    double d = static_cast<double>(v) - mean;
    ss += d * d;
  }
  double var = ss / (n - 1.0);
  double dispersion = var / mean;
  // (n-1) D ~ chi2_{n-1} under Poisson; normal approximation of the tail.
  double z = (dispersion - 1.0) * std::sqrt((n - 1.0) / 2.0);
  report.statistic = dispersion;
  report.p_value = 2.0 * (1.0 - special::normal_cdf(std::fabs(z)));
  report.pass = report.p_value > 0.01;
  report.diagnostics["mean"] = mean;
  report.diagnostics["variance"] = var;
  report.diagnostics["z"] = z;
  return report;
}

namespace {

double gamma_one_minus(double alpha) { return std::tgamma(1.0 - alpha); }

double report_freq_scale(const ConvergenceSpec& spec) {
  const double scale_max = spec.grid.back();
  switch (spec.target) {
    case ReportTarget::ThmMain2:
    case ReportTarget::ThmMain3:
    case ReportTarget::ToZero: {
      long long level = regvar::growth_eval(spec.growth, scale_max);
      return static_cast<double>(level) / scale_max;
    }
    case ReportTarget::LlnKn:
    case ReportTarget::LlnKnr:
      // K_n counts every occupied box; resolving frequencies well below 1/t
      // keeps the missing-box deficit under ~1% (see module notes).
      return 1e-2 / scale_max;
    case ReportTarget::RhoPathwise:
      return *std::min_element(spec.x_grid.begin(), spec.x_grid.end());
  }
  return 1.0 / scale_max;
}

} // namespace

RatioReport convergence_report(const ConvergenceSpec& spec, std::uint64_t master_seed,
                               std::uint64_t path_index) {
  if (spec.grid.empty()) throw std::invalid_argument("convergence_report: empty grid");
  if (!std::is_sorted(spec.grid.begin(), spec.grid.end()))
    throw std::invalid_argument("convergence_report: grid must be ascending");
  const double alpha = spec.model.alpha;
  auto resolved = resolve_regenerative(spec.model, spec.grid.back(),
                                       report_freq_scale(spec));
  rng::RngStream stream = rng::RngStream::derive(master_seed, path_index);
  rng::RngStream path_rng = stream.spawn(0);
  auto path = sub::simulate_path(resolved.spec, resolved.epsilon, resolved.stop_tol,
                                 path_rng);
  auto freqs = sub::frequencies(path);
  auto summary = sub::exp_functional(path, alpha);
  const double i_alpha = summary.exp_functional;

  RatioReport report;
  report.i_alpha = i_alpha;
  report.seed = stream.seed();

  if (spec.target == ReportTarget::RhoPathwise) {
    for (double x : spec.x_grid) {
      double stat = static_cast<double>(sub::rho(freqs, x)) * std::pow(x, alpha) /
                    spec.model.ell(1.0 / x);
      report.rows.push_back({x, "rho", stat, i_alpha, stat / i_alpha, ""});
    }
    return report;
  }

  for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
    const double scale = spec.grid[gi];
    rng::RngStream alloc_rng = stream.spawn(10 + gi);
    std::string flag;
    if (freqs.residual_mass * scale > spec.overflow_budget) flag = "overflow-budget";
    occ::OccupancyCounts counts =
        spec.poissonized
            ? occ::allocate_poissonized(freqs, scale, alloc_rng)
            : occ::allocate_fixed(freqs, static_cast<long long>(scale), alloc_rng,
                                  occ::AllocatePolicy{false, spec.overflow_budget});
    auto profile = occ::count_profile(counts);
    const double norm = gamma_one_minus(alpha) * std::pow(scale, alpha) *
                        spec.model.ell(scale);

    switch (spec.target) {
      case ReportTarget::ThmMain2: {
        long long w = regvar::growth_eval(spec.growth, scale);
        double denom = std::pow(scale, alpha) * spec.model.ell(scale / w);
        double stat = std::pow(static_cast<double>(w), alpha + 1.0) *
                      static_cast<double>(profile.at(w)) / denom;
        double target = alpha * i_alpha;
        report.rows.push_back({scale, "w=" + std::to_string(w), stat, target,
                               stat / target, flag});
        break;
      }
      case ReportTarget::ThmMain3: {
        long long qv = regvar::growth_eval(spec.growth, scale);
        double denom = std::pow(scale, alpha) * spec.model.ell(scale / qv);
        double stat = std::pow(static_cast<double>(qv), alpha) *
                      static_cast<double>(profile.at_least(qv)) / denom;
        report.rows.push_back({scale, "q=" + std::to_string(qv), stat, i_alpha,
                               stat / i_alpha, flag});
        break;
      }
      case ReportTarget::LlnKn: {
        double stat = static_cast<double>(profile.total_occupied) / norm;
        report.rows.push_back({scale, "kn", stat, i_alpha, stat / i_alpha, flag});
        break;
      }
      case ReportTarget::LlnKnr: {
        double stat = static_cast<double>(profile.total_occupied) / norm;
        report.rows.push_back({scale, "kn", stat, i_alpha, stat / i_alpha, flag});
        for (long long r : spec.fixed_r) {
          double c_r = regvar::small_count_constant(alpha, r);
          double target = c_r * i_alpha;
          double s = static_cast<double>(profile.at(r)) / norm;
          report.rows.push_back({scale, "r=" + std::to_string(r), s, target,
                                 s / target, flag});
        }
        break;
      }
      case ReportTarget::ToZero: {
        long long qv = regvar::growth_eval(spec.growth, scale);
        double indicator = profile.at(qv) == 0 ? 1.0 : 0.0;
        report.rows.push_back({scale, "q=" + std::to_string(qv), indicator, 1.0,
                               indicator, flag});
        break;
      }
      default:
        break;
    }
  }
  return report;
}

void parallel_for_indexed(long long count, int threads,
                          const std::function<void(long long)>& body) {
  parallel_for(count, resolve_threads(threads), body);
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
  double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / (static_cast<double>(xs.size()) - 1.0);
}

double correlation_of(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("correlation_of: size mismatch");
  double mx = mean_of(xs), my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

} // namespace regenlab::stats
