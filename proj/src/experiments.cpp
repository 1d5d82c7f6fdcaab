#include "regenlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "regenlab/special.hpp"

namespace regenlab::experiments {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

void add_check(CriterionResult& r, const std::string& name, bool pass,
               const std::string& detail) {
  r.checks.push_back({name, pass, detail});
}

stats::RegenerativeModel stable_model(double alpha) {
  stats::RegenerativeModel m;
  m.alpha = alpha;
  m.ell = regvar::SlowlyVarying::constant(1.0 / std::tgamma(1.0 - alpha));
  return m;
}

std::vector<double> to_double(const std::vector<long long>& xs) {
  std::vector<double> out(xs.begin(), xs.end());
  return out;
}

} // namespace

bool CriterionResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CriterionResult karlin_poisson_limit(std::uint64_t seed, long long replications,
                                     double t, double beta, int threads) {
  CriterionResult result;
  result.title = "deterministic Karlin Poisson limit";

  auto plf = occ::power_law_frequencies(beta, 1e-8);
  const double alpha_star = 1.0 / beta;
  auto ell_star = regvar::SlowlyVarying::constant(std::pow(plf.zeta, -alpha_star));

  stats::ExperimentConfig config;
  config.model = stats::PowerLawModel{beta, 1e-8};
  config.poissonized = true;
  config.scale = t;
  config.record = {regvar::GrowthFunction::threshold_r(alpha_star, ell_star)};
  config.replications = replications;
  config.master_seed = seed;
  config.threads = threads;
  auto table = stats::run_replications(config);
  auto counts = table.column(0);

  rng::RngStream ref_rng = rng::RngStream::derive(seed, 0xBEEF01);
  std::vector<long long> reference(counts.size());
  for (auto& v : reference) v = ref_rng.poisson(1.0);

  auto two = stats::two_sample_test(counts, reference);
  two.name = "karlin-two-sample-vs-poisson1";
  add_check(result, "two-sample vs exact Poisson(1)", two.pass,
            fmt("p=%.4g (need > 0.01), bins=%.0f", two.p_value,
                two.diagnostics.at("bins")));

  auto disp = stats::dispersion_test(counts);
  disp.name = "karlin-dispersion";
  bool disp_ok = disp.statistic >= 0.9 && disp.statistic <= 1.1;
  add_check(result, "dispersion index in [0.9, 1.1]", disp_ok,
            fmt("index=%.4f", disp.statistic));

  auto xs = to_double(counts);
  double mean = stats::mean_of(xs);
  double se = std::sqrt(stats::variance_of(xs) / static_cast<double>(xs.size()));
  bool mean_ok = std::fabs(mean - 1.0) <= 3.0 * se;
  add_check(result, "sample mean within 3 s.e. of 1", mean_ok,
            fmt("mean=%.4f, 3se=%.4f, r*=%g", mean, 3.0 * se,
                static_cast<double>(table.levels[0])));

  result.reports = {two, disp};
  return result;
}

CriterionResult moderate_mixed_poisson(std::uint64_t seed, long long replications,
                                       double n, int threads) {
  CriterionResult result;
  result.title = "moderate-part mixed Poisson limit";
  const double alpha = 0.5;
  auto model = stable_model(alpha);

  stats::ExperimentConfig config;
  config.model = model;
  config.poissonized = false;
  config.scale = n;
  config.record = {regvar::GrowthFunction::power(1.0 / 3.0),
                   regvar::GrowthFunction::power(1.0 / 3.0, 2.0)};
  config.replications = replications;
  config.master_seed = seed;
  config.threads = threads;
  auto table = stats::run_replications(config);
  auto k1 = table.column(0);
  auto k2 = table.column(1);
  auto i_col = table.i_alpha_column();

  const double r_star = regvar::solve_threshold(alpha, model.ell, n);
  const double u1 = static_cast<double>(table.levels[0]) / r_star;
  const double u2 = static_cast<double>(table.levels[1]) / r_star;

  // (a) mean of K_{n, r(n)} against 1/sqrt(2 pi).
  const double limit_mean = 1.0 / std::sqrt(2.0 * M_PI);
  auto xs = to_double(k1);
  double mean = stats::mean_of(xs);
  bool mean_ok = std::fabs(mean - limit_mean) <= 0.10 * limit_mean;
  add_check(result, "mean of K_{n,r(n)} within 10% of 1/sqrt(2pi)", mean_ok,
            fmt("mean=%.4f vs %.4f", mean, limit_mean));

  // (b) two-sample against mixed Poisson built from independent I_alpha.
  std::vector<double> i_ref(static_cast<std::size_t>(replications));
  {
    auto resolved_eps = table.epsilon_used;
    auto resolved_stop = table.stop_tol_used;
    auto spec = sub::SubordinatorSpec::from_tail(model.tail());
    stats::parallel_for_indexed(replications, threads, [&](long long i) {
      rng::RngStream stream = rng::RngStream::derive(
          seed, static_cast<std::uint64_t>(replications + i));
      rng::RngStream path_rng = stream.spawn(0);
      auto path = sub::simulate_path(spec, resolved_eps, resolved_stop, path_rng);
      i_ref[static_cast<std::size_t>(i)] =
          sub::exp_functional(path, alpha).exp_functional;
    });
  }
  rng::RngStream mix_rng = rng::RngStream::derive(seed, 0xBEEF02);
  auto reference = stats::mixed_poisson_reference(alpha, u1, i_ref, mix_rng);
  auto two = stats::two_sample_test(k1, reference);
  two.name = "moderate-two-sample-vs-mixed-poisson";
  add_check(result, "two-sample vs mixed Poisson reference", two.pass,
            fmt("p=%.4g (need > 0.01)", two.p_value));

  // (c) conditional independence across the two scales: correlation of the
  // counts after removing the shared conditional mean u^{-alpha-1} I_alpha.
  const double f1 = std::pow(u1, -alpha - 1.0);
  const double f2 = std::pow(u2, -alpha - 1.0);
  std::vector<double> e1(xs.size()), e2(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    e1[i] = static_cast<double>(k1[i]) - f1 * i_col[i];
    e2[i] = static_cast<double>(k2[i]) - f2 * i_col[i];
  }
  double corr = stats::correlation_of(e1, e2);
  double corr_se = 1.0 / std::sqrt(static_cast<double>(replications));
  bool corr_ok = std::fabs(corr) <= 3.0 * corr_se;
  add_check(result, "residual correlation across scales within 3 s.e. of 0", corr_ok,
            fmt("corr=%.4f, 3se=%.4f", corr, 3.0 * corr_se));

  result.reports = {two};
  return result;
}

namespace {

struct AbelianSetup {
  abelian::AbelianCase acase;
  // Closed-form ratio for constant ell, or 0 when only ratio -> 1 applies.
  double (*oracle)(double q, double param);
  double param;
  const char* label;
};

double oracle_one(double, double) { return 1.0; }
double oracle_regvar(double q, double beta) {
  // Gamma(q - beta) q^beta / Gamma(q); equals q/(q-1) at beta = 1.
  return std::exp(special::log_gamma(q - beta) + beta * std::log(q) -
                  special::log_gamma(q));
}
double oracle_ls_dec(double q, double gamma) {
  return std::exp(special::log_gamma(q - gamma) + gamma * std::log(q) -
                  special::log_gamma(q));
}
double oracle_ls_inc(double q, double gamma) {
  return std::exp(special::log_gamma(q + gamma) - gamma * std::log(q) -
                  special::log_gamma(q));
}

} // namespace

CriterionResult abelian_ratios() {
  CriterionResult result;
  result.title = "Abelian lemma ratios";
  using regvar::GrowthFunction;
  using regvar::SlowlyVarying;
  const auto one = SlowlyVarying::constant(1.0);
  const auto logp = SlowlyVarying::log_power(1.0, 1.0);

  std::vector<AbelianSetup> setups;
  setups.push_back({{abelian::Lemma::Karamata, one, GrowthFunction::power(0.4)},
                    oracle_one, 0.0, "karamata ell=1"});
  setups.push_back({{abelian::Lemma::Karamata, logp, GrowthFunction::power(0.4)},
                    nullptr, 0.0, "karamata ell=1+ln"});
  setups.push_back({{abelian::Lemma::KaramataRegVar, one, GrowthFunction::power(0.4), 1.0},
                    oracle_regvar, 1.0, "karamata-regvar beta=1 ell=1"});
  setups.push_back({{abelian::Lemma::KaramataRegVar, logp, GrowthFunction::power(0.3), -0.5},
                    nullptr, -0.5, "karamata-regvar beta=-1/2 ell=1+ln"});
  setups.push_back({{abelian::Lemma::LaplaceStieltjesDec, one, GrowthFunction::power(0.35),
                     0.0, 0.5},
                    oracle_ls_dec, 0.5, "laplace-stieltjes-dec gamma=1/2 ell=1"});
  setups.push_back({{abelian::Lemma::LaplaceStieltjesDec, logp, GrowthFunction::power(0.35),
                     0.0, 0.5},
                    nullptr, 0.5, "laplace-stieltjes-dec gamma=1/2 ell=1+ln"});
  setups.push_back({{abelian::Lemma::LaplaceStieltjesInc, one, GrowthFunction::power(0.35),
                     0.0, 0.5},
                    oracle_ls_inc, 0.5, "laplace-stieltjes-inc gamma=1/2 ell=1"});
  setups.push_back({{abelian::Lemma::LaplaceStieltjesInc, logp, GrowthFunction::power(0.35),
                     0.0, 0.5},
                    nullptr, 0.5, "laplace-stieltjes-inc gamma=1/2 ell=1+ln"});

  for (const auto& setup : setups) {
    auto rows = abelian::report(setup.acase);
    bool final_close = std::fabs(rows.back().ratio - 1.0) < 0.02;
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (std::fabs(rows[i].ratio - 1.0) >
          std::fabs(rows[i - 1].ratio - 1.0) + 1e-8)
        monotone = false;
    }
    bool tails_ok = true;
    for (const auto& row : rows) tails_ok = tails_ok && row.tail_bound < 1e-6;
    bool oracle_ok = true;
    std::string oracle_note;
    if (setup.oracle != nullptr) {
      for (const auto& row : rows) {
        double want = setup.oracle(static_cast<double>(row.q_t), setup.param);
        if (std::fabs(row.ratio - want) > 1e-8 * want) oracle_ok = false;
      }
      oracle_note = ", oracle to 1e-8";
    }
    add_check(result, setup.label,
              final_close && monotone && tails_ok && oracle_ok,
              fmt("|ratio-1|=%.3g at t=1e8, monotone=%.0f",
                  std::fabs(rows.back().ratio - 1.0), monotone ? 1.0 : 0.0) +
                  oracle_note);
  }
  return result;
}

CriterionResult strong_laws(std::uint64_t seed, int paths, double t_max, int threads) {
  CriterionResult result;
  result.title = "strong laws for K_n and fixed-r counts";
  stats::ConvergenceSpec spec;
  spec.target = stats::ReportTarget::LlnKnr;
  spec.model = stable_model(0.5);
  spec.poissonized = true;
  spec.grid = {t_max * 1e-3, t_max * 1e-2, t_max * 1e-1, t_max};
  spec.fixed_r = {1, 2, 3};

  std::atomic<int> ok_kn{0}, ok_r1{0}, ok_r2{0}, ok_r3{0}, ok_joint{0};
  stats::parallel_for_indexed(paths, threads, [&](long long p) {
    auto report = stats::convergence_report(spec, seed, static_cast<std::uint64_t>(p));
    bool kn = false, r1 = false, r2 = false, r3 = false;
    for (const auto& row : report.rows) {
      if (row.scale != t_max) continue;
      if (row.label == "kn") kn = std::fabs(row.ratio - 1.0) <= 0.05;
      if (row.label == "r=1") r1 = std::fabs(row.ratio - 1.0) <= 0.10;
      if (row.label == "r=2") r2 = std::fabs(row.ratio - 1.0) <= 0.10;
      if (row.label == "r=3") r3 = std::fabs(row.ratio - 1.0) <= 0.10;
    }
    if (kn) ++ok_kn;
    if (r1) ++ok_r1;
    if (r2) ++ok_r2;
    if (r3) ++ok_r3;
    if (kn && r1 && r2 && r3) ++ok_joint;
  });

  int need = (paths * 9 + 9) / 10;
  add_check(result, "K_n ratio within 5% of path I_alpha", ok_kn >= need,
            fmt("%g of %g paths (joint all-ratios: %g)", ok_kn.load(), paths,
                ok_joint.load()));
  add_check(result, "K_{t,1} ratio within 10% of c_1 I_alpha", ok_r1 >= need,
            fmt("%g of %g paths", ok_r1.load(), paths));
  add_check(result, "K_{t,2} ratio within 10% of c_2 I_alpha", ok_r2 >= need,
            fmt("%g of %g paths", ok_r2.load(), paths));
  add_check(result, "K_{t,3} ratio within 10% of c_3 I_alpha", ok_r3 >= need,
            fmt("%g of %g paths", ok_r3.load(), paths));
  return result;
}

CriterionResult main23_limits(std::uint64_t seed, int paths, double n_max, int threads) {
  CriterionResult result;
  result.title = "moderate/slow growth limits (thm-main2 / thm-main3)";

  auto run_target = [&](stats::ReportTarget target, double theta,
                        std::uint64_t tag) -> int {
    stats::ConvergenceSpec spec;
    spec.target = target;
    spec.model = stable_model(0.5);
    spec.poissonized = false;
    spec.grid = {n_max * 1e-2, n_max * 1e-1, n_max};
    spec.growth = regvar::GrowthFunction::power(theta);
    std::atomic<int> ok{0};
    stats::parallel_for_indexed(paths, threads, [&](long long p) {
      auto report = stats::convergence_report(
          spec, seed + tag, static_cast<std::uint64_t>(p));
      for (const auto& row : report.rows) {
        if (row.scale == n_max && std::fabs(row.ratio - 1.0) <= 0.10) ++ok;
      }
    });
    return ok.load();
  };

  int ok2 = run_target(stats::ReportTarget::ThmMain2, 0.2, 2);
  int ok3 = run_target(stats::ReportTarget::ThmMain3, 0.25, 3);
  int need = (paths * 9 + 9) / 10;
  add_check(result, "w(n)=n^{1/5}: statistic within 10% of alpha I_alpha", ok2 >= need,
            fmt("%g of %g paths", ok2, paths));
  add_check(result, "q(n)=n^{1/4}: statistic within 10% of I_alpha", ok3 >= need,
            fmt("%g of %g paths", ok3, paths));
  return result;
}

CriterionResult vanishing_regime(std::uint64_t seed, int replications, double n,
                                 int threads) {
  CriterionResult result;
  result.title = "vanishing regime K_{n,q(n)} -> 0";
  stats::ConvergenceSpec spec;
  spec.target = stats::ReportTarget::ToZero;
  spec.model = stable_model(0.5);
  spec.poissonized = false;
  spec.grid = {n};
  spec.growth = regvar::GrowthFunction::power(0.45);

  std::atomic<int> zero_count{0};
  stats::parallel_for_indexed(replications, threads, [&](long long p) {
    auto report = stats::convergence_report(spec, seed, static_cast<std::uint64_t>(p));
    if (report.rows.at(0).statistic == 1.0) ++zero_count;
  });
  double frac = static_cast<double>(zero_count) / static_cast<double>(replications);
  add_check(result, "empirical P{K_{n,q(n)} = 0} >= 0.95", frac >= 0.95,
            fmt("fraction=%.4f over %g replications", frac,
                static_cast<double>(replications)));
  return result;
}

namespace {

// Exact multinomial pmf check over the full joint outcome (K=3, n=5).
stats::TestReport multinomial_exactness(std::uint64_t seed, long long draws) {
  const std::vector<double> probs{0.5, 0.3, 0.2};
  const long long n = 5;
  std::map<std::pair<long long, long long>, long long> observed;
  rng::RngStream rng = rng::RngStream::derive(seed, 0xBEEF03);
  for (long long i = 0; i < draws; ++i) {
    auto counts = occ::allocate_fixed(probs, 0.0, n, rng);
    ++observed[{counts.counts[0], counts.counts[1]}];
  }
  // Expected cells, merged so every expected count is >= 5.
  std::vector<std::pair<double, double>> cells; // (observed, expected)
  for (long long a = 0; a <= n; ++a) {
    for (long long b = 0; a + b <= n; ++b) {
      long long c = n - a - b;
      double lp = special::log_choose(n, a) + special::log_choose(n - a, b) +
                  a * std::log(probs[0]) + b * std::log(probs[1]) +
                  c * std::log(probs[2]);
      double expected = std::exp(lp) * static_cast<double>(draws);
      auto it = observed.find({a, b});
      double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
      cells.push_back({obs, expected});
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& x, const auto& y) { return x.second > y.second; });
  while (cells.size() > 1 && cells.back().second < 5.0) {
    auto last = cells.back();
    cells.pop_back();
    cells.back().first += last.first;
    cells.back().second += last.second;
  }
  double stat = 0.0;
  for (const auto& [obs, expected] : cells)
    stat += (obs - expected) * (obs - expected) / expected;
  stats::TestReport report;
  report.name = "multinomial-vs-exact-chi-square";
  report.statistic = stat;
  report.p_value = special::chi_square_sf(stat, static_cast<double>(cells.size() - 1));
  report.pass = report.p_value > 0.01;
  report.diagnostics["cells"] = static_cast<double>(cells.size());
  return report;
}

} // namespace

CriterionResult property_suites(std::uint64_t seed, const std::string& cli_path,
                                int threads) {
  CriterionResult result;
  result.title = "always-on property suites";
  (void)threads;

  // Conservation and telescoping over a spread of configurations.
  bool conserve_ok = true, telescope_ok = true, rho_ok = true;
  {
    rng::RngStream rng = rng::RngStream::derive(seed, 0xBEEF04);
    for (int rep = 0; rep < 40; ++rep) {
      double alpha = 0.3 + 0.2 * (rep % 3);
      auto s = sub::SubordinatorSpec::stable(alpha);
      rng::RngStream path_rng = rng.spawn(rep);
      auto path = sub::simulate_path(s, 1e-5, 1e-6, path_rng);
      auto freqs = sub::frequencies(path);
      double sum = 0.0, comp = 0.0;
      for (double p : freqs.probs) {
        double y = p - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      if (std::fabs(sum + freqs.residual_mass - 1.0) > 1e-12) telescope_ok = false;

      long long n = 100 + 137 * rep;
      rng::RngStream alloc_rng = rng.spawn(1000 + rep);
      auto counts = occ::allocate_fixed(freqs, n, alloc_rng);
      auto profile = occ::count_profile(counts);
      if (profile.balls_in_boxes() + profile.overflow != n) conserve_ok = false;

      long long prev = -1;
      for (double x : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        long long r = sub::rho(freqs, x);
        if (r < prev) rho_ok = false;
        prev = r;
      }
      for (std::size_t j : {std::size_t{1}, std::size_t{10}}) {
        if (j <= freqs.sorted_desc.size()) {
          if (sub::rho(freqs, freqs.sorted_desc[j - 1]) < static_cast<long long>(j))
            rho_ok = false;
        }
      }
    }
  }
  add_check(result, "fixed-n conservation sum r K_{n,r} + overflow = n", conserve_ok, "40 draws");
  add_check(result, "telescoping sum p_k + residual = 1 (1e-12)", telescope_ok, "40 paths");
  add_check(result, "rho monotone and rho(p_(j)) >= j", rho_ok, "40 paths");

  // Partial sums of c_r increase to 1.
  {
    bool crs_ok = true;
    for (double alpha : {0.3, 0.5, 0.9}) {
      double partial = 0.0;
      for (long long r = 1; r <= 10000; ++r) {
        double c = regvar::small_count_constant(alpha, r);
        if (!(c > 0.0)) crs_ok = false;
        partial += c;
        if (partial > 1.0 + 1e-12) crs_ok = false;
      }
      if (alpha == 0.5 && std::fabs(partial - 1.0) > 1e-2) crs_ok = false;
    }
    add_check(result, "sum of c_r increases to 1 (alpha=1/2 within 1e-2 at 1e4)",
              crs_ok, "alpha in {0.3, 0.5, 0.9}");
  }

  auto multi = multinomial_exactness(seed, 10000);
  add_check(result, "multinomial vs exact pmf chi-square (K=3, n=5)", multi.pass,
            fmt("p=%.4g", multi.p_value));
  result.reports.push_back(multi);

  // Null calibration of both tests at nominal 0.05.
  {
    rng::RngStream rng = rng::RngStream::derive(seed, 0xBEEF05);
    int reject_two = 0, reject_disp = 0;
    const int reps = 200;
    const std::size_t size = 10000;
    std::vector<long long> a(size), b(size);
    for (int rep = 0; rep < reps; ++rep) {
      for (auto& v : a) v = rng.poisson(2.0);
      for (auto& v : b) v = rng.poisson(2.0);
      if (stats::two_sample_test(a, b).p_value < 0.05) ++reject_two;
      for (auto& v : a) v = rng.poisson(1.0);
      if (stats::dispersion_test(a).p_value < 0.05) ++reject_disp;
    }
    double f2 = reject_two / 200.0, fd = reject_disp / 200.0;
    bool cal_ok = f2 >= 0.02 && f2 <= 0.09 && fd >= 0.02 && fd <= 0.09;
    add_check(result, "test null calibration in [0.02, 0.09] at nominal 0.05", cal_ok,
              fmt("two-sample=%.3f, dispersion=%.3f", f2, fd));
  }

  // Reproducibility: identical tables from identical seeds.
  {
    stats::ExperimentConfig config;
    config.model = stable_model(0.5);
    config.poissonized = false;
    config.scale = 1e4;
    config.record = {regvar::GrowthFunction::power(1.0 / 3.0)};
    config.replications = 16;
    config.master_seed = seed;
    auto t1 = stats::run_replications(config);
    auto t2 = stats::run_replications(config);
    bool same = t1.rows.size() == t2.rows.size();
    for (std::size_t i = 0; same && i < t1.rows.size(); ++i) {
      same = t1.rows[i].counts == t2.rows[i].counts &&
             t1.rows[i].i_alpha == t2.rows[i].i_alpha &&
             t1.rows[i].seed == t2.rows[i].seed;
    }
    add_check(result, "identical replication tables under a fixed seed", same, "16 rows");
  }

  // Byte-identical CLI artifacts under a fixed seed.
  if (!cli_path.empty()) {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() /
                    ("regenlab-accept-" + std::to_string(seed));
    fs::remove_all(base);
    auto run_once = [&](const std::string& sub) {
      fs::path dir = base / sub;
      std::string cmd = cli_path +
                        " simulate --model powerlaw --beta 2 --poissonized 1e5"
                        " --record r-star --replications 300 --seed 7 --out-dir " +
                        dir.string() + " > /dev/null 2>&1";
      return std::system(cmd.c_str());
    };
    int rc1 = run_once("a");
    int rc2 = run_once("b");
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>());
    };
    std::string csv_a = slurp(base / "a" / "replications.csv");
    std::string csv_b = slurp(base / "b" / "replications.csv");
    std::string rep_a = slurp(base / "a" / "report.json");
    std::string rep_b = slurp(base / "b" / "report.json");
    bool bytes_ok = rc1 == 0 && rc2 == 0 && !csv_a.empty() && csv_a == csv_b &&
                    !rep_a.empty() && rep_a == rep_b;
    add_check(result, "byte-identical CLI artifacts across reruns", bytes_ok,
              fmt("csv bytes=%g", static_cast<double>(csv_a.size())));
    fs::remove_all(base);
  }

  return result;
}

} // namespace regenlab::experiments
