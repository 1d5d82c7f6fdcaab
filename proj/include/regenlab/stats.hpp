#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "regenlab/occupancy.hpp"
#include "regenlab/regvar.hpp"
#include "regenlab/rng.hpp"
#include "regenlab/subordinator.hpp"

namespace regenlab::stats {

/// Random environment: subordinator-driven frequencies.  epsilon == 0 means
/// "derive from kappa * freq_scale"; stop_tol == 0 means 1e-3 / scale.
struct RegenerativeModel {
  double alpha = 0.5;
  regvar::SlowlyVarying ell = regvar::SlowlyVarying::constant(1.0);
  double kappa = 1e-2;
  double epsilon = 0.0;
  double stop_tol = 0.0;

  regvar::RegVarTail tail() const;
};

/// Deterministic environment: p*_j = j^{-beta} / Z.
struct PowerLawModel {
  double beta = 2.0;
  double tail_tol = 1e-8;
};

using Model = std::variant<RegenerativeModel, PowerLawModel>;

struct ExperimentConfig {
  Model model;
  bool poissonized = false;
  double scale = 0.0; // n (fixed) or t (poissonized)
  std::vector<regvar::GrowthFunction> record;
  long long replications = 100;
  std::uint64_t master_seed = 1;
  int threads = 0;
  bool strict = true;
  double overflow_budget = 0.1;
  double freq_scale = 0.0; // epsilon rule input; 0 = min recorded level / scale

  void validate() const;
};

struct ReplicationRow {
  std::vector<long long> counts; // one per recorded level
  double i_alpha = 0.0;          // NaN for power-law models
  long long overflow = 0;
  std::uint64_t seed = 0;
};

struct ReplicationTable {
  std::vector<long long> levels;
  std::vector<ReplicationRow> rows;
  double epsilon_used = 0.0;
  double stop_tol_used = 0.0;
  double ignored_mass = 0.0; // per-unit-time mass below epsilon (regenerative)

  std::vector<long long> column(std::size_t level_index) const;
  std::vector<double> i_alpha_column() const;
};

/// M replications, each reproducible from (master_seed, row index); for the
/// regenerative model every replication pairs the counts with the I_alpha of
/// the same path.  Replications run in parallel over disjoint streams.
ReplicationTable run_replications(const ExperimentConfig& config);

/// One mixed-Poisson draw Poisson(u^{-alpha-1} I) per supplied I sample.
std::vector<long long> mixed_poisson_reference(double alpha, double u,
                                               std::span<const double> i_alpha_samples,
                                               rng::RngStream& rng);

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  bool pass = true;
  std::map<std::string, double> diagnostics;
};

/// Chi-square two-sample test on pooled bins, adjacent values merged until
/// every expected cell count is >= 5.  A single-value pooled sample passes
/// trivially with a diagnostic.
TestReport two_sample_test(std::span<const long long> a, std::span<const long long> b);

/// Index of dispersion (variance/mean) with a normal-approximation p-value
/// for H0: Poisson.
TestReport dispersion_test(std::span<const long long> samples);

enum class ReportTarget { ThmMain2, ThmMain3, LlnKn, LlnKnr, RhoPathwise, ToZero };

struct ConvergenceSpec {
  ReportTarget target = ReportTarget::LlnKn;
  RegenerativeModel model;
  bool poissonized = true;
  std::vector<double> grid{1e4, 1e5, 1e6};       // n or t, ascending
  regvar::GrowthFunction growth;                 // w/q for main2, main3, to-zero
  std::vector<long long> fixed_r{1, 2, 3};       // lln-knr
  std::vector<double> x_grid{1e-3, 1e-4, 1e-5};  // rho-pathwise
  double overflow_budget = 0.1;
};

struct RatioRow {
  double scale = 0.0;
  std::string label;
  double statistic = 0.0;
  double target = 0.0;
  double ratio = 0.0;
  std::string flag;
};

struct RatioReport {
  std::vector<RatioRow> rows;
  double i_alpha = 0.0;
  std::uint64_t seed = 0;
};

/// One subordinator path, reused across the grid with a fresh allocation per
/// grid point; the path's own exponential functional is the limit target.
RatioReport convergence_report(const ConvergenceSpec& spec, std::uint64_t master_seed,
                               std::uint64_t path_index = 0);

/// Deterministic index-sharded parallel loop (threads <= 0 means hardware).
void parallel_for_indexed(long long count, int threads,
                          const std::function<void(long long)>& body);

// Small sample-statistics helpers shared by tests and experiments.
double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs); // unbiased
double correlation_of(std::span<const double> xs, std::span<const double> ys);

} // namespace regenlab::stats
