#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regenlab/abelian.hpp"
#include "regenlab/io.hpp"
#include "regenlab/stats.hpp"

namespace regenlab::experiments {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  std::string title;
  std::vector<CheckLine> checks;
  std::vector<stats::TestReport> reports;

  bool pass() const;
};

/// Deterministic Karlin scheme, Poissonized: K*_{r*}(t) against Poisson(1).
CriterionResult karlin_poisson_limit(std::uint64_t seed, long long replications = 5000,
                                     double t = 1e7, double beta = 2.0, int threads = 0);

/// Moderate parts for the stable subordinator: mean, mixed-Poisson reference,
/// and conditional-residual correlation across two scales.
CriterionResult moderate_mixed_poisson(std::uint64_t seed, long long replications = 3000,
                                       double n = 1e6, int threads = 0);

/// Abelian lemma ratio table: closed-form oracles, 2%-at-1e8, monotone decay.
CriterionResult abelian_ratios();

/// Strong laws on single paths, Poissonized grid: K_n and fixed-r ratios.
CriterionResult strong_laws(std::uint64_t seed, int paths = 100, double t_max = 1e7,
                            int threads = 0);

/// Moderate/slow growth limits (fixed-n): w(n)=n^{1/5}, q(n)=n^{1/4}.
CriterionResult main23_limits(std::uint64_t seed, int paths = 100, double n_max = 1e6,
                              int threads = 0);

/// Vanishing regime: q(n)=n^{0.45}, empirical P{K=0}.
CriterionResult vanishing_regime(std::uint64_t seed, int replications = 200,
                                 double n = 1e6, int threads = 0);

/// Always-on structural properties: conservation, telescoping, rho
/// monotonicity, sum of c_r, multinomial exactness, test calibration, and
/// byte-identical reruns (via the CLI when a path is supplied).
CriterionResult property_suites(std::uint64_t seed, const std::string& cli_path = "",
                                int threads = 0);

} // namespace regenlab::experiments
