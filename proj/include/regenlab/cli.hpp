#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace regenlab::cli {

/// Exit codes: 0 all checks pass, 1 check failure, 2 usage error,
/// 3 validation / infeasible configuration.
int cli_main(int argc, const char* const* argv);

/// Effective run configuration: defaults < config file < flags.
struct CliConfig {
  std::string model; // "regenerative" | "powerlaw"; required for simulate
  double alpha = 0.5;
  std::string ell; // empty = stable preset 1/Gamma(1-alpha) for regenerative
  double beta = 2.0;
  double tail_tol = 1e-8;
  double kappa = 1e-2;
  double epsilon = 0.0;  // 0 = kappa rule
  double stop_tol = 0.0; // 0 = 1e-3 / scale
  double n = 0.0;        // fixed-n allocation when > 0
  double poissonized = 0.0; // poissonized horizon t when > 0
  std::vector<std::string> record{"r-star"};
  long long replications = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  bool strict = true;
  std::string out_dir;
};

/// Parse and validate a JSON config file; throws a validation error listing
/// every offending field.
CliConfig load_config(const std::string& path);

} // namespace regenlab::cli
