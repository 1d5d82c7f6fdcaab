#include "regenlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "regenlab/abelian.hpp"
#include "regenlab/experiments.hpp"
#include "regenlab/io.hpp"
#include "regenlab/occupancy.hpp"
#include "regenlab/regvar.hpp"
#include "regenlab/stats.hpp"

namespace regenlab::cli {

namespace {

using nlohmann::json;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json echo_config(const CliConfig& c) {
  json j;
  j["model"] = c.model;
  j["alpha"] = c.alpha;
  j["ell"] = c.ell;
  j["beta"] = c.beta;
  j["tail_tol"] = c.tail_tol;
  j["kappa"] = c.kappa;
  j["epsilon"] = c.epsilon;
  j["stop_tol"] = c.stop_tol;
  j["n"] = c.n;
  j["poissonized"] = c.poissonized;
  j["record"] = c.record;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["strict"] = c.strict;
  j["out_dir"] = c.out_dir;
  return j;
}

CliConfig config_from_json(const json& j) {
  CliConfig c;
  std::vector<std::string> errors;
  auto take_number = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) errors.push_back(std::string(key) + ": expected number");
    else dst = j[key].get<double>();
  };
  auto take_string = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) errors.push_back(std::string(key) + ": expected string");
    else dst = j[key].get<std::string>();
  };
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const std::vector<std::string> known{
      "model", "alpha", "ell", "beta", "tail_tol", "kappa", "epsilon",
      "stop_tol", "n", "poissonized", "record", "replications", "seed",
      "threads", "strict", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      errors.push_back(it.key() + ": unknown field");
  }
  take_string("model", c.model);
  take_number("alpha", c.alpha);
  take_string("ell", c.ell);
  take_number("beta", c.beta);
  take_number("tail_tol", c.tail_tol);
  take_number("kappa", c.kappa);
  take_number("epsilon", c.epsilon);
  take_number("stop_tol", c.stop_tol);
  take_number("n", c.n);
  take_number("poissonized", c.poissonized);
  if (j.contains("record")) {
    if (!j["record"].is_array()) {
      errors.push_back("record: expected array of strings");
    } else {
      c.record.clear();
      for (const auto& e : j["record"]) {
        if (!e.is_string()) errors.push_back("record: expected array of strings");
        else c.record.push_back(e.get<std::string>());
      }
    }
  }
  if (j.contains("replications")) {
    if (!j["replications"].is_number_integer())
      errors.push_back("replications: expected integer");
    else c.replications = j["replications"].get<long long>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      errors.push_back("seed: expected integer");
    else c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer()) errors.push_back("threads: expected integer");
    else c.threads = j["threads"].get<int>();
  }
  if (j.contains("strict")) {
    if (!j["strict"].is_boolean()) errors.push_back("strict: expected boolean");
    else c.strict = j["strict"].get<bool>();
  }
  take_string("out_dir", c.out_dir);
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return c;
}

regvar::SlowlyVarying resolve_ell(const CliConfig& c) {
  if (!c.ell.empty()) return regvar::SlowlyVarying::parse(c.ell);
  return regvar::SlowlyVarying::constant(1.0 / std::tgamma(1.0 - c.alpha));
}

// "r-star" resolves against the model's counting-function tail.
regvar::GrowthFunction resolve_record(const CliConfig& c, const std::string& text) {
  if (text == "r-star") {
    if (c.model == "powerlaw") {
      auto plf = occ::power_law_frequencies(c.beta, c.tail_tol);
      double alpha_star = 1.0 / c.beta;
      return regvar::GrowthFunction::threshold_r(
          alpha_star, regvar::SlowlyVarying::constant(std::pow(plf.zeta, -alpha_star)));
    }
    return regvar::GrowthFunction::threshold_r(c.alpha, resolve_ell(c));
  }
  return regvar::GrowthFunction::parse(text);
}

stats::ExperimentConfig to_experiment(const CliConfig& c) {
  std::vector<std::string> errors;
  if (c.model != "regenerative" && c.model != "powerlaw")
    errors.push_back("model: required, one of {regenerative, powerlaw}");
  bool fixed = c.n > 0.0, pois = c.poissonized > 0.0;
  if (fixed == pois)
    errors.push_back("allocation: exactly one of n (fixed) or poissonized (t) required");
  if (c.record.empty()) errors.push_back("record: at least one statistic required");
  if (c.replications < 1) errors.push_back("replications: must be >= 1");
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  stats::ExperimentConfig e;
  if (c.model == "regenerative") {
    stats::RegenerativeModel m;
    m.alpha = c.alpha;
    m.ell = resolve_ell(c);
    m.kappa = c.kappa;
    m.epsilon = c.epsilon;
    m.stop_tol = c.stop_tol;
    e.model = m;
  } else {
    e.model = stats::PowerLawModel{c.beta, c.tail_tol};
  }
  e.poissonized = pois;
  e.scale = pois ? c.poissonized : c.n;
  for (const auto& r : c.record) e.record.push_back(resolve_record(c, r));
  e.replications = c.replications;
  e.master_seed = c.seed;
  e.threads = c.threads;
  e.strict = c.strict;
  return e;
}

json result_json(const experiments::CriterionResult& r) {
  json j;
  j["title"] = r.title;
  j["pass"] = r.pass();
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

struct Run {
  CliConfig cfg;
  std::string command;
  std::vector<std::string> artifacts;
  bool pass = true;
  std::string started = io::iso8601_utc_now();

  void emit(const std::string& name, const std::string& content) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::path p = std::filesystem::path(cfg.out_dir) / name;
    io::atomic_write(p, content);
    artifacts.push_back(p.string());
  }

  void write_manifest() {
    if (cfg.out_dir.empty()) return;
    json m;
    m["command"] = command;
    m["config"] = echo_config(cfg);
    m["seed"] = cfg.seed;
    m["started"] = started;
    m["finished"] = io::iso8601_utc_now();
    m["artifacts"] = artifacts;
    m["pass"] = pass;
    io::atomic_write(std::filesystem::path(cfg.out_dir) / "manifest.json",
                     m.dump(2) + "\n");
  }
};

void print_result(const experiments::CriterionResult& r) {
  std::printf("%s: %s\n", r.title.c_str(), r.pass() ? "PASS" : "FAIL");
  for (const auto& c : r.checks)
    std::printf("  - %s: %s (%s)\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                c.detail.c_str());
}

int run_threshold(Run& run) {
  const auto& c = run.cfg;
  double t = c.poissonized > 0.0 ? c.poissonized : c.n;
  if (t <= 0.0) throw ValidationError("threshold: need --t (or --n) > 0");
  auto ell = resolve_ell(c);
  double r = regvar::solve_threshold(c.alpha, ell, t);
  std::printf("%.6g\n", r);
  json j;
  j["threshold"] = r;
  if (!ell.is_constant()) {
    double naive = regvar::naive_threshold(c.alpha, ell, t);
    std::printf("naive-candidate: %.6g\n", naive);
    j["naive_candidate"] = naive;
  }
  run.emit("threshold.json", j.dump(2) + "\n");
  return 0;
}

int run_simulate(Run& run) {
  auto config = to_experiment(run.cfg);
  auto table = stats::run_replications(config);
  char meta[256];
  std::snprintf(meta, sizeof(meta),
                "command=simulate model=%s scale=%.17g poissonized=%d seed=%llu "
                "epsilon=%.17g stop_tol=%.17g ignored_mass=%.17g",
                run.cfg.model.c_str(), config.scale, config.poissonized ? 1 : 0,
                static_cast<unsigned long long>(config.master_seed),
                table.epsilon_used, table.stop_tol_used, table.ignored_mass);
  run.emit("replications.csv", io::replication_table_csv(table, meta));
  auto counts = table.column(0);
  std::vector<stats::TestReport> reports;
  if (counts.size() >= 500) reports.push_back(stats::dispersion_test(counts));
  run.emit("report.json", io::test_reports_json(reports));
  std::printf("simulate: %zu replications, recorded levels:", table.rows.size());
  for (long long level : table.levels) std::printf(" %lld", level);
  std::printf("\n");
  return 0;
}

int run_verify_abelian(Run& run, const std::string& lemma, const std::string& growth,
                       double beta, double gamma, double t_single) {
  abelian::AbelianCase acase;
  acase.lemma = abelian::parse_lemma(lemma);
  acase.ell = run.cfg.ell.empty() ? regvar::SlowlyVarying::constant(1.0)
                                  : regvar::SlowlyVarying::parse(run.cfg.ell);
  acase.q = regvar::GrowthFunction::parse(growth);
  acase.beta = beta;
  acase.gamma = gamma;
  if (t_single > 0.0) acase.t_grid = {t_single};

  std::vector<io::AbelianCsvRow> rows;
  bool pass = true;
  for (double t : acase.t_grid) {
    auto r = abelian::evaluate(acase, t);
    rows.push_back({lemma_name(acase.lemma), t, r.q_t, r.ratio, r.tail_bound});
    if (r.tail_bound >= 1e-6) pass = false;
    if (acase.ell.is_constant()) {
      double q = static_cast<double>(r.q_t);
      double want = 1.0;
      if (acase.lemma == abelian::Lemma::KaramataRegVar)
        want = std::exp(std::lgamma(q - beta) + beta * std::log(q) - std::lgamma(q));
      else if (acase.lemma == abelian::Lemma::LaplaceStieltjesDec)
        want = std::exp(std::lgamma(q - gamma) + gamma * std::log(q) - std::lgamma(q));
      else if (acase.lemma == abelian::Lemma::LaplaceStieltjesInc)
        want = std::exp(std::lgamma(q + gamma) - gamma * std::log(q) - std::lgamma(q));
      if (std::fabs(r.ratio - want) > 1e-8 * want) pass = false;
    }
    std::printf("t=%.3g q=%lld ratio=%.12g tail_bound=%.3g\n", t, r.q_t, r.ratio,
                r.tail_bound);
  }
  if (t_single <= 0.0 && rows.size() >= 2) {
    if (std::fabs(rows.back().ratio - 1.0) >= 0.02) pass = false;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (std::fabs(rows[i].ratio - 1.0) > std::fabs(rows[i - 1].ratio - 1.0) + 1e-8)
        pass = false;
  }
  char meta[160];
  std::snprintf(meta, sizeof(meta), "command=verify-abelian lemma=%s ell=%s q=%s",
                lemma.c_str(), acase.ell.to_string().c_str(),
                acase.q.to_string().c_str());
  run.emit("abelian.csv", io::abelian_report_csv(rows, meta));
  run.pass = pass;
  return pass ? 0 : 1;
}

int finish_with(Run& run, const experiments::CriterionResult& result) {
  print_result(result);
  run.emit("checks.json", result_json(result).dump(2) + "\n");
  if (!result.reports.empty())
    run.emit("report.json", io::test_reports_json(result.reports));
  run.pass = result.pass();
  return result.pass() ? 0 : 1;
}

} // namespace

CliConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"regenlab: regenerative-composition and Karlin occupancy laboratory"};
  app.require_subcommand(1);

  CliConfig flags; // flag values land here; merged over config file below
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", flags.alpha, "index of regular variation in (0,1]");
    cmd->add_option("--beta", flags.beta, "power-law frequency exponent (> 1)");
    cmd->add_option("--ell", flags.ell, "slowly varying factor, const:c | logpow:p[,offset]");
    cmd->add_option("--epsilon", flags.epsilon, "jump truncation level (0 = kappa rule)");
    cmd->add_option("--kappa", flags.kappa, "epsilon rule multiplier");
    cmd->add_option("--stop-tol", flags.stop_tol, "residual-mass stopping level (0 = 1e-3/n)");
    cmd->add_option("--n", flags.n, "fixed number of balls");
    cmd->add_option("--t", flags.poissonized, "scale parameter t");
    cmd->add_option("--poissonized", flags.poissonized, "Poissonized horizon t");
    cmd->add_option("--record", flags.record, "statistics to record (r-star | pow:th[,c] | powlog:th,p | const:c)");
    cmd->add_option("--replications", flags.replications, "number of replications");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = auto)");
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out-dir", flags.out_dir, "artifact directory");
    cmd->add_flag("--strict,!--no-strict", flags.strict, "overflow budget enforcement");
    return cmd;
  };

  auto* cmd_threshold = add_common(app.add_subcommand("threshold", "solve the moderate-part threshold r(t)"));
  auto* cmd_simulate = add_common(app.add_subcommand("simulate", "run replications and dump the table"));
  auto* cmd_abelian = add_common(app.add_subcommand("verify-abelian", "check an Abelian lemma ratio"));
  auto* cmd_poisson = add_common(app.add_subcommand("verify-poisson-limit", "Poisson limit checks"));
  auto* cmd_lln = add_common(app.add_subcommand("verify-lln", "strong-law ratio checks"));
  auto* cmd_tail = add_common(app.add_subcommand("verify-tail", "tail-count and vanishing-regime checks"));

  std::string model_flag, lemma = "karamata", growth = "pow:0.4", regime = "to-zero";
  double ab_beta = 0.0, ab_gamma = 0.5;
  cmd_simulate->add_option("--model", model_flag, "regenerative | powerlaw");
  cmd_poisson->add_option("--model", model_flag, "regenerative | powerlaw");
  cmd_abelian->add_option("--lemma", lemma,
                          "karamata | karamata-regvar | laplace-stieltjes-dec | laplace-stieltjes-inc");
  cmd_abelian->add_option("--q", growth, "growth function, pow:theta | powlog:theta,p | const:c");
  cmd_abelian->add_option("--reg-beta", ab_beta, "regular-variation index beta");
  cmd_abelian->add_option("--gamma", ab_gamma, "Laplace-Stieltjes index gamma");
  cmd_tail->add_option("--regime", regime, "to-zero | main2 | main3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Precedence: defaults < config file < flags.
  CliConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  }
  CLI::App* active = app.get_subcommands().front();
  auto overridden = [&](const std::string& name) {
    auto* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (overridden("--alpha")) cfg.alpha = flags.alpha;
  if (overridden("--beta")) cfg.beta = flags.beta;
  if (overridden("--ell")) cfg.ell = flags.ell;
  if (overridden("--epsilon")) cfg.epsilon = flags.epsilon;
  if (overridden("--kappa")) cfg.kappa = flags.kappa;
  if (overridden("--stop-tol")) cfg.stop_tol = flags.stop_tol;
  if (overridden("--n")) cfg.n = flags.n;
  if (overridden("--t") || overridden("--poissonized")) cfg.poissonized = flags.poissonized;
  if (overridden("--record")) cfg.record = flags.record;
  if (overridden("--replications")) cfg.replications = flags.replications;
  if (overridden("--seed")) cfg.seed = flags.seed;
  if (overridden("--threads")) cfg.threads = flags.threads;
  if (overridden("--strict") || overridden("--no-strict")) cfg.strict = flags.strict;
  if (overridden("--out-dir")) cfg.out_dir = flags.out_dir;
  if (!model_flag.empty()) cfg.model = model_flag;

  Run run;
  run.cfg = cfg;
  run.command = active->get_name();

  int status = 0;
  try {
    if (active == cmd_threshold) {
      status = run_threshold(run);
    } else if (active == cmd_simulate) {
      status = run_simulate(run);
    } else if (active == cmd_abelian) {
      double t_single = cfg.poissonized; // --t
      status = run_verify_abelian(run, lemma, growth, ab_beta, ab_gamma, t_single);
    } else if (active == cmd_poisson) {
      if (cfg.model == "regenerative") {
        double n = cfg.n > 0.0 ? cfg.n : 1e6;
        long long reps = cfg.replications == 100 ? 3000 : cfg.replications;
        status = finish_with(run, experiments::moderate_mixed_poisson(
                                      cfg.seed, reps, n, cfg.threads));
      } else {
        double t = cfg.poissonized > 0.0 ? cfg.poissonized : 1e7;
        long long reps = cfg.replications == 100 ? 5000 : cfg.replications;
        status = finish_with(run, experiments::karlin_poisson_limit(
                                      cfg.seed, reps, t, cfg.beta, cfg.threads));
      }
    } else if (active == cmd_lln) {
      double t = cfg.poissonized > 0.0 ? cfg.poissonized : 1e7;
      int paths = cfg.replications == 100 ? 100 : static_cast<int>(cfg.replications);
      status = finish_with(run, experiments::strong_laws(cfg.seed, paths, t, cfg.threads));
    } else if (active == cmd_tail) {
      if (regime == "to-zero") {
        double n = cfg.n > 0.0 ? cfg.n : 1e6;
        int reps = cfg.replications == 100 ? 200 : static_cast<int>(cfg.replications);
        status = finish_with(run, experiments::vanishing_regime(cfg.seed, reps, n,
                                                                cfg.threads));
      } else {
        double n = cfg.n > 0.0 ? cfg.n : 1e6;
        int paths = cfg.replications == 100 ? 100 : static_cast<int>(cfg.replications);
        status = finish_with(run, experiments::main23_limits(cfg.seed, paths, n,
                                                             cfg.threads));
      }
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    run.pass = false;
    status = 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    run.pass = false;
    status = 3;
  }
  run.write_manifest();
  return status;
}

} // namespace regenlab::cli
