#pragma once

#include <string>
#include <vector>

#include "regenlab/regvar.hpp"

namespace regenlab::abelian {

enum class Lemma {
  Karamata,            // int y^{q-1} e^{-y} ell(t/y) dy  ~  Gamma(q) ell(t/q)
  KaramataRegVar,      // same with U(x) = x^beta ell(x)
  LaplaceStieltjesDec, // int e^{-tx} (tx)^q/Gamma(q+1) d(-U),  U = x^{-gamma} ell(1/x)
  LaplaceStieltjesInc, // nondecreasing variant,               U = x^{gamma} ell(1/x)
};

std::string lemma_name(Lemma lemma);
Lemma parse_lemma(const std::string& name);

struct AbelianCase {
  Lemma lemma = Lemma::Karamata;
  regvar::SlowlyVarying ell;
  regvar::GrowthFunction q;
  double beta = 0.0;  // KaramataRegVar index
  double gamma = 0.5; // Laplace-Stieltjes index, > 0
  std::vector<double> t_grid{1e4, 1e6, 1e8};
};

struct RatioResult {
  double ratio = 0.0;      // exact integral over asymptotic equivalent
  double tail_bound = 0.0; // neglected-window bound, relative to the ratio
  double window_lo = 0.0;
  double window_hi = 0.0;
  long long q_t = 0;
};

/// Ratio of the exact integral to the claimed equivalent at scale t, by
/// adaptive Simpson on the log-domain integrand over a saddle window; the
/// window is widened until the neglected tails are below 1e-6 of the main
/// term (error if the upper edge would pass 50).
RatioResult karamata_ratio(const AbelianCase& c, double t);
RatioResult karamata_regvar_ratio(const AbelianCase& c, double t);
RatioResult laplace_stieltjes_ratio(const AbelianCase& c, double t);

RatioResult evaluate(const AbelianCase& c, double t);

struct ReportRow {
  std::string lemma;
  double t = 0.0;
  long long q_t = 0;
  double ratio = 0.0;
  double tail_bound = 0.0;
};

std::vector<ReportRow> report(const AbelianCase& c);

} // namespace regenlab::abelian
