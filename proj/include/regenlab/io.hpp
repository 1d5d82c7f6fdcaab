#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regenlab/stats.hpp"

namespace regenlab::io {

/// Shortest round-trip decimal form of x (std::to_chars), so identical
/// numbers always serialize to identical bytes.
std::string format_double(double x);

/// Write content to path via a temp file + rename, creating directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Replication table as CSV with a #-prefixed metadata header line.
std::string replication_table_csv(const stats::ReplicationTable& table,
                                  const std::string& meta);

/// Ratio report as CSV, columns (scale, label, statistic, ratio, target, flag).
std::string ratio_report_csv(const stats::RatioReport& report, const std::string& meta);

/// Abelian rows as CSV, columns (lemma, t, q_t, ratio, tail_bound).
struct AbelianCsvRow {
  std::string lemma;
  double t;
  long long q_t;
  double ratio;
  double tail_bound;
};
std::string abelian_report_csv(const std::vector<AbelianCsvRow>& rows,
                               const std::string& meta);

/// TestReport as a JSON object (no timestamps; reports must be rerun-stable).
std::string test_report_json(const stats::TestReport& report);
std::string test_reports_json(const std::vector<stats::TestReport>& reports);

std::string iso8601_utc_now();

} // namespace regenlab::io
