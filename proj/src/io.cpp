#include "regenlab/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace regenlab::io {

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string replication_table_csv(const stats::ReplicationTable& table,
                                  const std::string& meta) {
  std::string out = "# " + meta + "\n";
  out += "rep,seed";
  for (long long level : table.levels) out += ",k_r" + std::to_string(level);
  out += ",i_alpha,overflow\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out += std::to_string(i) + "," + std::to_string(row.seed);
    for (long long c : row.counts) out += "," + std::to_string(c);
    out += "," + format_double(row.i_alpha) + "," + std::to_string(row.overflow) + "\n";
  }
  return out;
}

std::string ratio_report_csv(const stats::RatioReport& report, const std::string& meta) {
  std::string out = "# " + meta + " i_alpha=" + format_double(report.i_alpha) + "\n";
  out += "scale,label,statistic,ratio,target,flag\n";
  for (const auto& row : report.rows) {
    out += format_double(row.scale) + "," + row.label + "," +
           format_double(row.statistic) + "," + format_double(row.ratio) + "," +
           format_double(row.target) + "," + row.flag + "\n";
  }
  return out;
}

std::string abelian_report_csv(const std::vector<AbelianCsvRow>& rows,
                               const std::string& meta) {
  std::string out = "# " + meta + "\n";
  out += "lemma,t,q_t,ratio,tail_bound\n";
  for (const auto& row : rows) {
    out += row.lemma + "," + format_double(row.t) + "," + std::to_string(row.q_t) + "," +
           format_double(row.ratio) + "," + format_double(row.tail_bound) + "\n";
  }
  return out;
}

namespace {

nlohmann::json report_to_json(const stats::TestReport& report) {
  nlohmann::json j;
  j["test"] = report.name;
  j["statistic"] = report.statistic;
  j["p_value"] = report.p_value;
  j["pass"] = report.pass;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : report.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  return j;
}

} // namespace

std::string test_report_json(const stats::TestReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string test_reports_json(const std::vector<stats::TestReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

} // namespace regenlab::io
