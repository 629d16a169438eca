#include <cmath>
#include <cstdio>
#include <sstream>

#include "cli.hpp"

namespace gwi::cli {

std::string version() { return GWI_VERSION; }

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["timings"] = timings;
  j["version"] = version();
  return j;
}

PhaseTimer::PhaseTimer(RunReport& report, std::string phase)
    : report_(report), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}

PhaseTimer::~PhaseTimer() {
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  report_.timings[phase_ + "_ms"] = std::round(ms * 1000.0) / 1000.0;
}

void record_total(RunReport& report, std::chrono::steady_clock::time_point start) {
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report.timings["total_ms"] = std::round(ms * 1000.0) / 1000.0;
}

std::string format_double(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);
  return s;
}

nlohmann::json to_json(const Row& row) {
  nlohmann::json j;
  j["metric"] = row.metric;
  j["target"] = row.target.empty() ? nlohmann::json(nullptr) : nlohmann::json(row.target);
  j["value"] = row.value;
  j["tolerance"] = row.tolerance;
  j["informational"] = row.informational;
  j["pass"] = row.pass;
  return j;
}

namespace {

std::string status(const Row& r) {
  if (r.informational) return "info";
  return r.pass ? "pass" : "FAIL";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string tolerance_text(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

std::string to_csv(const std::vector<Row>& rows) {
  std::string s = "metric,target,value,tolerance,status\r\n";
  for (const Row& r : rows) {
    s += csv_field(r.metric) + ',' + csv_field(r.target) + ',' + csv_field(r.value) + ',' +
         (r.informational ? "" : tolerance_text(r.tolerance)) + ',' + status(r) + "\r\n";
  }
  return s;
}

std::string to_markdown(const std::vector<Row>& rows) {
  std::string s = "| metric | target | value | tolerance | status |\n|---|---|---|---|---|\n";
  for (const Row& r : rows) {
    std::string metric = r.metric;
    for (std::size_t p = 0; (p = metric.find('|', p)) != std::string::npos; p += 2) metric.replace(p, 1, "\\|");
    s += "| " + metric + " | " + (r.target.empty() ? "-" : r.target) + " | " + r.value + " | " +
         (r.informational ? "-" : tolerance_text(r.tolerance)) + " | " + status(r) + " |\n";
  }
  return s;
}

}  // namespace gwi::cli
