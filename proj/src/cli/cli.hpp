#pragma once

#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace gwi::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,
  kUsage = 64,
  kDataError = 65,
  kNumericalError = 70,
};

// Structured result of one command. Serialized with sorted keys so that
// identical inputs and seed give identical bytes apart from "timings".
struct RunReport {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();

  nlohmann::json to_json() const;
};

std::string version();

// Records wall-clock milliseconds for a named phase into report.timings.
class PhaseTimer {
 public:
  PhaseTimer(RunReport& report, std::string phase);
  ~PhaseTimer();
  PhaseTimer(const PhaseTimer&) = delete;
  PhaseTimer& operator=(const PhaseTimer&) = delete;

 private:
  RunReport& report_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

// Stores milliseconds elapsed since `start` as timings.total_ms.
void record_total(RunReport& report, std::chrono::steady_clock::time_point start);

// One row of the reproduction table.
struct Row {
  std::string metric;
  std::string target;  // empty for informational rows without a target
  std::string value;
  double tolerance = 0.0;
  bool informational = false;
  bool pass = true;
};

nlohmann::json to_json(const Row& row);
std::string to_csv(const std::vector<Row>& rows);
std::string to_markdown(const std::vector<Row>& rows);

// Fixed-precision formatting used throughout the reports.
std::string format_double(double x, int digits = 6);

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand bodies, called by run() after parsing.
struct ReproduceOptions {
  std::string format = "json";
  std::uint64_t seed = 42;
};
int reproduce(const ReproduceOptions& options, std::ostream& out, std::ostream& err);

}  // namespace gwi::cli
