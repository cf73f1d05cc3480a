// exchangeq CLI: validates scenario configs and runs their queries. Talks to
// the library exclusively through the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "exchangeq.h"

namespace {

int log_rank(const std::string& level) {
  if (level == "error") return 0;
  if (level == "warn") return 1;
  if (level == "info") return 2;
  if (level == "debug") return 3;
  return 2;
}

struct Logger {
  int rank = 2;
  void info(const std::string& msg) const {
    if (rank >= 2) std::fprintf(stderr, "[exchangeq] %s\n", msg.c_str());
  }
  void error(const std::string& msg) const {
    if (rank >= 0) std::fprintf(stderr, "[exchangeq] error: %s\n", msg.c_str());
  }
};

void print_failure(const Logger& log) {
  std::string message = xq_last_error();
  const std::string pointer = xq_last_error_pointer();
  if (!pointer.empty()) message += " [pointer: " + pointer + "]";
  log.error(message);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exchange-q scenario runner"};
  app.require_subcommand(1);

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "error|warn|info|debug")->capture_default_str();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a scenario config without inference");
  validate->add_option("file", validate_path, "scenario JSON file")->required();

  std::string run_path;
  std::string output_path;
  int threads = 1;
  auto* run = app.add_subcommand("run", "run a scenario and write the report");
  run->add_option("file", run_path, "scenario JSON file")->required();
  run->add_option("-o,--output", output_path, "report output file")->required();
  run->add_option("--threads", threads, "worker threads (never changes the numbers)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  Logger log{log_rank(log_level)};

  if (validate->parsed()) {
    xq_report* report = nullptr;
    const int rc = xq_validate(validate_path.c_str(), &report);
    if (report != nullptr) {
      std::fputs(xq_report_text(report), stdout);
      xq_report_free(report);
    } else {
      print_failure(log);
    }
    return rc;
  }

  log.info("loading " + run_path);
  xq_scenario* scenario = nullptr;
  int rc = xq_scenario_load(run_path.c_str(), &scenario);
  if (rc != XQ_OK) {
    print_failure(log);
    return rc;
  }

  xq_report* report = nullptr;
  rc = xq_scenario_run(scenario, threads, &report);
  xq_scenario_free(scenario);
  if (rc != XQ_OK) {
    print_failure(log);
    return rc;
  }

  FILE* out = std::fopen(output_path.c_str(), "w");
  if (out == nullptr) {
    log.error("cannot write " + output_path);
    xq_report_free(report);
    return XQ_ERR_SCHEMA;
  }
  std::fputs(xq_report_json(report), out);
  std::fputc('\n', out);
  std::fclose(out);
  xq_report_free(report);
  log.info("report written to " + output_path);
  return 0;
}
