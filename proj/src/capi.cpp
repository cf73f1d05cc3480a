#include "exchangeq.h"

#include <new>
#include <string>

#include "exq/error.hpp"
#include "exq/scenario.hpp"

using exq::Error;
using exq::ErrorCode;

struct xq_scenario {
  exq::scenario::Scenario scenario;
};

struct xq_report {
  std::string json;
  std::string text;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_pointer;

int set_error(const Error& e) {
  g_last_error = e.what();
  g_last_pointer = e.pointer();
  return exq::cli_exit_code(e.code());
}

int set_error(const std::exception& e) {
  g_last_error = e.what();
  g_last_pointer.clear();
  return XQ_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return set_error(e);
  } catch (const std::bad_alloc& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    return set_error(e);
  }
}

xq_report* make_report(std::string json, std::string text) {
  auto* r = new xq_report;
  r->json = std::move(json);
  r->text = std::move(text);
  return r;
}

} // namespace

extern "C" {

const char* xq_version(void) { return exq::scenario::kToolVersion; }

const char* xq_last_error(void) { return g_last_error.c_str(); }

const char* xq_last_error_pointer(void) { return g_last_pointer.c_str(); }

int xq_scenario_load(const char* config_path, xq_scenario** out) {
  if (config_path == nullptr || out == nullptr) return XQ_ERR_SCHEMA;
  *out = nullptr;
  return guarded([&] {
    auto scenario = exq::scenario::load_file(config_path);
    *out = new xq_scenario{std::move(scenario)};
    return XQ_OK;
  });
}

int xq_scenario_load_string(const char* config_json, xq_scenario** out) {
  if (config_json == nullptr || out == nullptr) return XQ_ERR_SCHEMA;
  *out = nullptr;
  return guarded([&] {
    auto scenario = exq::scenario::load_string(config_json);
    *out = new xq_scenario{std::move(scenario)};
    return XQ_OK;
  });
}

void xq_scenario_free(xq_scenario* scenario) { delete scenario; }

int xq_validate(const char* config_path, xq_report** out_report) {
  if (config_path == nullptr || out_report == nullptr) return XQ_ERR_SCHEMA;
  *out_report = nullptr;
  return guarded([&] {
    const auto report = exq::scenario::validate_file(config_path);
    *out_report = make_report(report.to_json().dump(2), report.text());
    return report.ok ? XQ_OK : XQ_ERR_VALIDATION;
  });
}

int xq_scenario_run(const xq_scenario* scenario, int threads, xq_report** out_report) {
  if (scenario == nullptr || out_report == nullptr || threads < 1) return XQ_ERR_SCHEMA;
  *out_report = nullptr;
  return guarded([&] {
    exq::scenario::RunOptions options;
    options.threads = threads;
    const auto report = exq::scenario::run(scenario->scenario, options);
    *out_report = make_report(report.dump(2), report.dump(2));
    return XQ_OK;
  });
}

int xq_run_file(const char* config_path, const char* output_path, int threads) {
  if (config_path == nullptr || output_path == nullptr || threads < 1) return XQ_ERR_SCHEMA;
  return guarded([&] {
    const auto scenario = exq::scenario::load_file(config_path);
    exq::scenario::RunOptions options;
    options.threads = threads;
    const auto report = exq::scenario::run(scenario, options);
    exq::scenario::write_report(report, output_path);
    return XQ_OK;
  });
}

const char* xq_report_json(const xq_report* report) {
  return report == nullptr ? "" : report->json.c_str();
}

const char* xq_report_text(const xq_report* report) {
  return report == nullptr ? "" : report->text.c_str();
}

void xq_report_free(xq_report* report) { delete report; }

} // extern "C"
