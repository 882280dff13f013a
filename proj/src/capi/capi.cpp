#include "koopflow/koopflow.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "core/error.hpp"
#include "harness/experiment.hpp"
#include "harness/scenario.hpp"

// A handle wraps a validated RunConfig; canonical JSON is regenerated from it
// on demand, so the setters, files, and dumps all share one vocabulary.
struct kf_config {
  koopflow::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

kf_status status_of(koopflow::ErrorCode code) {
  using koopflow::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
      return KF_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config:
      return KF_ERR_CONFIG;
    case ErrorCode::Simulation:
      return KF_ERR_SIMULATION;
    case ErrorCode::Fit:
      return KF_ERR_FIT;
    case ErrorCode::Io:
      return KF_ERR_IO;
  }
  return KF_ERR_INTERNAL;
}

// No exception crosses the C boundary; success clears the thread's message.
template <typename Fn>
kf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return KF_OK;
  } catch (const koopflow::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return KF_ERR_INTERNAL;
  }
}

kf_status fail_null(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return KF_ERR_INVALID_ARGUMENT;
}

// One key = value update, round-tripped through the strict JSON parser so the
// setters accept exactly what a config file accepts and stay all-or-nothing.
void apply(koopflow::RunConfig& cfg, const std::string& key, nlohmann::json value) {
  nlohmann::json j = koopflow::to_json(cfg);
  j[key] = std::move(value);
  cfg = koopflow::config_from_json(j);
}

nlohmann::json coerce_string(const std::string& key, const char* value) {
  if (key == "models") {
    // Comma-separated list; names are validated by the config parser.
    nlohmann::json arr = nlohmann::json::array();
    std::istringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) arr.push_back(item);
    return arr;
  }
  return std::string(value);
}

}  // namespace

extern "C" {

const char* kf_version(void) { return KF_VERSION_STRING; }

const char* kf_last_error(void) { return g_last_error.c_str(); }

kf_status kf_config_create(const char* case_name, kf_config** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!case_name) return fail_null("case_name");
  return guarded([&] {
    koopflow::RunConfig cfg;
    cfg.case_name = koopflow::case_from_string(case_name);
    cfg.validate();
    *out = new kf_config{std::move(cfg)};
  });
}

kf_status kf_config_load(const char* path, kf_config** out) {
  if (!out) return fail_null("out");
  *out = nullptr;
  if (!path) return fail_null("path");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in.good())
      throw koopflow::Error(koopflow::ErrorCode::Config,
                            std::string("cannot read config file ") + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw koopflow::Error(koopflow::ErrorCode::Config,
                            std::string("malformed config JSON: ") + e.what());
    }
    *out = new kf_config{koopflow::config_from_json(j)};
  });
}

kf_status kf_config_set_int(kf_config* cfg, const char* key, int value) {
  if (!cfg) return fail_null("cfg");
  if (!key) return fail_null("key");
  return guarded([&] { apply(cfg->cfg, key, value); });
}

kf_status kf_config_set_double(kf_config* cfg, const char* key, double value) {
  if (!cfg) return fail_null("cfg");
  if (!key) return fail_null("key");
  return guarded([&] { apply(cfg->cfg, key, value); });
}

kf_status kf_config_set_string(kf_config* cfg, const char* key, const char* value) {
  if (!cfg) return fail_null("cfg");
  if (!key) return fail_null("key");
  if (!value) return fail_null("value");
  return guarded([&] { apply(cfg->cfg, key, coerce_string(key, value)); });
}

kf_status kf_config_dump(const kf_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return fail_null("cfg");
  if (!needed) return fail_null("needed");
  return guarded([&] {
    const std::string text = koopflow::to_json(cfg->cfg).dump();
    *needed = text.size() + 1;
    if (buf && cap >= *needed) std::memcpy(buf, text.c_str(), *needed);
  });
}

void kf_config_destroy(kf_config* cfg) { delete cfg; }

kf_status kf_run_case(const kf_config* cfg) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] { koopflow::run_experiment(cfg->cfg); });
}

kf_status kf_stage_simulate(const kf_config* cfg) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] { koopflow::stage_simulate(cfg->cfg); });
}

kf_status kf_stage_fit(const kf_config* cfg) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] { koopflow::stage_fit(cfg->cfg); });
}

kf_status kf_stage_evaluate(const kf_config* cfg) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] { koopflow::stage_evaluate(cfg->cfg); });
}

}  // extern "C"
