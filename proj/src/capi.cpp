#include "conelab/conelab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "conelab/config.hpp"
#include "conelab/entropy.hpp"
#include "conelab/heat.hpp"
#include "conelab/run.hpp"

struct cl_config {
  conelab::RunConfig cfg;
};

struct cl_result {
  conelab::RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

cl_status to_status(conelab::ErrorCode c) { return static_cast<cl_status>(static_cast<int>(c) + 1); }

template <class F>
cl_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return CL_OK;
  } catch (const conelab::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return CL_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) conelab::fail(conelab::ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

conelab::RadialMetric preset_metric(const char* preset, const char* link, int N, double p, double scale) {
  need(preset, "preset");
  need(link, "link");
  conelab::PresetSpec s;
  s.name = preset;
  s.N = N;
  s.p = p;
  s.scale = scale;
  return conelab::make_preset(s, conelab::resolve_link(link));
}

conelab::EntropyOptions quiet_options() {
  conelab::EntropyOptions o;
  o.multistart = false;
  o.fit_asymptotics = false;
  return o;
}

}  // namespace

extern "C" {

const char* cl_version(void) { return CONELAB_VERSION; }

const char* cl_status_name(cl_status status) {
  if (status == CL_OK) return "ok";
  const int c = static_cast<int>(status) - 1;
  if (c < 0 || c > static_cast<int>(conelab::ErrorCode::internal)) return "unknown";
  return conelab::to_string(static_cast<conelab::ErrorCode>(c));
}

const char* cl_last_error(void) { return last_error.c_str(); }

void cl_string_free(char* s) { std::free(s); }

size_t cl_subcommand_count(void) { return conelab::subcommands().size(); }

const char* cl_subcommand_name(size_t index) {
  const auto& s = conelab::subcommands();
  return index < s.size() ? s[index].c_str() : nullptr;
}

size_t cl_config_key_count(void) { return conelab::config_keys().size(); }

const char* cl_config_key_name(size_t index) {
  static const std::vector<std::string> keys = conelab::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

char* cl_config_nearest_key(const char* key) { return key ? dup(conelab::nearest_key(key)) : nullptr; }

cl_status cl_config_new(const char* subcommand, cl_config** out) {
  return guarded([&] {
    need(out, "out");
    auto c = std::make_unique<cl_config>();
    if (subcommand) c->cfg.subcommand = subcommand;
    *out = c.release();
  });
}

cl_status cl_config_from_file(const char* path, cl_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto c = std::make_unique<cl_config>();
    c->cfg = conelab::parse_config_file(path);
    *out = c.release();
  });
}

cl_status cl_config_from_string(const char* text, cl_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    auto c = std::make_unique<cl_config>();
    c->cfg = conelab::parse_config_text(text);
    *out = c.release();
  });
}

cl_status cl_config_set(cl_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    conelab::set_config_value(cfg->cfg, key, value);
  });
}

cl_status cl_config_get(const cl_config* cfg, const char* key, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(out, "out");
    *out = dup(conelab::get_config_value(cfg->cfg, key));
  });
}

cl_status cl_config_effective(const cl_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    conelab::RunConfig c = cfg->cfg;
    conelab::finalize_config(c);
    *out = dup(conelab::effective_config_text(c));
  });
}

void cl_config_free(cl_config* cfg) { delete cfg; }

cl_status cl_run(const cl_config* cfg, cl_result** out) {
  const cl_status st = guarded([&] {
    need(cfg, "config");
    need(out, "out");
    auto r = std::make_unique<cl_result>();
    r->outcome = conelab::run(cfg->cfg);
    *out = r.release();
  });
  if (st != CL_OK) return st;
  if (!(*out)->outcome.error) return CL_OK;
  last_error = (*out)->outcome.message;
  return to_status(*(*out)->outcome.error);
}

int cl_result_exit_code(const cl_result* r) { return r ? r->outcome.exit_code : 1; }
const char* cl_result_status(const cl_result* r) { return r ? r->outcome.status.c_str() : "error"; }
const char* cl_result_message(const cl_result* r) { return r ? r->outcome.message.c_str() : ""; }
const char* cl_result_report_path(const cl_result* r) { return r ? r->outcome.report_path.c_str() : ""; }
void cl_result_free(cl_result* r) { delete r; }

cl_status cl_lambda(const char* preset, const char* link, int N, double p, double scale, double* value) {
  return guarded([&] {
    need(value, "value");
    *value = conelab::compute_lambda(preset_metric(preset, link, N, p, scale), quiet_options()).value;
  });
}

cl_status cl_mu(const char* preset, const char* link, int N, double p, double tau, int plus, double* value) {
  return guarded([&] {
    need(value, "value");
    const auto s = plus ? conelab::Sign::plus : conelab::Sign::minus;
    *value = conelab::compute_mu(preset_metric(preset, link, N, p, 1.0), tau, s, quiet_options()).value;
  });
}

cl_status cl_nu(const char* preset, const char* link, int N, double p, int plus, double* value, double* tau) {
  return guarded([&] {
    need(value, "value");
    const auto s = plus ? conelab::Sign::plus : conelab::Sign::minus;
    const auto r = conelab::compute_nu(preset_metric(preset, link, N, p, 1.0), s, quiet_options());
    *value = r.value;
    if (tau) *tau = r.tau.value_or(0.0);
  });
}

cl_status cl_circle_cone_kernel(double t, double x, double x_tilde, double phi, double* value) {
  return guarded([&] {
    need(value, "value");
    *value = conelab::circle_cone_kernel(t, x, x_tilde, phi);
  });
}

cl_status cl_radial_cone_kernel(const char* link, double t, double x, double x_tilde, double* value) {
  return guarded([&] {
    need(link, "link");
    need(value, "value");
    *value = conelab::radial_cone_kernel(conelab::resolve_link(link), t, x, x_tilde);
  });
}

}  // extern "C"
