#include "conelab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "conelab/error.hpp"

namespace conelab {

namespace {

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out))
    fail(ErrorCode::config, key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) fail(ErrorCode::config, key + ": expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(ErrorCode::config, key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
KeySpec str_key(const std::string& name, T RunConfig::*field) {
  return {name, [field](RunConfig& c, const std::string& v) { c.*field = v; },
          [field](const RunConfig& c) { return c.*field; }};
}

KeySpec dbl_key(const std::string& name, double RunConfig::*field) {
  return {name, [name, field](RunConfig& c, const std::string& v) { c.*field = to_double(name, v); },
          [field](const RunConfig& c) { return fmt(c.*field); }};
}

KeySpec int_key(const std::string& name, int RunConfig::*field) {
  return {name,
          [name, field](RunConfig& c, const std::string& v) {
            const long long x = to_int(name, v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              fail(ErrorCode::config, name + ": out of range");
            c.*field = static_cast<int>(x);
          },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeySpec bool_key(const std::string& name, bool RunConfig::*field) {
  return {name, [name, field](RunConfig& c, const std::string& v) { c.*field = to_bool(name, v); },
          [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      str_key("run.subcommand", &RunConfig::subcommand),
      str_key("run.output_dir", &RunConfig::output_dir),
      {"run.seed",
       [](RunConfig& c, const std::string& v) {
         const long long x = to_int("run.seed", v);
         if (x < 0) fail(ErrorCode::config, "run.seed: must be nonnegative");
         c.seed = static_cast<std::uint64_t>(x);
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      bool_key("run.svg", &RunConfig::svg),
      str_key("link.name", &RunConfig::link),
      str_key("link.file", &RunConfig::link_file),
      str_key("metric.preset", &RunConfig::preset),
      str_key("metric.file", &RunConfig::metric_file),
      str_key("metric.topology", &RunConfig::topology),
      str_key("metric.profile", &RunConfig::profile),
      dbl_key("metric.L", &RunConfig::L),
      dbl_key("metric.amplitude", &RunConfig::amplitude),
      dbl_key("metric.gamma", &RunConfig::gamma),
      dbl_key("metric.scale", &RunConfig::scale),
      int_key("grid.N", &RunConfig::N),
      dbl_key("grid.p", &RunConfig::p),
      str_key("entropy.sign", &RunConfig::sign),
      dbl_key("entropy.tau", &RunConfig::tau),
      bool_key("entropy.multistart", &RunConfig::multistart),
      dbl_key("entropy.tau_lo", &RunConfig::tau_lo),
      dbl_key("entropy.tau_hi", &RunConfig::tau_hi),
      int_key("entropy.tau_scan", &RunConfig::tau_scan),
      bool_key("entropy.fit_asymptotics", &RunConfig::fit_asymptotics),
      str_key("flow.normalization", &RunConfig::normalization),
      str_key("flow.reference", &RunConfig::reference),
      str_key("flow.entropy", &RunConfig::flow_entropy),
      dbl_key("flow.T", &RunConfig::T),
      dbl_key("flow.cfl", &RunConfig::cfl),
      dbl_key("flow.sample_period", &RunConfig::sample_period),
      dbl_key("flow.change_tol", &RunConfig::change_tol),
      dbl_key("flow.dt_max", &RunConfig::dt_max),
      dbl_key("flow.fixed_dt", &RunConfig::fixed_dt),
      dbl_key("flow.cone_drift_tol", &RunConfig::cone_drift_tol),
      int_key("heat.samples", &RunConfig::heat_samples),
      dbl_key("heat.t_lo", &RunConfig::heat_t_lo),
      dbl_key("heat.t_hi", &RunConfig::heat_t_hi),
      dbl_key("heat.x_lo", &RunConfig::heat_x_lo),
      dbl_key("heat.x_hi", &RunConfig::heat_x_hi),
      dbl_key("heat.series_tol", &RunConfig::series_tol),
      str_key("mapping.orders", &RunConfig::mapping_orders),
      dbl_key("mapping.t", &RunConfig::mapping_t),
      str_key("convergence.op", &RunConfig::convergence_op),
      int_key("convergence.refinements", &RunConfig::refinements),
      int_key("convergence.N0", &RunConfig::N0),
      dbl_key("tolerances.el", &RunConfig::tol_el),
      dbl_key("tolerances.constraint", &RunConfig::tol_constraint),
      dbl_key("tolerances.identity", &RunConfig::tol_identity),
      dbl_key("tolerances.mono", &RunConfig::tol_mono),
      dbl_key("tolerances.agreement", &RunConfig::tol_agreement),
      dbl_key("tolerances.heat", &RunConfig::tol_heat),
      dbl_key("tolerances.mass", &RunConfig::tol_mass),
      dbl_key("tolerances.exponent", &RunConfig::tol_exponent),
      dbl_key("tolerances.slope", &RunConfig::tol_slope),
      dbl_key("tolerances.normalization", &RunConfig::tol_normalization),
      dbl_key("tolerances.min_order", &RunConfig::min_order),
  };
  return table;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : key_table())
    if (k.name == key) return &k;
  return nullptr;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"link-check", "lambda",  "mu",      "nu",
                                             "flow",       "heat-check", "mapping", "convergence"};
  return s;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest_key(const std::string& key) {
  std::string best;
  std::size_t dist = std::numeric_limits<std::size_t>::max();
  const auto dot = key.find('.');
  const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
  for (const auto& k : key_table()) {
    std::size_t d = levenshtein(key, k.name);
    const std::string kleaf = k.name.substr(k.name.find('.') + 1);
    d = std::min(d, levenshtein(leaf, kleaf) + (dot == std::string::npos ? 0 : 1));
    if (d < dist) {
      dist = d;
      best = k.name;
    }
  }
  return best;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const KeySpec* k = find_key(key);
  if (!k) fail(ErrorCode::config, "unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  k->set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const KeySpec* k = find_key(key);
  if (!k) fail(ErrorCode::config, "unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  return k->get(cfg);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::vector<std::string> unknown;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::config, where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::config, where + ": expected 'key = value'");
    const std::string leaf = trim(line.substr(0, eq));
    if (leaf.empty()) fail(ErrorCode::config, where + ": empty key");
    const std::string key = section.empty() ? leaf : section + "." + leaf;
    if (!find_key(key)) {
      unknown.push_back("'" + key + "' at " + where + " (did you mean '" + nearest_key(key) + "'?)");
      continue;
    }
    if (seen[key]++) fail(ErrorCode::config, where + ": key '" + key + "' given twice");
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorCode::config, where + ": " + e.what());
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown configuration key";
    msg += unknown.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? "; " : "") + unknown[i];
    fail(ErrorCode::config, msg);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

void finalize_config(RunConfig& c) {
  auto bad = [](const std::string& m) { fail(ErrorCode::config, m); };
  if (c.subcommand.empty()) bad("missing required field run.subcommand (one of link-check, lambda, mu, nu, flow, heat-check, mapping, convergence)");
  if (std::find(subcommands().begin(), subcommands().end(), c.subcommand) == subcommands().end())
    bad("unknown subcommand '" + c.subcommand + "'");
  if (!c.preset.empty() && !c.metric_file.empty()) bad("metric.preset and metric.file are mutually exclusive");
  if (!c.link_file.empty() && !c.link.empty()) bad("link.name and link.file are mutually exclusive");
  if (c.link.empty() && c.link_file.empty()) c.link = "S3";
  if (c.preset.empty() && c.metric_file.empty()) c.preset = "sphere_suspension";
  if (c.output_dir.empty()) bad("run.output_dir must not be empty");
  if (c.N < 8) bad("grid.N must be at least 8");
  if (!(c.p >= 1.0)) bad("grid.p must be >= 1");
  if (c.L < 0.0) bad("metric.L must be >= 0 (0 selects the preset length)");
  if (!(c.scale > 0.0)) bad("metric.scale must be positive");
  if (!(c.gamma > 0.0)) bad("metric.gamma must be positive");
  if (!one_of(c.sign, {"minus", "plus"})) bad("entropy.sign must be minus or plus");
  if (!one_of(c.profile, {"", "linear", "bilinear", "sine"})) bad("metric.profile must be linear, bilinear or sine");
  if (!one_of(c.topology, {"two_cones", "cone_and_cap", "cone_and_boundary"}))
    bad("metric.topology must be two_cones, cone_and_cap or cone_and_boundary");
  if (!(c.tau > 0.0)) bad("entropy.tau must be positive");
  if (!(c.tau_lo > 0.0 && c.tau_hi > c.tau_lo)) bad("entropy.tau_lo < entropy.tau_hi, both positive");
  if (c.tau_scan < 5) bad("entropy.tau_scan must be at least 5");
  if (!one_of(c.normalization, {"steady", "shrink", "expand"})) bad("flow.normalization must be steady, shrink or expand");
  if (!one_of(c.flow_entropy, {"auto", "none", "lambda", "mu_minus", "mu_plus"}))
    bad("flow.entropy must be auto, none, lambda, mu_minus or mu_plus");
  if (!(c.T > 0.0)) bad("flow.T must be positive");
  if (!(c.cfl > 0.0 && c.cfl < 1.0)) bad("flow.cfl must lie in (0, 1)");
  if (c.sample_period < 0.0 || c.dt_max < 0.0 || c.fixed_dt < 0.0) bad("flow step settings must be >= 0");
  if (!(c.change_tol > 0.0) || !(c.cone_drift_tol > 0.0)) bad("flow tolerances must be positive");
  if (c.heat_samples < 1) bad("heat.samples must be positive");
  if (!(c.heat_t_lo > 0.0 && c.heat_t_hi >= c.heat_t_lo)) bad("heat.t_lo <= heat.t_hi, both positive");
  if (!(c.heat_x_lo > 0.0 && c.heat_x_hi >= c.heat_x_lo)) bad("heat.x_lo <= heat.x_hi, both positive");
  if (!(c.series_tol > 0.0 && c.series_tol < 1.0)) bad("heat.series_tol must lie in (0, 1)");
  if (!(c.mapping_t > 0.0)) bad("mapping.t must be positive");
  if (!one_of(c.convergence_op, {"lambda", "mu", "nu"})) bad("convergence.op must be lambda, mu or nu");
  if (c.refinements < 3) bad("convergence.refinements must be at least 3");
  if (c.N0 < 8) bad("convergence.N0 must be at least 8");
  for (double t : {c.tol_el, c.tol_constraint, c.tol_identity, c.tol_mono, c.tol_agreement, c.tol_heat, c.tol_mass,
                   c.tol_exponent, c.tol_slope, c.tol_normalization})
    if (!(t > 0.0)) bad("all tolerances must be positive");
}

std::string effective_config_text(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : key_table()) {
    const auto dot = k.name.find('.');
    const std::string s = k.name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << "\n";
      out << "[" << s << "]\n";
      section = s;
    }
    out << k.name.substr(dot + 1) << " = " << k.get(cfg) << "\n";
  }
  return out.str();
}

}  // namespace conelab
