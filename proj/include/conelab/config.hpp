#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conelab {

/// Everything a run needs. Sections of the config file map onto the field groups.
struct RunConfig {
  std::string subcommand;  // link-check, lambda, mu, nu, flow, heat-check, mapping, convergence

  // [run]
  std::string output_dir = "conelab_out";
  std::uint64_t seed = 12345;
  bool svg = true;

  // [link]
  std::string link;  // empty: S3 unless link_file is set
  std::string link_file;

  // [metric]
  std::string preset;  // empty: sphere_suspension unless metric_file is set
  std::string metric_file;
  std::string topology = "cone_and_cap";  // only read with metric_file
  std::string profile;                    // empty: preset default
  double L = 0.0;
  double amplitude = 0.1;
  double gamma = 2.0;
  double scale = 1.0;

  // [grid]
  int N = 2000;
  double p = 2.0;

  // [entropy]
  std::string sign = "minus";
  double tau = 0.5;
  bool multistart = true;
  double tau_lo = 1e-3;
  double tau_hi = 1e3;
  int tau_scan = 25;
  bool fit_asymptotics = true;

  // [flow]
  std::string normalization = "steady";
  std::string reference = "initial";
  std::string flow_entropy = "auto";
  double T = 0.1;
  double cfl = 0.5;
  double sample_period = 0.0;
  double change_tol = 2e-3;
  double dt_max = 0.0;
  double fixed_dt = 0.0;
  double cone_drift_tol = 1e-3;

  // [heat]
  int heat_samples = 100;
  double heat_t_lo = 0.01;
  double heat_t_hi = 1.0;
  double heat_x_lo = 0.1;
  double heat_x_hi = 2.0;
  double series_tol = 1e-14;

  // [mapping]
  std::string mapping_orders = "1,2,2.5,3";
  double mapping_t = 0.25;

  // [convergence]
  std::string convergence_op = "lambda";
  int refinements = 4;
  int N0 = 250;

  // [tolerances]
  double tol_el = 1e-8;
  double tol_constraint = 1e-12;
  double tol_identity = 1e-12;
  double tol_mono = 1e-7;
  double tol_agreement = 1e-6;
  double tol_heat = 1e-8;
  double tol_mass = 1e-8;
  double tol_exponent = 0.1;
  double tol_slope = 0.15;
  double tol_normalization = 1e-5;
  double min_order = 1.8;
};

const std::vector<std::string>& subcommands();

/// All valid "section.key" names in declaration order.
std::vector<std::string> config_keys();

/// Sets one "section.key" from text. Throws config errors on unknown keys or bad values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses INI text ("[section]" headers, "key = value", '#' or ';' comments).
/// All unknown keys are collected and reported together with the nearest valid key.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config_file(const std::string& path);

/// Checks ranges and cross-field conflicts, then fills derived defaults.
/// Throws config errors.
void finalize_config(RunConfig& cfg);

/// INI text with every key, suitable for re-parsing.
std::string effective_config_text(const RunConfig& cfg);

/// Edit distance used for "did you mean" suggestions.
std::size_t levenshtein(const std::string& a, const std::string& b);
std::string nearest_key(const std::string& key);

}  // namespace conelab
