#include "conelab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "conelab/flow.hpp"
#include "conelab/heat.hpp"
#include "conelab/report.hpp"
#include "conelab/spectral.hpp"

namespace conelab {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Check {
  std::string name;
  double value;
  double bound;
  bool pass;
  std::string relation;  // "<", "<=", ">=", "=="
};

struct Context {
  Context(const RunConfig& c, fs::path d) : cfg(c), dir(std::move(d)) {}
  const RunConfig& cfg;
  fs::path dir;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;
  json result = json::object();
  json grid = nullptr;

  void below(const std::string& name, double v, double bound) {
    checks.push_back({name, v, bound, std::isfinite(v) && v < bound, "<"});
  }
  void at_most(const std::string& name, double v, double bound) {
    checks.push_back({name, v, bound, std::isfinite(v) && v <= bound, "<="});
  }
  void at_least(const std::string& name, double v, double bound) {
    checks.push_back({name, v, bound, std::isfinite(v) && v >= bound, ">="});
  }
  void flag(const std::string& name, bool ok) { checks.push_back({name, ok ? 1.0 : 0.0, 1.0, ok, "=="}); }

  void csv(const std::string& file, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    report::write_csv(dir / file, header, rows);
    artifacts.push_back(file);
  }
  void svg(const std::string& file, const report::ChartSpec& spec, const std::vector<report::Series>& series) {
    if (!cfg.svg) return;
    report::write_text(dir / file, report::svg_line_chart(spec, series));
    artifacts.push_back(file);
  }
  void add_warnings(const std::vector<std::string>& w) { warnings.insert(warnings.end(), w.begin(), w.end()); }
};

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json grid_json(const RadialMetric& g) {
  return json{{"N", g.grid.N},
              {"p", g.grid.p},
              {"L", g.grid.L},
              {"x1", g.grid.x.front()},
              {"n", g.n()},
              {"profile", to_string(g.profile)},
              {"topology", to_string(g.topology)},
              {"gamma", jnum(g.gamma)}};
}

json fit_json(const AsymptoticFit& f) {
  return json{{"c0", f.c0},
              {"c1", f.c1},
              {"exponent", jnum(f.exponent)},
              {"residual", f.residual},
              {"log_c0", f.log_c0},
              {"log_c1", f.log_c1},
              {"log_residual", f.log_residual},
              {"log_suspected", f.log_suspected},
              {"points", f.points},
              {"x_lo", f.x_lo},
              {"x_hi", f.x_hi}};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorCode::config, "mapping.orders: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::config, "mapping.orders is empty");
  return out;
}

RadialMetric metric_at(const RunConfig& cfg, const LinkData& link, int N) {
  RunConfig c = cfg;
  c.N = N;
  return build_metric(c, link);
}

void entropy_checks(Context& ctx, const EntropyReport& r, const RadialMetric& g, const std::string& prefix) {
  ctx.below(prefix + "el_residual", r.el_residual, ctx.cfg.tol_el);
  ctx.below(prefix + "constraint_residual", r.constraint_residual, ctx.cfg.tol_constraint);
  ctx.below(prefix + "self_consistency", r.self_consistency, std::max(1e-9, 1e-9 * std::abs(r.value)));
  for (const auto& s : r.starts)
    if (!s.converged) ctx.warnings.push_back(prefix + "start '" + s.start + "' did not converge");
  if (r.tau && r.kind != EntropyKind::lambda) {
    // W_+ - W_- = -2 (4 pi tau)^{-m/2} int (f - m) e^{-f} dV, evaluated on the f field
    const double tau = *r.tau;
    const int m = g.m();
    const auto w = volume_weights(g);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (r.f.values[i] - m) * std::exp(-r.f.values[i]);
    const double algebraic = -2.0 * std::pow(4.0 * std::numbers::pi * tau, -0.5 * m) * s;
    const double diff = evaluate_w(g, r.omega, tau, Sign::plus) - evaluate_w(g, r.omega, tau, Sign::minus);
    ctx.below(prefix + "w_identity", std::abs(diff - algebraic), ctx.cfg.tol_identity * std::max(1.0, std::abs(algebraic)));
  }
}

json entropy_json(const EntropyReport& r) {
  json j{{"kind", to_string(r.kind)},
         {"value", r.value},
         {"tau", r.tau ? json(*r.tau) : json(nullptr)},
         {"el_residual", r.el_residual},
         {"constraint_residual", r.constraint_residual},
         {"self_consistency", r.self_consistency},
         {"iterations", r.iterations},
         {"nonconvex", r.nonconvex}};
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"start", s.start}, {"value", s.value}, {"el_residual", s.el_residual}, {"converged", s.converged}});
  j["starts"] = starts;
  if (r.has_asymptotics) j["asymptotics"] = fit_json(r.asymptotics);
  if (r.normalization_checked)
    j["normalization"] = {{"lhs", r.normalization_lhs},
                          {"target", r.normalization_target},
                          {"difference", std::abs(r.normalization_lhs - r.normalization_target)}};
  return j;
}

void write_minimizer(Context& ctx, const RadialMetric& g, const EntropyReport& r, const std::string& stem) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < g.grid.size(); ++i) rows.push_back({g.grid.x[i], r.omega.values[i], r.f.values[i]});
  ctx.csv(stem + "_minimizer.csv", {"x", "omega", "f"}, rows);
  ctx.svg(stem + "_minimizer.svg", {"minimizer " + stem, "x", "omega", false, false},
          {{"omega", g.grid.x, r.omega.values}});
}

void cmd_link_check(Context& ctx, const LinkData& link) {
  json j{{"name", link.name},
         {"n", link.n},
         {"scal_F", link.scal_F},
         {"vol_F", link.vol_F},
         {"complete_up_to", link.complete_up_to},
         {"lambda1", jnum(link.lambda1())},
         {"has_tt_spectrum", link.einstein_tt_spectrum.has_value()}};
  const Stability s = check_tangential_stability(link);
  j["tangential_stability"] = to_string(s);
  j["admissibility_gap"] = check_admissibility_gap(link);
  if (s == Stability::undecidable) ctx.warnings.push_back("no Einstein TT spectrum supplied: stability undecidable");
  const IndicialData ind = indicial_exponents(link, ctx.cfg.gamma);
  json rows = json::array();
  std::vector<std::vector<double>> csv;
  for (const auto& r : ind.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"multiplicity", r.multiplicity},
                    {"nu", r.nu},
                    {"mu_plus", r.mu_plus},
                    {"mu_minus", r.mu_minus},
                    {"in_window", r.in_window}});
    csv.push_back({r.lambda, static_cast<double>(r.multiplicity), r.nu, r.mu_plus, r.mu_minus, r.in_window ? 1.0 : 0.0});
  }
  j["indicial"] = {{"gamma", ind.gamma},
                   {"gamma_bar", ind.gamma_bar},
                   {"essentially_self_adjoint", ind.essentially_self_adjoint},
                   {"rows", rows}};
  ctx.csv("indicial.csv", {"lambda", "multiplicity", "nu", "mu_plus", "mu_minus", "in_window"}, csv);
  ctx.below("nu0_exact", std::abs(indicial_nu(link.n, 0.0) - 0.5 * (link.n - 1)), 1e-300);
  ctx.result = j;
}

void cmd_lambda(Context& ctx, const RadialMetric& g) {
  const EntropyReport r = compute_lambda(g, entropy_options(ctx.cfg));
  entropy_checks(ctx, r, g, "");
  ctx.add_warnings(r.warnings);
  ctx.result = entropy_json(r);
  write_minimizer(ctx, g, r, "lambda");
}

void cmd_mu(Context& ctx, const RadialMetric& g) {
  const Sign s = sign_from_string(ctx.cfg.sign);
  const EntropyReport r = compute_mu(g, ctx.cfg.tau, s, entropy_options(ctx.cfg));
  entropy_checks(ctx, r, g, "");
  ctx.add_warnings(r.warnings);
  ctx.result = entropy_json(r);
  write_minimizer(ctx, g, r, "mu");
}

void cmd_nu(Context& ctx, const RadialMetric& g) {
  const Sign s = sign_from_string(ctx.cfg.sign);
  const EntropyReport r = compute_nu(g, s, entropy_options(ctx.cfg));
  entropy_checks(ctx, r, g, "");
  if (r.normalization_checked)
    ctx.below("normalization_identity", std::abs(r.normalization_lhs - r.normalization_target), ctx.cfg.tol_normalization);
  ctx.add_warnings(r.warnings);
  ctx.result = entropy_json(r);
  std::vector<std::vector<double>> rows;
  std::vector<double> ts, vs;
  for (const auto& [t, v] : r.tau_profile) {
    rows.push_back({t, v});
    ts.push_back(t);
    vs.push_back(v);
  }
  ctx.csv("tau_profile.csv", {"tau", "mu"}, rows);
  ctx.svg("tau_profile.svg", {"mu(tau)", "tau", "mu", true, false}, {{"mu", ts, vs}});
  write_minimizer(ctx, g, r, "nu");
}

void cmd_flow(Context& ctx, const LinkData& link, const RadialMetric& g) {
  const RunConfig& c = ctx.cfg;
  FlowConfig fc;
  fc.normalization = normalization_from_string(c.normalization);
  if (c.reference != "initial") {
    RunConfig rc = c;
    rc.preset = c.reference;
    rc.metric_file.clear();
    fc.reference = build_metric(rc, link);
  }
  fc.T = c.T;
  fc.cfl = c.cfl;
  fc.sample_period = c.sample_period;
  fc.sample = c.flow_entropy == "auto" ? matching_entropy(fc.normalization) : flow_entropy_from_string(c.flow_entropy);
  fc.change_tol = c.change_tol;
  fc.dt_max = c.dt_max;
  fc.fixed_dt = c.fixed_dt;
  fc.cone_drift_tol = c.cone_drift_tol;
  fc.entropy = entropy_options(c);
  fc.entropy.multistart = false;
  fc.entropy.fit_asymptotics = false;

  const FlowTrajectory traj = run_flow(g, fc);
  ctx.add_warnings(traj.warnings);
  const double cn = soliton_constant(fc.normalization);
  std::vector<std::vector<double>> rows;
  std::vector<double> ts, ent, ric;
  double drift = 0.0;
  const RadialMetric& g0 = traj.states.front().metric;
  for (const auto& s : traj.states) {
    rows.push_back({s.t, s.entropy.value_or(std::nan("")), s.entropy_residual, s.sup_ric, s.sup_ric_minus_cg, s.sup_w,
                    s.cone_factor, static_cast<double>(s.steps)});
    ts.push_back(s.t);
    ent.push_back(s.entropy.value_or(std::nan("")));
    ric.push_back(s.sup_ric);
    for (std::size_t i = 0; i < g0.a.size(); ++i)
      drift = std::max({drift, std::abs(s.metric.a[i] - g0.a[i]), std::abs(s.metric.beta[i] - g0.beta[i])});
  }
  const double T = traj.states.back().t;
  ctx.csv("flow.csv", {"t", "entropy", "entropy_residual", "sup_ric", "sup_ric_minus_cg", "sup_w", "cone_factor", "steps"},
          rows);
  if (fc.sample != FlowEntropy::none)
    ctx.svg("flow_entropy.svg", {std::string(to_string(fc.sample)) + " along the flow", "t", "entropy", false, false},
            {{to_string(fc.sample), ts, ent}});
  ctx.svg("flow_sup_ric.svg", {"sup |Ric|", "t", "sup |Ric|", false, true}, {{"sup |Ric|", ts, ric}});
  {
    const auto& last = traj.states.back().metric;
    std::vector<std::vector<double>> prof;
    const auto b0 = g0.b(), b1 = last.b();
    for (std::size_t i = 0; i < g0.grid.size(); ++i) prof.push_back({g0.grid.x[i], g0.a[i], b0[i], last.a[i], b1[i]});
    ctx.csv("flow_profiles.csv", {"x", "a_initial", "b_initial", "a_final", "b_final"}, prof);
  }

  json j{{"normalization", to_string(fc.normalization)},
         {"soliton_constant", cn},
         {"sampled_entropy", to_string(fc.sample)},
         {"T", T},
         {"samples", traj.states.size()},
         {"steps", traj.steps},
         {"rejected_steps", traj.rejected},
         {"drift_per_unit_time", drift / T},
         {"cone_factor_initial", traj.states.front().cone_factor},
         {"cone_factor_final", traj.states.back().cone_factor},
         {"sup_ric_initial", traj.states.front().sup_ric},
         {"sup_ric_final", traj.states.back().sup_ric},
         {"sup_ric_minus_cg_initial", traj.states.front().sup_ric_minus_cg},
         {"perturbation_order_initial", traj.perturbation_order_initial ? json(*traj.perturbation_order_initial) : json(nullptr)},
         {"perturbation_order_final", traj.perturbation_order_final ? json(*traj.perturbation_order_final) : json(nullptr)}};
  if (fc.sample != FlowEntropy::none) {
    const MonotonicityReport m = monotonicity_report(traj, fc.sample, c.tol_mono);
    j["monotonicity"] = {{"which", to_string(m.which)},
                         {"min_difference", m.min_difference},
                         {"total_variation", m.total_variation},
                         {"constant", m.constant},
                         {"pass", m.pass},
                         {"stationarity_residual", m.stationarity_residual},
                         {"stationarity_confirmed", m.stationarity_confirmed ? json(*m.stationarity_confirmed) : json(nullptr)}};
    ctx.at_least("entropy_min_difference", m.min_difference, -c.tol_mono);
    if (m.constant && m.stationarity_confirmed) ctx.flag("stationarity_confirmed", *m.stationarity_confirmed);
    double worst = 0.0;
    for (const auto& s : traj.states) worst = std::max(worst, s.entropy_residual);
    ctx.below("entropy_el_residual", worst, c.tol_el);
  }
  ctx.result = j;
}

void cmd_heat_check(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const FlatKernelCheck f = flat_circle_kernel_check(c.seed, c.heat_samples, c.heat_t_lo, c.heat_t_hi, c.heat_x_lo,
                                                     c.heat_x_hi, std::min(c.series_tol, 1e-17));
  const RadialFlatCheck r = radial_mode_flat_check(c.seed, 50);
  ctx.below("circle_kernel_relative_error", f.max_error_vs_angular_max, c.tol_heat);
  ctx.below("radial_mode_relative_error", r.max_relative_error, 1e-6);
  ctx.below("radial_mode_mass_error", r.max_mass_error, c.tol_mass);
  ctx.result = {{"circle_kernel",
                 {{"samples", f.samples},
                  {"max_modes", f.max_modes},
                  {"max_relative_error", f.max_error_vs_angular_max},
                  {"max_pointwise_relative_error", f.max_pointwise_relative}}},
                {"radial_mode",
                 {{"points", r.points},
                  {"max_relative_error", r.max_relative_error},
                  {"max_mass_error", r.max_mass_error}}}};
}

void cmd_mapping(Context& ctx, const LinkData& link) {
  const RunConfig& c = ctx.cfg;
  HeatKernelParams hp{link, -1, c.series_tol, true};
  MappingOptions mo;
  mo.t = c.mapping_t;
  mo.slope_tol = c.tol_slope;
  mo.exponent_tol = c.tol_exponent;
  json rows = json::array();
  std::vector<report::Series> spatial, temporal;
  for (double N : parse_list(c.mapping_orders)) {
    const MappingRow r = mapping_exponent_report(hp, N, mo);
    std::ostringstream tag;
    tag << N;
    rows.push_back({{"N", N},
                    {"expected", r.expected},
                    {"expected_exponent", r.expected_exponent},
                    {"fit", fit_json(r.fit)},
                    {"best_power_residual_away_from_zero", r.best_power_residual_away_from_zero},
                    {"temporal_slope", r.temporal_slope},
                    {"temporal_bound", r.temporal_bound},
                    {"spatial_pass", r.spatial_pass},
                    {"temporal_pass", r.temporal_pass}});
    ctx.flag("spatial_N" + tag.str(), r.spatial_pass);
    ctx.at_most("temporal_slope_N" + tag.str(), r.temporal_slope, r.temporal_bound);
    std::vector<std::vector<double>> sp, tp;
    for (std::size_t i = 0; i < r.x.size(); ++i) sp.push_back({r.x[i], r.hf[i]});
    for (std::size_t i = 0; i < r.t.size(); ++i) tp.push_back({r.t[i], r.sup_ht[i]});
    ctx.csv("mapping_spatial_N" + tag.str() + ".csv", {"x", "Hf"}, sp);
    ctx.csv("mapping_temporal_N" + tag.str() + ".csv", {"t", "sup_Ht_f"}, tp);
    std::vector<double> ay(r.hf.size());
    for (std::size_t i = 0; i < ay.size(); ++i) ay[i] = std::abs(r.hf[i]);
    spatial.push_back({"N=" + tag.str(), r.x, ay});
    temporal.push_back({"N=" + tag.str(), r.t, r.sup_ht});
  }
  ctx.svg("mapping_spatial.svg", {"|H*f| near the tip", "x", "|H*f|", true, true}, spatial);
  ctx.svg("mapping_temporal.svg", {"sup |H(t) f|", "t", "sup", true, true}, temporal);
  ctx.result = {{"n", link.n}, {"t", c.mapping_t}, {"rows", rows}};
}

void cmd_convergence(Context& ctx, const LinkData& link) {
  const RunConfig& c = ctx.cfg;
  EntropyOptions eo = entropy_options(c);
  eo.multistart = false;
  eo.fit_asymptotics = false;
  std::vector<double> Ns, values, diffs, orders;
  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= c.refinements; ++j) {
    const int N = c.N0 << j;
    const RadialMetric g = metric_at(c, link, N);
    double v = 0.0;
    if (c.convergence_op == "lambda") v = compute_lambda(g, eo).value;
    else if (c.convergence_op == "mu") v = compute_mu(g, c.tau, sign_from_string(c.sign), eo).value;
    else v = compute_nu(g, sign_from_string(c.sign), eo).value;
    Ns.push_back(N);
    values.push_back(v);
  }
  for (std::size_t j = 0; j + 1 < values.size(); ++j) diffs.push_back(std::abs(values[j + 1] - values[j]));
  for (std::size_t j = 0; j + 1 < diffs.size(); ++j) orders.push_back(std::log2(diffs[j] / diffs[j + 1]));
  for (std::size_t j = 0; j < values.size(); ++j)
    rows.push_back({Ns[j], values[j], j > 0 ? diffs[j - 1] : std::nan(""), j > 1 ? orders[j - 2] : std::nan("")});
  ctx.csv("convergence.csv", {"N", "value", "difference", "order"}, rows);
  std::vector<double> dn(Ns.begin() + 1, Ns.end());
  ctx.svg("convergence.svg", {c.convergence_op + ": |v(N) - v(N/2)|", "N", "difference", true, true},
          {{"difference", dn, diffs}});
  const std::vector<double> dn_span(dn.begin(), dn.end());
  const double fitted = num::observed_order(dn_span, diffs);
  const double richardson = values.back() + (values.back() - values[values.size() - 2]) / 3.0;
  ctx.at_least("final_order", orders.back(), c.min_order);
  ctx.result = {{"op", c.convergence_op},
                {"N", Ns},
                {"values", values},
                {"differences", diffs},
                {"orders", orders},
                {"fitted_order", fitted},
                {"extrapolated", richardson}};
}

json config_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& k : config_keys()) j[k] = get_config_value(c, k);
  return j;
}

json tolerances_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& k : config_keys())
    if (k.rfind("tolerances.", 0) == 0) j[k.substr(11)] = std::stod(get_config_value(c, k));
  return j;
}

}  // namespace

LinkData build_link(const RunConfig& cfg) {
  if (!cfg.link_file.empty()) return load_link_file(cfg.link_file);
  return resolve_link(cfg.link.empty() ? "S3" : cfg.link);
}

RadialMetric build_metric(const RunConfig& cfg, const LinkData& link) {
  std::optional<WarpProfile> prof;
  if (!cfg.profile.empty()) prof = profile_from_string(cfg.profile);
  if (!cfg.metric_file.empty()) {
    RadialMetric g = load_metric_csv(cfg.metric_file, link, topology_from_string(cfg.topology), cfg.N, cfg.p, cfg.gamma);
    return g;
  }
  PresetSpec s;
  s.name = cfg.preset.empty() ? "sphere_suspension" : cfg.preset;
  s.L = cfg.L;
  s.amplitude = cfg.amplitude;
  s.gamma = cfg.gamma;
  s.scale = cfg.scale;
  s.N = cfg.N;
  s.p = cfg.p;
  s.profile = prof;
  return make_preset(s, link);
}

EntropyOptions entropy_options(const RunConfig& cfg) {
  EntropyOptions o;
  o.el_tol = std::min(o.el_tol, cfg.tol_el);
  o.multistart = cfg.multistart;
  o.seed = cfg.seed;
  o.agreement_tol = cfg.tol_agreement;
  o.tau_lo = cfg.tau_lo;
  o.tau_hi = cfg.tau_hi;
  o.tau_scan = cfg.tau_scan;
  o.fit_asymptotics = cfg.fit_asymptotics;
  return o;
}

RunOutcome run(const RunConfig& input) {
  RunOutcome out;
  RunConfig cfg = input;
  std::optional<fs::path> dir;
  json rep;
  try {
    finalize_config(cfg);
    dir = report::prepare_output_dir(cfg.output_dir);
    Context ctx{cfg, *dir};
    const std::string text = effective_config_text(cfg);
    report::write_text(*dir / "effective.ini", text);
    ctx.artifacts.push_back("effective.ini");

    const std::string& sc = cfg.subcommand;
    const bool needs_link = sc != "heat-check";
    const bool needs_metric = sc == "lambda" || sc == "mu" || sc == "nu" || sc == "flow";
    std::optional<LinkData> link;
    if (needs_link) link = build_link(cfg);
    std::optional<RadialMetric> g;
    if (needs_metric) {
      g = build_metric(cfg, *link);
      ctx.grid = grid_json(*g);
    }
    if (sc == "link-check") cmd_link_check(ctx, *link);
    else if (sc == "lambda") cmd_lambda(ctx, *g);
    else if (sc == "mu") cmd_mu(ctx, *g);
    else if (sc == "nu") cmd_nu(ctx, *g);
    else if (sc == "flow") cmd_flow(ctx, *link, *g);
    else if (sc == "heat-check") cmd_heat_check(ctx);
    else if (sc == "mapping") cmd_mapping(ctx, *link);
    else if (sc == "convergence") cmd_convergence(ctx, *link);

    const bool ok = std::all_of(ctx.checks.begin(), ctx.checks.end(), [](const Check& k) { return k.pass; });
    out.exit_code = ok ? 0 : 2;
    out.status = ok ? "pass" : "fail";
    json checks = json::array();
    std::vector<std::string> failed;
    for (const auto& k : ctx.checks) {
      checks.push_back({{"name", k.name}, {"value", jnum(k.value)}, {"relation", k.relation}, {"bound", jnum(k.bound)}, {"pass", k.pass}});
      if (!k.pass) failed.push_back(k.name);
    }
    if (ok) out.message = "all checks passed";
    else {
      out.message = "failed checks:";
      for (const auto& f : failed) out.message += " " + f;
    }
    rep = json{{"schema_version", report::kSchemaVersion},
               {"tool", "conelab"},
               {"version", CONELAB_VERSION},
               {"subcommand", sc},
               {"timestamp", timestamp()},
               {"seed", cfg.seed},
               {"status", out.status},
               {"exit_code", out.exit_code},
               {"message", out.message},
               {"config", config_json(cfg)},
               {"config_text", text},
               {"grid", ctx.grid},
               {"tolerances", tolerances_json(cfg)},
               {"checks", checks},
               {"result", ctx.result},
               {"warnings", ctx.warnings},
               {"artifacts", ctx.artifacts}};
  } catch (const Error& e) {
    out.exit_code = 1;
    out.status = "error";
    out.error = e.code();
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.status = "error";
    out.error = ErrorCode::internal;
    out.message = std::string("internal: ") + e.what();
  }
  if (out.exit_code == 1) {
    if (!dir) return out;
    rep = json{{"schema_version", report::kSchemaVersion},
               {"tool", "conelab"},
               {"version", CONELAB_VERSION},
               {"subcommand", cfg.subcommand},
               {"timestamp", timestamp()},
               {"seed", cfg.seed},
               {"status", out.status},
               {"exit_code", out.exit_code},
               {"error_code", to_string(*out.error)},
               {"message", out.message},
               {"config", config_json(cfg)}};
  }
  try {
    const fs::path path = *dir / "report.json";
    report::write_text(path, rep.dump(2) + "\n");
    out.report_path = path.string();
  } catch (const Error& e) {
    out.exit_code = 1;
    out.status = "error";
    out.error = e.code();
    out.message = e.what();
  }
  return out;
}

}  // namespace conelab
