#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "conelab/entropy.hpp"
#include "conelab/error.hpp"
#include "conelab/flow.hpp"
#include "conelab/heat.hpp"
#include "conelab/link.hpp"
#include "conelab/spectral.hpp"

using namespace conelab;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Verdict::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  lines.push_back(std::string(ok ? "  ok   " : "  FAIL ") + buf);
  pass = pass && ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const LinkData& s3() {
  static const LinkData l = sphere_link(3, 8);
  return l;
}

RadialMetric preset(const std::string& name, int N, double p = 2.0) {
  PresetSpec ps;
  ps.name = name;
  ps.N = N;
  ps.p = p;
  return make_preset(ps, s3());
}

Verdict flat_kernel() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const FlatKernelCheck c = flat_circle_kernel_check(12345, 100, 0.01, 1.0, 0.1, 2.0);
  const double secs = seconds_since(t0);
  v.check(c.max_error_vs_angular_max < 1e-8, "max |H - G| / max_phi G = %.3e over %d samples (bound 1e-8)",
          c.max_error_vs_angular_max, c.samples);
  char buf[160];
  std::snprintf(buf, sizeof buf, "       pointwise |H - G| / G where G >= 1e-6 max_phi G: %.3e, modes up to %d",
                c.max_pointwise_relative, c.max_modes);
  v.lines.push_back(buf);
  v.check(secs < 2.0, "runtime %.3f s (bound 2 s)", secs);
  return v;
}

Verdict radial_mode() {
  Verdict v;
  const RadialFlatCheck r = radial_mode_flat_check(12345, 50);
  v.check(r.max_relative_error < 1e-6, "mode-0 kernel vs S3 average of the R4 Gaussian: %.3e at %d points (bound 1e-6)",
          r.max_relative_error, r.points);
  v.check(r.max_mass_error < 1e-8, "mass error %.3e (bound 1e-8)", r.max_mass_error);
  return v;
}

Verdict lambda_s4() {
  Verdict v;
  const double l1 = compute_lambda(preset("sphere_suspension", 2000)).value;
  const double l2 = compute_lambda(preset("sphere_suspension", 4000)).value;
  const double e1 = std::abs(l1 - 12.0), e2 = std::abs(l2 - 12.0);
  v.check(e1 < 1e-3, "lambda(N=2000, p=2) = %.12f, error %.3e (bound 1e-3)", l1, e1);
  const double order = std::log2(e1 / e2);
  v.check(order >= 1.8, "N -> 2N error %.3e -> %.3e, order %.3f (bound >= 1.8)", e1, e2, order);
  return v;
}

Verdict scaling() {
  Verdict v;
  PresetSpec ps;
  ps.name = "perturbed_suspension";
  ps.N = 2000;
  const RadialMetric g = make_preset(ps, s3());
  const double l = compute_lambda(g).value;
  const double l4 = compute_lambda(scaled(g, 2.0)).value;
  const double rel = std::abs(l4 - l / 4.0) / std::abs(l / 4.0);
  v.check(rel < 1e-6, "lambda(g) = %.10f, lambda(4g) = %.10f, relative gap %.3e (bound 1e-6)", l, l4, rel);
  v.check(l > 0.0, "test metric has lambda > 0");
  const EntropyReport n1 = compute_nu(g, Sign::minus);
  const EntropyReport n2 = compute_nu(scaled(g, std::sqrt(2.0)), Sign::minus);
  const double d = std::abs(n1.value - n2.value);
  v.check(d < 1e-5, "nu_-(g) = %.10f (tau %.6f), nu_-(2g) = %.10f (tau %.6f), gap %.3e (bound 1e-5)", n1.value, *n1.tau,
          n2.value, *n2.tau, d);
  return v;
}

Verdict residuals() {
  Verdict v;
  PresetSpec ps;
  ps.name = "perturbed_suspension";
  ps.N = 1000;
  const RadialMetric g = make_preset(ps, s3());
  const RadialMetric h = preset("hyperbolic_cone", 1000);
  struct Item {
    std::string label;
    EntropyReport r;
    const RadialMetric* g;
  };
  std::vector<Item> items;
  items.push_back({"lambda", compute_lambda(g), &g});
  items.push_back({"mu_-(0.5)", compute_mu(g, 0.5, Sign::minus), &g});
  items.push_back({"mu_+(0.5)", compute_mu(g, 0.5, Sign::plus), &g});
  items.push_back({"nu_-", compute_nu(g, Sign::minus), &g});
  items.push_back({"nu_+ (hyperbolic cone)", compute_nu(h, Sign::plus), &h});
  for (const auto& it : items) {
    v.check(it.r.el_residual < 1e-8, "%s = %.10f: EL residual %.3e (bound 1e-8)", it.label.c_str(), it.r.value,
            it.r.el_residual);
    v.check(it.r.constraint_residual < 1e-12, "%s: constraint residual %.3e (bound 1e-12)", it.label.c_str(),
            it.r.constraint_residual);
    if (!it.r.tau) continue;
    const double tau = *it.r.tau;
    const RadialMetric& m = *it.g;
    const auto w = volume_weights(m);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (it.r.f.values[i] - m.m()) * std::exp(-it.r.f.values[i]);
    const double algebraic = -2.0 * std::pow(4.0 * std::numbers::pi * tau, -0.5 * m.m()) * s;
    const double diff = evaluate_w(m, it.r.omega, tau, Sign::plus) - evaluate_w(m, it.r.omega, tau, Sign::minus);
    v.check(std::abs(diff - algebraic) < 1e-12, "%s: W_+ - W_- identity gap %.3e (bound 1e-12)", it.label.c_str(),
            std::abs(diff - algebraic));
  }
  return v;
}

Verdict minimizer_asymptotics() {
  Verdict v;
  PresetSpec ps;
  ps.name = "perturbed_cone";
  ps.N = 2000;
  ps.gamma = 2.0;
  const RadialMetric g = make_preset(ps, s3());
  const IndicialData ind = indicial_exponents(s3(), 2.0);
  const EntropyReport r = compute_lambda(g);
  const AsymptoticFit& f = r.asymptotics;
  v.lines.push_back("       gamma_bar = " + std::to_string(ind.gamma_bar) + ", lambda = " + std::to_string(r.value));
  v.check(r.has_asymptotics && f.exponent >= 0.9 && f.exponent <= 1.3,
          "fitted exponent of omega - c0 = %.4f on [%.2e, %.2e], residual %.3e, c1 = %.3e (window [0.9, 1.3])",
          f.exponent, f.x_lo, f.x_hi, f.residual, f.c1);
  return v;
}

Verdict mapping() {
  Verdict v;
  HeatKernelParams hp{s3()};
  for (double N : {1.0, 2.0, 2.5, 3.0}) {
    const MappingRow r = mapping_exponent_report(hp, N);
    if (r.expected == "log")
      v.check(r.spatial_pass, "N = %.1f: expected log; log residual %.3e vs best power residual (|e| >= 0.1) %.3e", N,
              r.fit.log_residual, r.best_power_residual_away_from_zero);
    else
      v.check(r.spatial_pass, "N = %.1f: expected %s (exponent %.3f), fitted %.4f, residual %.3e", N, r.expected.c_str(),
              r.expected_exponent, r.fit.exponent, r.fit.residual);
    v.check(r.temporal_pass, "N = %.1f: temporal slope %.4f (bound <= %.3f)", N, r.temporal_slope, r.temporal_bound);
  }
  return v;
}

Verdict variations() {
  Verdict v;
  {
    HeatKernelParams hp{s3()};
    const RadialGrid grid = RadialGrid::graded(6.0, 600, 2.0);
    RadialField u;
    for (double x : grid.x) u.values.push_back(std::exp(-4 * x * x) * smooth_cutoff(x, 1.0, 2.0));
    const auto a = heat_apply(hp, 0.05, u, grid);
    const auto ab = heat_apply(hp, 0.07, a.value, grid);
    const auto c = heat_apply(hp, 0.12, u, grid);
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      e = std::max(e, std::abs(ab.value.values[i] - c.value.values[i]));
      m = std::max(m, std::abs(c.value.values[i]));
    }
    v.check(e / m < 1e-6, "semigroup H(0.07)H(0.05) vs H(0.12): relative gap %.3e (bound 1e-6)", e / m);
  }
  {
    PresetSpec ps;
    ps.name = "perturbed_suspension";
    ps.N = 1000;
    const RadialMetric g = make_preset(ps, s3());
    RadialField hr, hl;
    for (double x : g.grid.x) {
      hr.values.push_back(std::sin(x) * std::sin(x));
      hl.values.push_back(std::cos(x));
    }
    const VariationCheck c = first_variation_check(g, hr, hl, 1e-3);
    v.check(std::abs(c.richardson_order - 2.0) < 0.3,
            "first variation: formula %.10f, central differences %.10f %.10f %.10f, Richardson order %.3f", c.formula,
            c.central[0], c.central[1], c.central[2], c.richardson_order);
    v.check(c.relative_gap < 1e-4, "first variation: extrapolated %.10f, relative gap to formula %.3e (bound 1e-4)",
            c.extrapolated, c.relative_gap);
  }
  {
    std::vector<double> vals;
    for (int N : {2000, 4000, 8000}) {
      PresetSpec ps;
      ps.name = "perturbed_suspension";
      ps.N = N;
      const RadialMetric g = make_preset(ps, s3());
      RadialField xi;
      for (double x : g.grid.x) xi.values.push_back(std::pow(std::sin(x), 3));
      const auto [lr, ll] = lie_derivative_radial(g, xi);
      vals.push_back(first_variation_lambda(g, lr, ll));
    }
    v.lines.push_back("       lambda'(L_X g) at N = 2000, 4000, 8000: " + std::to_string(vals[0]) + ", " +
                      std::to_string(vals[1]) + ", " + std::to_string(vals[2]) +
                      " (order " + std::to_string(std::log2(std::abs(vals[1] / vals[2]))) + ")");
    v.check(std::abs(vals[2]) < 1e-6, "|lambda'(L_X g)| = %.3e at N = 8000, X = sin^3(x) d/dx (bound 1e-6)",
            std::abs(vals[2]));
  }
  return v;
}

double metric_drift(const FlowTrajectory& tr) {
  const auto& a = tr.states.front().metric;
  const auto& b = tr.states.back().metric;
  double d = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i)
    d = std::max({d, std::abs(a.a[i] - b.a[i]), std::abs(a.beta[i] - b.beta[i])});
  return d / tr.states.back().t;
}

Verdict flow() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  {
    FlowConfig c;
    c.T = 1.0;
    c.sample = FlowEntropy::lambda;
    const FlowTrajectory tr = run_flow(preset("flat_cone", 400, 1.5), c);
    const MonotonicityReport m = monotonicity_report(tr, FlowEntropy::lambda);
    v.check(metric_drift(tr) < 1e-8, "flat cone, steady: drift %.3e per unit time (bound 1e-8)", metric_drift(tr));
    v.check(m.constant && m.stationarity_confirmed.value_or(false),
            "flat cone: lambda total variation %.3e, weighted |Ric| %.3e", m.total_variation, m.stationarity_residual);
  }
  {
    PresetSpec ps;
    ps.name = "sphere_suspension";
    ps.N = 400;
    ps.p = 1.5;
    ps.scale = std::sqrt(3.0);
    ps.profile = WarpProfile::sine;
    FlowConfig c;
    c.T = 1.0;
    c.normalization = Normalization::shrink;
    c.sample = FlowEntropy::mu_minus;
    const FlowTrajectory tr = run_flow(make_preset(ps, s3()), c);
    const MonotonicityReport m = monotonicity_report(tr, FlowEntropy::mu_minus);
    v.check(metric_drift(tr) < 1e-8, "round S4 (Ric = g), shrink: drift %.3e per unit time (bound 1e-8)",
            metric_drift(tr));
    v.check(m.constant && m.stationarity_confirmed.value_or(false),
            "round S4: mu_- total variation %.3e, weighted |Ric - g| %.3e", m.total_variation, m.stationarity_residual);
  }
  {
    PresetSpec ps;
    ps.name = "perturbed_cone";
    ps.N = 600;
    ps.p = 1.5;
    ps.L = 3.0;
    ps.amplitude = 0.05;
    ps.gamma = 2.0;
    const RadialMetric g = make_preset(ps, s3());
    PresetSpec rs = ps;
    rs.name = "flat_cone";
    FlowConfig c;
    c.T = 0.1;
    c.sample_period = 0.1 / 64;
    c.sample = FlowEntropy::lambda;
    c.reference = make_preset(rs, s3());
    const FlowTrajectory tr = run_flow(g, c);
    const MonotonicityReport m = monotonicity_report(tr, FlowEntropy::lambda);
    v.check(m.values.size() >= 50 && m.min_difference >= -1e-7,
            "perturbed cone, steady: %zu samples, lambda %.8f -> %.8f, min successive difference %.3e (bound >= -1e-7)",
            m.values.size(), m.values.front(), m.values.back(), m.min_difference);
    double worst_rise = -INFINITY;
    for (std::size_t k = 1; k < tr.states.size(); ++k)
      worst_rise = std::max(worst_rise, tr.states[k].sup_ric - tr.states[k - 1].sup_ric);
    v.check(worst_rise <= 0.0, "sup|Ric| %.4f -> %.4f, largest successive increase %.3e", tr.states.front().sup_ric,
            tr.states.back().sup_ric, worst_rise);
    v.lines.push_back("       perturbation order " + std::to_string(tr.perturbation_order_initial.value_or(NAN)) + " -> " +
                      std::to_string(tr.perturbation_order_final.value_or(NAN)) + ", " + std::to_string(tr.steps) +
                      " steps");
  }
  const double secs = seconds_since(t0);
  v.check(secs < 300.0, "flow suite runtime %.1f s (bound 300 s)", secs);
  return v;
}

Verdict stability() {
  Verdict v;
  LinkData l = sphere_link(3, 8);
  l.einstein_tt_spectrum = std::vector<double>{0.0, 3.0};
  const Stability s = check_tangential_stability(l);
  v.check(s == Stability::stable_not_strict, "round S3, TT spectrum {0, 3}: %s", to_string(s));
  LinkData neg = l;
  neg.einstein_tt_spectrum = std::vector<double>{-1.0, 3.0};
  v.check(check_tangential_stability(neg) == Stability::unstable, "negative TT eigenvalue: %s",
          to_string(check_tangential_stability(neg)));
  LinkData band = l;
  band.laplace_spectrum.insert(band.laplace_spectrum.begin() + 2, Eigenvalue{5.0, 1});
  v.check(check_tangential_stability(band) == Stability::unstable, "Laplace eigenvalue 5 in (3, 8): %s",
          to_string(check_tangential_stability(band)));
  LinkData cut = sphere_link(3, 1);
  cut.einstein_tt_spectrum = std::vector<double>{1.0};
  bool truncation = false;
  try {
    check_tangential_stability(cut);
  } catch (const Error& e) {
    truncation = e.code() == ErrorCode::truncation;
  }
  v.check(truncation, "spectrum complete only up to 3 < 8: truncation error raised");
  return v;
}

Verdict indicial() {
  Verdict v;
  for (int n = 1; n <= 6; ++n) {
    const double nu = indicial_nu(n, 0.0);
    v.check(nu == 0.5 * (n - 1), "n = %d: nu(0) = %.17g", n, nu);
  }
  const IndicialData d = indicial_exponents(sphere_link(3, 8), 2.0);
  v.check(d.gamma_bar == 1.0, "gamma_bar(S3, gamma = 2) = %.17g", d.gamma_bar);
  return v;
}

const std::vector<std::pair<const char*, std::function<Verdict()>>> kCriteria = {
    {"flat-kernel equality", flat_kernel},
    {"radial-mode flat check", radial_mode},
    {"lambda of the round S4 suspension", lambda_s4},
    {"scaling identities", scaling},
    {"Euler-Lagrange and constraint residuals", residuals},
    {"minimizer asymptotics", minimizer_asymptotics},
    {"mapping exponents", mapping},
    {"semigroup, first variation, diffeomorphism invariance", variations},
    {"flow fixed points and monotonicity", flow},
    {"tangential stability logic", stability},
    {"indicial table", indicial},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  } else {
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) ids.push_back(i);
  }
  bool all = true;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 1;
    }
    const auto& [name, fn] = kCriteria[id - 1];
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.lines.push_back(std::string("  FAIL exception: ") + e.what());
    }
    for (const auto& l : v.lines) std::printf("%s\n", l.c_str());
    std::printf("criterion %d %s: %s\n", id, v.pass ? "PASS" : "FAIL", name);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
