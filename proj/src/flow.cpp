#include "conelab/flow.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "conelab/error.hpp"
#include "conelab/link.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::steady: return "steady";
    case Normalization::shrink: return "shrink";
    case Normalization::expand: return "expand";
  }
  return "unknown";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "steady") return Normalization::steady;
  if (s == "shrink") return Normalization::shrink;
  if (s == "expand") return Normalization::expand;
  fail(ErrorCode::invalid_argument, "normalization must be steady, shrink or expand, got '" + s + "'");
}

double soliton_constant(Normalization n) {
  return n == Normalization::shrink ? 1.0 : (n == Normalization::expand ? -1.0 : 0.0);
}

const char* to_string(FlowEntropy e) {
  switch (e) {
    case FlowEntropy::none: return "none";
    case FlowEntropy::lambda: return "lambda";
    case FlowEntropy::mu_minus: return "mu_minus";
    case FlowEntropy::mu_plus: return "mu_plus";
  }
  return "unknown";
}

FlowEntropy flow_entropy_from_string(const std::string& s) {
  if (s == "none") return FlowEntropy::none;
  if (s == "lambda") return FlowEntropy::lambda;
  if (s == "mu_minus") return FlowEntropy::mu_minus;
  if (s == "mu_plus") return FlowEntropy::mu_plus;
  fail(ErrorCode::invalid_argument, "entropy must be none, lambda, mu_minus or mu_plus, got '" + s + "'");
}

FlowEntropy matching_entropy(Normalization n) {
  switch (n) {
    case Normalization::steady: return FlowEntropy::lambda;
    case Normalization::shrink: return FlowEntropy::mu_minus;
    case Normalization::expand: return FlowEntropy::mu_plus;
  }
  return FlowEntropy::lambda;
}

namespace {

void extrapolate_last(std::vector<double>& f, const RadialGrid& grid) {
  const std::size_t k = f.size() - 1;
  const double xs[4] = {grid.x[k - 4], grid.x[k - 3], grid.x[k - 2], grid.x[k - 1]};
  const double ys[4] = {f[k - 4], f[k - 3], f[k - 2], f[k - 1]};
  f[k] = num::lagrange_eval(xs, ys, grid.x[k]);
}

void require_compatible(const RadialMetric& g, const RadialMetric& ref) {
  if (g.grid.size() != ref.grid.size() || g.grid.L != ref.grid.L || g.grid.x != ref.grid.x)
    fail(ErrorCode::invalid_argument, "flow: metric and reference must share the grid");
  if (g.n() != ref.n() || g.topology != ref.topology || g.profile != ref.profile)
    fail(ErrorCode::invalid_argument, "flow: metric and reference must share link, topology and profile");
}

}  // namespace

RadialField deturck_vector_field(const RadialMetric& g, const RadialMetric& reference) {
  require_compatible(g, reference);
  const MetricDerivatives d = metric_derivatives(g);
  const MetricDerivatives r = metric_derivatives(reference);
  const int n = g.n();
  RadialField w;
  w.values.assign(g.grid.size(), 0.0);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    if (d.b[i] <= 0.0) continue;
    const double a2 = d.a[i] * d.a[i];
    w.values[i] = (d.a1[i] / d.a[i] - r.a1[i] / r.a[i]) / a2 - n * d.b1[i] / (a2 * d.b[i]) +
                  n * r.b[i] * r.b1[i] / (r.a[i] * r.a[i] * d.b[i] * d.b[i]);
  }
  if (g.closed_end()) extrapolate_last(w.values, g.grid);
  return w;
}

FlowRhs flow_rhs(const RadialMetric& g, const RadialMetric& reference, Normalization norm) {
  const double c = soliton_constant(norm);
  const RicciComponents ric = warped_ricci(g);
  const MetricDerivatives d = metric_derivatives(g);
  const RadialField w = deturck_vector_field(g, reference);
  const std::size_t N = g.grid.size();
  std::vector<double> aw(N);
  for (std::size_t i = 0; i < N; ++i) aw[i] = g.a[i] * w.values[i];
  const auto aw1 = dx1(aw, g.grid);
  FlowRhs out;
  out.da.resize(N);
  out.dbeta.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    out.da[i] = -ric.ric_rad.values[i] * g.a[i] + aw1[i] + c * g.a[i];
    const double rho = profile_at(g.profile, g.grid.L, g.grid.x[i]).rho;
    if (rho > 0.0)
      out.dbeta[i] = (-ric.ric_link.values[i] * d.b[i] + d.b1[i] * w.values[i] + c * d.b[i]) / rho;
  }
  if (g.closed_end()) extrapolate_last(out.dbeta, g.grid);
  for (std::size_t i = 0; i < N; ++i)
    if (!std::isfinite(out.da[i]) || !std::isfinite(out.dbeta[i]))
      fail(ErrorCode::internal, "flow_rhs: non-finite right-hand side at node " + std::to_string(i));
  return out;
}

double sup_ricci_deviation(const RadialMetric& g, double c, bool weighted) {
  const RicciComponents r = warped_ricci(g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    const double dr = r.ric_rad.values[i] - c, dl = r.ric_link.values[i] - c;
    double w = 1.0;
    if (weighted) {
      const double rho = profile_at(g.profile, g.grid.L, g.grid.x[i]).rho;
      w = rho * rho;
    }
    s = std::max(s, w * std::sqrt(dr * dr + g.n() * dl * dl));
  }
  return s;
}

namespace {

double tip_value(const RadialMetric& g, const std::vector<double>& f) {
  const double xs[4] = {g.grid.x[0], g.grid.x[1], g.grid.x[2], g.grid.x[3]};
  const double ys[4] = {f[0], f[1], f[2], f[3]};
  return num::lagrange_eval(xs, ys, 0.0);
}

}  // namespace

std::optional<double> perturbation_order(const RadialMetric& g, const RadialMetric& reference) {
  require_compatible(g, reference);
  const auto& x = g.grid.x;
  const double hi = g.grid.L / 10.0, lo = 4.0 * x.front();
  const double a0 = tip_value(g, g.a), r0 = tip_value(reference, reference.a);
  std::vector<double> lx, ly;
  double dmax = 0.0;
  for (std::size_t i = 0; i < x.size() && x[i] <= hi; ++i) {
    const double cone = (g.beta[i] / g.a[i]) / (reference.beta[i] / reference.a[i]) - 1.0;
    const double radial = (g.a[i] / a0) / (reference.a[i] / r0) - 1.0;
    const double dev = std::max(std::abs(cone), std::abs(radial));
    dmax = std::max(dmax, dev);
    if (x[i] < lo || dev <= 0.0) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(dev));
  }
  if (dmax < 1e-12 || lx.size() < 8) return std::nullopt;
  return num::fit_line(lx, ly).slope;
}

namespace {

constexpr int kRadius = 6;

struct Stepper {
  const RadialMetric& ref;
  Normalization norm;
  RadialMetric work;
  std::size_t active;

  Stepper(const RadialMetric& initial, const RadialMetric& reference, Normalization nm)
      : ref(reference), norm(nm), work(initial), active(initial.grid.size() - 1) {}

  void load(const std::vector<double>& u) {
    for (std::size_t i = 0; i < active; ++i) {
      work.a[i] = u[2 * i];
      work.beta[i] = u[2 * i + 1];
    }
    if (work.closed_end()) {
      extrapolate_last(work.a, work.grid);
      extrapolate_last(work.beta, work.grid);
    }
  }

  std::vector<double> pack(const RadialMetric& g) const {
    std::vector<double> u(2 * active);
    for (std::size_t i = 0; i < active; ++i) {
      u[2 * i] = g.a[i];
      u[2 * i + 1] = g.beta[i];
    }
    return u;
  }

  std::vector<double> rhs(const std::vector<double>& u) {
    load(u);
    const FlowRhs r = flow_rhs(work, ref, norm);
    std::vector<double> out(2 * active);
    for (std::size_t i = 0; i < active; ++i) {
      out[2 * i] = r.da[i];
      out[2 * i + 1] = r.dbeta[i];
    }
    return out;
  }

  // banded Jacobian by coloured differences, LAPACK band layout for gbsv
  std::vector<double> jacobian_band(const std::vector<double>& u, const std::vector<double>& f0, int kl) {
    const int n = static_cast<int>(u.size());
    const int ldab = 3 * kl + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    const int colors = 2 * kRadius + 1;
    std::vector<double> up = u;
    for (int s = 0; s < 2; ++s)
      for (int c = 0; c < colors; ++c) {
        std::vector<int> cols;
        for (int node = c; node < static_cast<int>(active); node += colors) cols.push_back(2 * node + s);
        if (cols.empty()) continue;
        std::vector<double> h(cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) {
          h[k] = 1e-7 * std::max(std::abs(u[cols[k]]), 1e-3);
          up[cols[k]] = u[cols[k]] + h[k];
        }
        const auto f1 = rhs(up);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          const int j = cols[k];
          up[j] = u[j];
          for (int i = std::max(0, j - kl); i <= std::min(n - 1, j + kl); ++i)
            ab[static_cast<std::size_t>(j) * ldab + 2 * kl + i - j] = (f1[i] - f0[i]) / h[k];
        }
      }
    return ab;
  }
};

double rel_change(const std::vector<double>& u, const std::vector<double>& du) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(du[i]) / std::abs(u[i]));
  return s;
}

void sample_state(FlowState& st, const FlowConfig& cfg, FlowEntropy which) {
  const double c = soliton_constant(cfg.normalization);
  st.sup_ric = sup_ricci_deviation(st.metric, 0.0);
  st.sup_ric_minus_cg = sup_ricci_deviation(st.metric, c);
  st.weighted_ric_minus_cg = sup_ricci_deviation(st.metric, c, true);
  st.cone_factor = cone_factor(st.metric);
  EntropyOptions eo = cfg.entropy;
  eo.fit_asymptotics = false;
  switch (which) {
    case FlowEntropy::none: break;
    case FlowEntropy::lambda: {
      const EntropyReport r = compute_lambda(st.metric, eo);
      st.entropy = r.value;
      st.entropy_residual = r.el_residual;
      break;
    }
    case FlowEntropy::mu_minus:
    case FlowEntropy::mu_plus: {
      const EntropyReport r =
          compute_mu(st.metric, 0.5, which == FlowEntropy::mu_minus ? Sign::minus : Sign::plus, eo);
      st.entropy = r.value;
      st.entropy_residual = r.el_residual;
      break;
    }
  }
}

}  // namespace

FlowTrajectory run_flow(const RadialMetric& initial, const FlowConfig& cfg) {
  initial.validate();
  const RadialMetric& ref = cfg.reference ? *cfg.reference : initial;
  ref.validate();
  require_compatible(initial, ref);
  if (!(cfg.T > 0.0)) fail(ErrorCode::invalid_argument, "flow: T must be positive");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) fail(ErrorCode::invalid_argument, "flow: cfl must lie in (0, 1)");
  if (cfg.sample_period < 0.0 || cfg.change_tol <= 0.0 || cfg.fixed_dt < 0.0 || cfg.dt_max < 0.0)
    fail(ErrorCode::invalid_argument, "flow: step controls must be positive");
  if (cfg.sample != FlowEntropy::none && cfg.sample != matching_entropy(cfg.normalization))
    fail(ErrorCode::normalization, std::string("flow: ") + to_string(cfg.sample) + " is not monotone under the " +
                                       to_string(cfg.normalization) + " normalization (use " +
                                       to_string(matching_entropy(cfg.normalization)) + ")");

  FlowTrajectory traj;
  traj.normalization = cfg.normalization;
  traj.sample = cfg.sample;
  const Stability st = check_tangential_stability(initial.link);
  if (st == Stability::unstable) fail(ErrorCode::precondition, "flow: link is not tangentially stable");
  if (st == Stability::undecidable)
    traj.warnings.push_back("link stability undecidable without an Einstein-operator TT spectrum");
  traj.perturbation_order_initial = perturbation_order(initial, ref);
  if (traj.perturbation_order_initial && !(*traj.perturbation_order_initial > 0.0))
    fail(ErrorCode::precondition, "flow: initial metric is not an admissible perturbation of the reference (order " +
                                      std::to_string(*traj.perturbation_order_initial) + ")");

  const double period = cfg.sample_period > 0.0 ? cfg.sample_period : cfg.T / 64.0;
  const double dt_max = cfg.dt_max > 0.0 ? cfg.dt_max : period;
  Stepper stp(initial, ref, cfg.normalization);
  std::vector<double> u = stp.pack(initial);

  double hmin = initial.grid.x.front();
  for (std::size_t i = 0; i + 1 < initial.grid.size(); ++i)
    hmin = std::min(hmin, initial.grid.x[i + 1] - initial.grid.x[i]);
  const double amin = *std::min_element(initial.a.begin(), initial.a.end());
  double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt : std::min(dt_max, cfg.cfl * hmin * hmin * amin * amin);

  FlowState s0;
  s0.metric = initial;
  sample_state(s0, cfg, cfg.sample);
  const double cf0 = s0.cone_factor;
  traj.states.push_back(s0);

  const int kl = 2 * kRadius + 1;
  const int n = static_cast<int>(u.size());
  double t = 0.0;
  int next_sample = 1;
  const int samples = static_cast<int>(std::ceil(cfg.T / period - 1e-9));
  while (next_sample <= samples) {
    const double t_sample = std::min(cfg.T, next_sample * period);
    const std::vector<double> f0 = stp.rhs(u);
    const std::vector<double> band = stp.jacobian_band(u, f0, kl);
    bool accepted = false;
    double h = std::min(dt, t_sample - t);
    std::vector<double> du;
    double change = 0.0;
    while (!accepted) {
      if (h < cfg.min_dt * std::max(1.0, cfg.T))
        fail(ErrorCode::convergence, "flow: step-size collapse at t = " + std::to_string(t));
      std::vector<double> ab(band.size());
      const int ldab = 3 * kl + 1;
      for (int j = 0; j < n; ++j)
        for (int i = std::max(0, j - kl); i <= std::min(n - 1, j + kl); ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * ldab + 2 * kl + i - j;
          ab[k] = (i == j ? 1.0 : 0.0) - h * band[k];
        }
      du = f0;
      for (double& v : du) v *= h;
      std::vector<lapack_int> ipiv(n);
      const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, kl, 1, ab.data(), ldab, ipiv.data(), du.data(), n);
      bool ok = info == 0;
      if (ok) {
        change = rel_change(u, du);
        for (int i = 0; i < n && ok; ++i) ok = u[i] + du[i] > 0.0 && std::isfinite(du[i]);
        if (cfg.fixed_dt <= 0.0) ok = ok && change <= cfg.change_tol;
      }
      if (ok) {
        accepted = true;
      } else {
        if (cfg.fixed_dt > 0.0)
          fail(ErrorCode::positivity, "flow: a or b lost positivity at t = " + std::to_string(t));
        ++traj.rejected;
        h *= 0.5;
        dt = h;
      }
    }
    for (int i = 0; i < n; ++i) u[i] += du[i];
    t += h;
    ++traj.steps;
    if (cfg.fixed_dt <= 0.0 && h >= dt * (1.0 - 1e-12))
      dt = std::min(dt_max, change < 0.5 * cfg.change_tol ? 1.5 * h : h);
    if (t >= t_sample - 1e-12 * std::max(1.0, cfg.T)) {
      t = t_sample;
      stp.load(u);
      FlowState s;
      s.t = t;
      s.metric = stp.work;
      s.steps = traj.steps;
      s.sup_w = 0.0;
      for (double v : deturck_vector_field(s.metric, ref).values) s.sup_w = std::max(s.sup_w, std::abs(v));
      sample_state(s, cfg, cfg.sample);
      if (std::abs(s.cone_factor / cf0 - 1.0) > cfg.cone_drift_tol)
        fail(ErrorCode::convergence, "flow: cone factor drifted from " + std::to_string(cf0) + " to " +
                                         std::to_string(s.cone_factor) + " at t = " + std::to_string(t));
      traj.states.push_back(std::move(s));
      ++next_sample;
    }
  }
  traj.perturbation_order_final = perturbation_order(traj.states.back().metric, ref);
  return traj;
}

MonotonicityReport monotonicity_report(const FlowTrajectory& traj, FlowEntropy which, double tol_mono,
                                       double tol_constant) {
  if (which == FlowEntropy::none) fail(ErrorCode::invalid_argument, "monotonicity_report: no entropy requested");
  if (which != matching_entropy(traj.normalization) || traj.sample != which)
    fail(ErrorCode::normalization, std::string("monotonicity_report: trajectory (") + to_string(traj.normalization) +
                                       ", sampled " + to_string(traj.sample) + ") does not carry " + to_string(which));
  MonotonicityReport r;
  r.which = which;
  r.tol = tol_mono;
  for (const auto& s : traj.states) {
    r.times.push_back(s.t);
    r.values.push_back(*s.entropy);
  }
  r.min_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.values.size(); ++k) {
    const double d = r.values[k] - r.values[k - 1];
    r.min_difference = std::min(r.min_difference, d);
    r.total_variation += std::abs(d);
  }
  if (r.values.size() < 2) r.min_difference = 0.0;
  r.pass = r.min_difference >= -tol_mono;
  r.constant = r.total_variation < tol_constant;
  if (r.constant) {
    const double bound = which == FlowEntropy::lambda ? 1e-8 : 1e-6;
    r.stationarity_residual = 0.0;
    for (const auto& s : traj.states) r.stationarity_residual = std::max(r.stationarity_residual, s.weighted_ric_minus_cg);
    r.stationarity_confirmed = r.stationarity_residual < bound;
  }
  return r;
}

}  // namespace conelab
