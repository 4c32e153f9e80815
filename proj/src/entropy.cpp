#include "conelab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "conelab/error.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

const char* to_string(EntropyKind k) {
  switch (k) {
    case EntropyKind::lambda: return "lambda";
    case EntropyKind::mu_minus: return "mu_minus";
    case EntropyKind::mu_plus: return "mu_plus";
    case EntropyKind::nu_minus: return "nu_minus";
    case EntropyKind::nu_plus: return "nu_plus";
  }
  return "unknown";
}

const char* to_string(Sign s) { return s == Sign::minus ? "minus" : "plus"; }

Sign sign_from_string(const std::string& s) {
  if (s == "minus" || s == "-") return Sign::minus;
  if (s == "plus" || s == "+") return Sign::plus;
  fail(ErrorCode::invalid_argument, "sign must be 'minus' or 'plus', got '" + s + "'");
}

namespace {

void require_normalized_link(const RadialMetric& g) {
  const int n = g.n();
  if (std::abs(g.link.scal_F - n * (n - 1.0)) > 1e-12 * std::max(1.0, n * (n - 1.0)))
    fail(ErrorCode::precondition, "entropy: link must satisfy scal_F = n(n-1)");
}

Pencil entropy_pencil(const RadialMetric& g) {
  require_normalized_link(g);
  return assemble_operator(RadialOperator{g, 4.0, 1.0, 0.0, OuterCondition::natural});
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double m_norm_sq(const std::vector<double>& u, const std::vector<double>& M) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += M[i] * u[i] * u[i];
  return s;
}

void normalize(std::vector<double>& u, const std::vector<double>& M) {
  const double s = std::sqrt(m_norm_sq(u, M));
  for (double& v : u) v /= s;
}

// phi-form of W: F(phi) = tau phi^T K phi + sgn 2 sum m phi^2 ln phi on sum m phi^2 = 1
struct Problem {
  const Pencil* P;
  double tau;
  double sgn;  // -1 for W_-, +1 for W_+
  int m;

  double F(const std::vector<double>& phi) const {
    double ent = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) ent += P->M[i] * phi[i] * phi[i] * std::log(phi[i]);
    return tau * P->energy(phi) + sgn * 2.0 * ent;
  }
  double offset() const { return sgn * (0.5 * m * std::log(4.0 * std::numbers::pi * tau) + m); }

  // half gradient minus multiplier term; returns Lambda
  double residual(const std::vector<double>& phi, std::vector<double>& G) const {
    G = P->K.apply(phi);
    for (std::size_t i = 0; i < phi.size(); ++i)
      G[i] = tau * G[i] + sgn * P->M[i] * phi[i] * (2.0 * std::log(phi[i]) + 1.0);
    const double lam = dot(phi, G);
    for (std::size_t i = 0; i < phi.size(); ++i) G[i] -= lam * P->M[i] * phi[i];
    return lam;
  }
  double res_norm(const std::vector<double>& G) const {
    double s = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) s += G[i] * G[i] / P->M[i];
    return std::sqrt(s);
  }
};

struct Solve {
  std::vector<double> phi;
  double F = 0.0;
  double lambda_mult = 0.0;
  double res = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

bool positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

int descend(const Problem& pr, std::vector<double>& phi, int max_iter, double stop) {
  const Pencil& P = *pr.P;
  double pmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < P.size(); ++i) pmin = std::min(pmin, P.potential[i] / P.M[i]);
  const double shift = std::max(1.0, 1.0 - pr.tau * pmin);
  num::Tridiagonal pre = P.K;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    pre.diag[i] = pr.tau * pre.diag[i] + shift * P.M[i];
    if (i + 1 < pre.size()) {
      pre.lower[i] *= pr.tau;
      pre.upper[i] *= pr.tau;
    }
  }
  std::vector<double> G, d, trial;
  double alpha = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    const double lam = pr.residual(phi, G);
    if (pr.res_norm(G) < stop * std::max(1.0, std::abs(lam))) break;
    if (!num::solve_spd(pre, G, d)) d = num::solve(pre, G);
    for (double& v : d) v = -v;
    std::vector<double> Mphi(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) Mphi[i] = P.M[i] * phi[i];
    const double proj = dot(Mphi, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= proj * phi[i];
    const double slope = 2.0 * dot(G, d);
    if (!(slope < 0.0)) break;
    const double f0 = pr.F(phi);
    alpha = std::min(1.0, 2.0 * alpha);
    bool accepted = false;
    for (int h = 0; h < 60; ++h, alpha *= 0.5) {
      trial.resize(phi.size());
      for (std::size_t i = 0; i < phi.size(); ++i) trial[i] = phi[i] + alpha * d[i];
      if (!positive(trial)) continue;
      normalize(trial, P.M);
      if (pr.F(trial) <= f0 + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    phi.swap(trial);
  }
  return it;
}

bool newton(const Problem& pr, std::vector<double>& phi, int max_iter, double tol, int& iters) {
  const Pencil& P = *pr.P;
  std::vector<double> G, Gt, trial, Mphi(phi.size()), rhs(phi.size());
  for (int it = 0; it < max_iter; ++it) {
    ++iters;
    const double lam = pr.residual(phi, G);
    const double res = pr.res_norm(G);
    if (res < tol * std::max(1.0, std::abs(lam))) return true;
    num::Tridiagonal J = P.K;
    for (std::size_t i = 0; i < J.size(); ++i) {
      J.diag[i] = pr.tau * J.diag[i] + pr.sgn * P.M[i] * (2.0 * std::log(phi[i]) + 3.0) - lam * P.M[i];
      if (i + 1 < J.size()) {
        J.lower[i] *= pr.tau;
        J.upper[i] *= pr.tau;
      }
      Mphi[i] = P.M[i] * phi[i];
      rhs[i] = -G[i];
    }
    const double c = 0.5 * (m_norm_sq(phi, P.M) - 1.0);
    std::vector<double> a, b;
    try {
      a = num::solve(J, rhs);
      b = num::solve(J, Mphi);
    } catch (const Error&) {
      return false;
    }
    const double denom = dot(Mphi, b);
    if (!(std::abs(denom) > 0.0)) return false;
    const double dlam = (-c - dot(Mphi, a)) / denom;
    std::vector<double> delta(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) delta[i] = a[i] + dlam * b[i];
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h, t *= 0.5) {
      trial.resize(phi.size());
      for (std::size_t i = 0; i < phi.size(); ++i) trial[i] = phi[i] + t * delta[i];
      if (!positive(trial)) continue;
      normalize(trial, P.M);
      pr.residual(trial, Gt);
      if (pr.res_norm(Gt) < (1.0 - 1e-4 * t) * res) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
    phi.swap(trial);
  }
  const double lam = pr.residual(phi, G);
  return pr.res_norm(G) < tol * std::max(1.0, std::abs(lam));
}

Solve minimize(const Problem& pr, std::vector<double> phi, const EntropyOptions& opt) {
  normalize(phi, pr.P->M);
  Solve s;
  for (int round = 0; round < 4 && !s.converged; ++round) {
    s.iterations += descend(pr, phi, round == 0 ? opt.max_descent : opt.max_descent / 2, 1e-6);
    s.converged = newton(pr, phi, opt.max_newton, opt.el_tol, s.iterations);
  }
  normalize(phi, pr.P->M);
  std::vector<double> G;
  s.lambda_mult = pr.residual(phi, G);
  s.res = pr.res_norm(G);
  s.F = pr.F(phi);
  s.phi = std::move(phi);
  return s;
}

std::vector<double> to_omega(const Pencil& P, const std::vector<double>& phi, double tau, int m) {
  const double scale = std::pow(4.0 * std::numbers::pi * tau, 0.25 * m);
  std::vector<double> w(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = scale * phi[i];
  return P.expand(w);
}

void fill_fields(EntropyReport& r, std::vector<double> omega_nodal) {
  r.omega.values = std::move(omega_nodal);
  r.f.values.resize(r.omega.values.size());
  for (std::size_t i = 0; i < r.f.values.size(); ++i) r.f.values[i] = -2.0 * std::log(r.omega.values[i]);
}

void fill_asymptotics(EntropyReport& r, const RadialMetric& g, const EntropyOptions& opt) {
  if (!opt.fit_asymptotics) return;
  try {
    r.asymptotics = fit_asymptotics(r.omega, g.grid, opt.fit);
    r.has_asymptotics = true;
    r.omega.c0 = r.asymptotics.c0;
    r.omega.exponent = r.asymptotics.exponent;
  } catch (const Error& e) {
    r.warnings.push_back(std::string("asymptotics fit skipped: ") + e.what());
  }
}

std::vector<double> random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

struct MuResult {
  Solve best;
  std::vector<StartResult> starts;
  bool nonconvex = false;
};

MuResult solve_mu(const Pencil& P, const Problem& pr, const EntropyOptions& opt, const std::vector<double>* warm) {
  std::vector<std::pair<std::string, std::vector<double>>> inits;
  if (warm) inits.emplace_back("warm", *warm);
  if (!warm || opt.multistart) inits.emplace_back("constant", std::vector<double>(P.size(), 1.0));
  if (opt.multistart) {
    inits.emplace_back("ground_state", solve_ground_state(P).dof);
    inits.emplace_back("random", random_start(P.size(), opt.seed));
  }
  MuResult out;
  std::vector<Solve> sols;
  for (auto& [name, init] : inits) {
    for (double& v : init) v = std::max(v, 1e-300);
    Solve s = minimize(pr, init, opt);
    out.starts.push_back({name, s.F + pr.offset(), s.res, s.converged});
    sols.push_back(std::move(s));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < sols.size(); ++k) {
    const bool better_conv = sols[k].converged && !sols[best].converged;
    if (better_conv || (sols[k].converged == sols[best].converged && sols[k].F < sols[best].F)) best = k;
  }
  for (std::size_t k = 0; k < sols.size(); ++k) {
    if (k == best || !sols[k].converged) continue;
    std::vector<double> d(P.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = sols[k].phi[i] - sols[best].phi[i];
    if (std::sqrt(m_norm_sq(d, P.M)) > opt.agreement_tol) out.nonconvex = true;
  }
  out.best = std::move(sols[best]);
  return out;
}

double normalization_lhs(const Pencil& P, const std::vector<double>& phi, double tau, int m) {
  double ent = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) ent += P.M[i] * phi[i] * phi[i] * std::log(phi[i]);
  return -2.0 * ent - 0.5 * m * std::log(4.0 * std::numbers::pi * tau);
}

EntropyReport mu_report(const RadialMetric& g, const Pencil& P, double tau, Sign sign, const MuResult& mr,
                        EntropyKind kind, const EntropyOptions& opt) {
  const int m = g.m();
  const Problem pr{&P, tau, sign == Sign::minus ? -1.0 : 1.0, m};
  EntropyReport r;
  r.kind = kind;
  r.tau = tau;
  r.value = mr.best.F + pr.offset();
  r.el_residual = mr.best.res;
  r.iterations = mr.best.iterations;
  r.starts = mr.starts;
  r.nonconvex = mr.nonconvex;
  if (r.nonconvex) r.warnings.push_back("multistart minimizers disagree: functional may be non-convex");
  if (!mr.best.converged) r.warnings.push_back("Newton polish did not reach the EL tolerance");
  fill_fields(r, to_omega(P, mr.best.phi, tau, m));
  const auto w = volume_weights(g);
  double mass = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mass += w[i] * r.omega.values[i] * r.omega.values[i];
  r.constraint_residual = std::abs(std::pow(4.0 * std::numbers::pi * tau, -0.5 * m) * mass - 1.0);
  r.self_consistency = std::abs(r.value - evaluate_w(g, r.omega, tau, sign));
  r.normalization_lhs = normalization_lhs(P, mr.best.phi, tau, m);
  r.normalization_target = sign == Sign::minus ? 0.5 * m + r.value : 0.5 * m - r.value;
  fill_asymptotics(r, g, opt);
  return r;
}

}  // namespace

double evaluate_lambda_functional(const RadialMetric& g, const RadialField& omega) {
  const Pencil P = entropy_pencil(g);
  if (omega.values.size() != g.grid.size()) fail(ErrorCode::invalid_argument, "lambda functional: size mismatch");
  const auto u = P.restrict_to_dofs(omega.values);
  const double nrm = m_norm_sq(u, P.M);
  if (std::abs(nrm - 1.0) > 1e-8) fail(ErrorCode::normalization, "lambda functional: omega must satisfy int omega^2 dV = 1");
  return P.energy(u);
}

double evaluate_w(const RadialMetric& g, const RadialField& omega, double tau, Sign sign) {
  require(tau > 0.0, "evaluate_w: tau > 0");
  const Pencil P = entropy_pencil(g);
  if (omega.values.size() != g.grid.size()) fail(ErrorCode::invalid_argument, "evaluate_w: size mismatch");
  const auto u = P.restrict_to_dofs(omega.values);
  if (!positive(u)) fail(ErrorCode::positivity, "evaluate_w: omega must be positive");
  const int m = g.m();
  const double pref = std::pow(4.0 * std::numbers::pi * tau, -0.5 * m);
  if (std::abs(pref * m_norm_sq(u, P.M) - 1.0) > 1e-8)
    fail(ErrorCode::normalization, "evaluate_w: constraint (4 pi tau)^{-m/2} int omega^2 dV = 1 violated");
  const double sgn = sign == Sign::minus ? -1.0 : 1.0;
  double rest = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    rest += P.M[i] * (2.0 * u[i] * u[i] * std::log(u[i]) + m * u[i] * u[i]);
  return pref * (tau * P.energy(u) + sgn * rest);
}

EntropyReport compute_lambda(const RadialMetric& g, const EntropyOptions& opt) {
  const Pencil P = entropy_pencil(g);
  const GroundState gs = solve_ground_state(P, EigenOptions{std::min(opt.el_tol, 1e-10), 500});
  EntropyReport r;
  r.kind = EntropyKind::lambda;
  r.value = gs.sigma;
  r.el_residual = gs.residual;
  r.iterations = gs.iterations;
  fill_fields(r, gs.u.values);
  r.constraint_residual = std::abs(m_norm_sq(gs.dof, P.M) - 1.0);
  r.self_consistency = std::abs(r.value - P.energy(gs.dof));
  fill_asymptotics(r, g, opt);
  return r;
}

EntropyReport compute_mu(const RadialMetric& g, double tau, Sign sign, const EntropyOptions& opt) {
  require(tau > 0.0, "compute_mu: tau > 0");
  const Pencil P = entropy_pencil(g);
  const Problem pr{&P, tau, sign == Sign::minus ? -1.0 : 1.0, g.m()};
  const MuResult mr = solve_mu(P, pr, opt, nullptr);
  return mu_report(g, P, tau, sign, mr, sign == Sign::minus ? EntropyKind::mu_minus : EntropyKind::mu_plus, opt);
}

EntropyReport mu_simple(const RadialMetric& g, Sign sign, const EntropyOptions& opt) {
  return compute_mu(g, 0.5, sign, opt);
}

EntropyReport compute_nu(const RadialMetric& g, Sign sign, const EntropyOptions& opt) {
  EntropyOptions lopt = opt;
  lopt.fit_asymptotics = false;
  const double lam = compute_lambda(g, lopt).value;
  if (sign == Sign::minus && !(lam > 0.0))
    fail(ErrorCode::precondition, "compute_nu(minus) needs lambda(g) > 0, got " + std::to_string(lam));
  if (sign == Sign::plus && !(lam < 0.0))
    fail(ErrorCode::precondition, "compute_nu(plus) needs lambda(g) < 0, got " + std::to_string(lam));

  const Pencil P = entropy_pencil(g);
  const int m = g.m();
  const double sgn = sign == Sign::minus ? -1.0 : 1.0;
  EntropyOptions inner = opt;
  inner.multistart = false;
  // objective is minimized: mu_- itself, or -mu_+
  std::vector<std::pair<double, std::vector<double>>> cache;
  std::vector<std::pair<double, double>> profile;
  auto nearest = [&](double tau) -> const std::vector<double>* {
    const std::vector<double>* best = nullptr;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& [t, phi] : cache)
      if (std::abs(std::log(t / tau)) < dist) {
        dist = std::abs(std::log(t / tau));
        best = &phi;
      }
    return best;
  };
  auto eval = [&](double tau) {
    const Problem pr{&P, tau, sgn, m};
    const MuResult mr = solve_mu(P, pr, inner, nearest(tau));
    const double mu = mr.best.F + pr.offset();
    cache.emplace_back(tau, mr.best.phi);
    profile.emplace_back(tau, mu);
    return sign == Sign::minus ? mu : -mu;
  };

  const auto taus = num::logspace(opt.tau_lo, opt.tau_hi, opt.tau_scan);
  std::vector<double> vals;
  for (double t : taus) vals.push_back(eval(t));
  const std::size_t k = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  if (k == 0 || k + 1 == vals.size()) {
    std::ostringstream msg;
    msg << "compute_nu: no interior optimum on the tau scan; profile:";
    for (const auto& [t, v] : profile) msg << " (" << t << ", " << v << ")";
    fail(ErrorCode::convergence, msg.str());
  }
  const double lt = num::golden_minimize([&](double s) { return eval(std::exp(s)); }, std::log(taus[k - 1]),
                                         std::log(taus[k + 1]), opt.log_tau_tol);
  const double tau_g = std::exp(lt);

  const Problem pr{&P, tau_g, sgn, m};
  EntropyOptions fin = opt;
  const MuResult mr = solve_mu(P, pr, fin, nearest(tau_g));
  EntropyReport r = mu_report(g, P, tau_g, sign, mr, sign == Sign::minus ? EntropyKind::nu_minus : EntropyKind::nu_plus, opt);
  profile.emplace_back(tau_g, r.value);
  std::sort(profile.begin(), profile.end());
  r.tau_profile = profile;
  r.normalization_checked = true;
  if (std::abs(r.normalization_lhs - r.normalization_target) > 1e-5 * std::max(1.0, std::abs(r.normalization_target)))
    r.warnings.push_back("normalization identity at tau_g off by " +
                         std::to_string(r.normalization_lhs - r.normalization_target));
  return r;
}

RadialMetric perturbed_metric(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link, double eps) {
  if (h_rad.values.size() != g.grid.size() || h_link.values.size() != g.grid.size())
    fail(ErrorCode::invalid_argument, "perturbed_metric: size mismatch");
  RadialMetric out = g;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    const double fr = 1.0 + eps * h_rad.values[i], fl = 1.0 + eps * h_link.values[i];
    if (!(fr > 0.0) || !(fl > 0.0)) fail(ErrorCode::positivity, "perturbed_metric: g + eps h is not positive");
    out.a[i] *= std::sqrt(fr);
    out.beta[i] *= std::sqrt(fl);
  }
  return out;
}

double first_variation_lambda(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link,
                              const EntropyReport* lambda_report) {
  EntropyReport local;
  if (!lambda_report) {
    EntropyOptions o;
    o.fit_asymptotics = false;
    local = compute_lambda(g, o);
    lambda_report = &local;
  }
  const RicciComponents ric = warped_ricci(g);
  const HessianComponents hess = radial_hessian(lambda_report->f, g);
  const auto w = volume_weights(g);
  const int n = g.n();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double tr = ric.ric_rad.values[i] + hess.hess_rad.values[i];
    const double tl = ric.ric_link.values[i] + hess.hess_link.values[i];
    const double om = lambda_report->omega.values[i];
    s += w[i] * (h_rad.values[i] * tr + n * h_link.values[i] * tl) * om * om;
  }
  return -s;
}

VariationCheck first_variation_check(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link,
                                     double eps) {
  VariationCheck vc;
  vc.formula = first_variation_lambda(g, h_rad, h_link);
  EntropyOptions o;
  o.fit_asymptotics = false;
  for (double e : {eps, 0.5 * eps, 0.25 * eps}) {
    const double lp = compute_lambda(perturbed_metric(g, h_rad, h_link, e), o).value;
    const double lm = compute_lambda(perturbed_metric(g, h_rad, h_link, -e), o).value;
    vc.eps.push_back(e);
    vc.central.push_back((lp - lm) / (2.0 * e));
  }
  const double d1 = vc.central[0] - vc.central[1], d2 = vc.central[1] - vc.central[2];
  vc.richardson_order = std::log2(std::abs(d1 / d2));
  vc.extrapolated = vc.central[2] - d2 / 3.0;
  vc.relative_gap = std::abs(vc.formula - vc.extrapolated) / std::max(std::abs(vc.extrapolated), 1e-300);
  return vc;
}

std::pair<RadialField, RadialField> lie_derivative_radial(const RadialMetric& g, const RadialField& xi) {
  if (xi.values.size() != g.grid.size()) fail(ErrorCode::invalid_argument, "lie_derivative_radial: size mismatch");
  const MetricDerivatives d = metric_derivatives(g);
  std::vector<double> axi(xi.values.size());
  for (std::size_t i = 0; i < axi.size(); ++i) axi[i] = g.a[i] * xi.values[i];
  const auto axi1 = dx1(axi, g.grid);
  RadialField hr, hl;
  hr.values.resize(axi.size());
  hl.values.resize(axi.size());
  for (std::size_t i = 0; i < axi.size(); ++i) {
    hr.values[i] = 2.0 * axi1[i] / g.a[i];
    hl.values[i] = d.b[i] > 0.0 ? 2.0 * d.b1[i] * xi.values[i] / d.b[i] : 0.0;
  }
  return {hr, hl};
}

}  // namespace conelab
