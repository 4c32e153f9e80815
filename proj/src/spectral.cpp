#include "conelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conelab/error.hpp"

namespace conelab {

double indicial_nu(int n, double lambda) {
  const double h = 0.5 * (n - 1);
  return std::sqrt(lambda + h * h);
}

IndicialData indicial_exponents(const LinkData& link, double gamma) {
  require(gamma > 0.0, "indicial_exponents: gamma > 0");
  require(!link.laplace_spectrum.empty(), "indicial_exponents: empty spectrum");
  IndicialData d;
  d.n = link.n;
  d.gamma = gamma;
  d.essentially_self_adjoint = link.n >= 3;
  const double h = 0.5 * (link.n - 1);
  for (const auto& e : link.laplace_spectrum) {
    IndicialRow r;
    r.lambda = e.value;
    r.multiplicity = e.multiplicity;
    r.nu = indicial_nu(link.n, e.value);
    r.mu_plus = -h + r.nu;
    r.mu_minus = -h - r.nu;
    r.in_window = r.nu < 1.0;
    d.rows.push_back(r);
  }
  const double l1 = link.lambda1();
  d.gamma_bar = std::isfinite(l1) ? std::min(gamma, -h + indicial_nu(link.n, l1)) : gamma;
  return d;
}

std::vector<double> Pencil::expand(const std::vector<double>& u) const {
  std::vector<double> out(nodes, 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) out[dofs[k]] = u[k];
  if (extend_last && !dofs.empty()) out[nodes - 1] = out[dofs.back()];
  return out;
}

std::vector<double> Pencil::restrict_to_dofs(const std::vector<double>& nodal) const {
  std::vector<double> out(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) out[k] = nodal[dofs[k]];
  return out;
}

double Pencil::energy(const std::vector<double>& u) const {
  const auto Ku = K.apply(u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * Ku[i];
  return s;
}

Pencil assemble_operator(const RadialOperator& op) {
  const RadialMetric& g = op.metric;
  g.validate();
  require(op.c > 0.0, "assemble_operator: c > 0");
  require(op.mode >= 0.0, "assemble_operator: mode eigenvalue >= 0");
  if (g.n() < 3 && op.q != 0.0)
    fail(ErrorCode::precondition, "assemble_operator: n < 3 has several self-adjoint extensions; q != 0 refused");
  const std::size_t N = g.grid.size();
  const auto& x = g.grid.x;
  const auto b = g.b();
  const auto w = volume_weights(g);
  std::vector<double> scal(N, 0.0);
  if (op.q != 0.0) scal = warped_scal(g).values;

  Pencil p;
  p.nodes = N;
  p.extend_last = g.closed_end();
  const bool dirichlet = !g.closed_end() && op.outer == OuterCondition::dirichlet;
  const std::size_t nd = (p.extend_last || dirichlet) ? N - 1 : N;
  for (std::size_t i = 0; i < nd; ++i) p.dofs.push_back(i);
  p.K = num::Tridiagonal(nd);
  p.M.assign(nd, 0.0);
  p.potential.assign(nd, 0.0);

  const int n = g.n();
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double h = x[i + 1] - x[i];
    const double avg = 0.5 * (std::pow(b[i], n) / g.a[i] + std::pow(b[i + 1], n) / g.a[i + 1]);
    const double k = op.c * g.link.vol_F * avg / h;
    if (i + 1 < nd) {
      p.K.diag[i] += k;
      p.K.diag[i + 1] += k;
      p.K.upper[i] -= k;
      p.K.lower[i] -= k;
    } else if (dirichlet) {
      p.K.diag[i] += k;
    }
    // closed end: the last cell carries no gradient
  }
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t d = std::min(i, nd - 1);
    if (i >= nd && dirichlet) continue;
    double pot = op.q * scal[i];
    if (op.mode > 0.0 && b[i] > 0.0) pot += op.c * op.mode / (b[i] * b[i]);
    p.M[d] += w[i];
    p.potential[d] += pot * w[i];
  }
  for (std::size_t i = 0; i < nd; ++i) p.K.diag[i] += p.potential[i];
  if (!p.K.is_symmetric()) fail(ErrorCode::internal, "assemble_operator: non-symmetric stiffness");
  for (double m : p.M)
    if (!(m > 0.0)) fail(ErrorCode::internal, "assemble_operator: nonpositive mass on an unknown");
  return p;
}

namespace {

double m_norm(const std::vector<double>& u, const std::vector<double>& M) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += M[i] * u[i] * u[i];
  return std::sqrt(s);
}

num::Tridiagonal shifted(const Pencil& p, double s) {
  num::Tridiagonal t = p.K;
  for (std::size_t i = 0; i < t.size(); ++i) t.diag[i] -= s * p.M[i];
  return t;
}

// eigenvalues of the pencil below s (LDL^T inertia)
std::size_t count_below(const Pencil& p, double s) {
  std::size_t neg = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = p.K.diag[i] - s * p.M[i] - (i > 0 ? p.K.lower[i - 1] * p.K.upper[i - 1] / d : 0.0);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++neg;
  }
  return neg;
}

}  // namespace

GroundState solve_ground_state(const Pencil& p, const EigenOptions& opt) {
  const std::size_t n = p.size();
  require(n >= 2, "solve_ground_state: too few unknowns");
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) s = std::min(s, p.potential[i] / p.M[i]);
  std::vector<double> u(n, 1.0), Mu(n), Ku;
  const double un = m_norm(u, p.M);
  for (double& v : u) v /= un;
  double hi = p.energy(u);
  double lo = s - std::max(1.0, 1e-3 * std::abs(s));
  while (count_below(p, hi) == 0) hi += std::max(1.0, std::abs(hi));
  for (int k = 0; k < 200 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++k) {
    const double mid = 0.5 * (lo + hi);
    (count_below(p, mid) == 0 ? lo : hi) = mid;
  }
  s = lo - 1e-9 * std::max(1.0, std::abs(lo));
  GroundState gs;
  double rho = 0.0, res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) Mu[i] = p.M[i] * u[i];
    const num::Tridiagonal S = shifted(p, s);
    if (!num::solve_spd(S, Mu, u)) u = num::solve(S, Mu);
    const double nrm = m_norm(u, p.M);
    for (double& v : u) v /= nrm;
    Ku = p.K.apply(u);
    rho = 0.0;
    for (std::size_t i = 0; i < n; ++i) rho += u[i] * Ku[i];
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = Ku[i] - rho * p.M[i] * u[i];
      r2 += r * r / p.M[i];
    }
    res = std::sqrt(r2);
    gs.iterations = it;
    const double scale = std::max(1.0, std::abs(rho));
    if (res < opt.tol * scale) break;
    if (res < 1e-3 * scale) s = rho - std::max(res, 1e-14 * scale);
  }
  const double scale = std::max(1.0, std::abs(rho));
  if (!(res < std::max(opt.tol, 1e-8) * scale))
    fail(ErrorCode::convergence, "solve_ground_state: inverse iteration stalled at residual " + std::to_string(res));

  double sum = 0.0, umax = 0.0;
  for (double v : u) {
    sum += v;
    umax = std::max(umax, std::abs(v));
  }
  if (sum < 0.0)
    for (double& v : u) v = -v;
  for (double v : u)
    if (v < -1e-10 * umax) fail(ErrorCode::positivity, "solve_ground_state: sign-indefinite eigenvector");
  gs.sigma = rho;
  gs.residual = res;
  gs.dof = u;
  gs.u.values = p.expand(u);
  return gs;
}

GroundState solve_ground_state(const RadialOperator& op, const EigenOptions& opt) {
  return solve_ground_state(assemble_operator(op), opt);
}

double power_fit_residual(const std::vector<double>& x, const std::vector<double>& u, double e) {
  std::vector<double> xe(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xe[i] = std::pow(x[i], e);
  return num::fit_line(xe, u).rms;
}

AsymptoticFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& us, double e_lo, double e_hi) {
  if (xs.size() != us.size()) fail(ErrorCode::invalid_argument, "fit_power_law: size mismatch");
  if (xs.size() < 8) fail(ErrorCode::precondition, "fit_asymptotics: fewer than 8 points in the window");
  AsymptoticFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.x_lo = xs.front();
  fit.x_hi = xs.back();

  double umax = 0.0, mean = 0.0;
  for (double v : us) {
    umax = std::max(umax, std::abs(v));
    mean += v;
  }
  mean /= us.size();
  double spread = 0.0;
  for (double v : us) spread = std::max(spread, std::abs(v - mean));

  std::vector<double> lx(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) lx[i] = std::log(xs[i]);
  const num::LineFit lf = num::fit_line(lx, us);
  fit.log_c0 = lf.intercept;
  fit.log_c1 = lf.slope;
  fit.log_residual = lf.rms;

  if (spread <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(umax, 1e-300)) {
    fit.c0 = mean;
    fit.c1 = 0.0;
    fit.exponent = std::numeric_limits<double>::infinity();
    fit.residual = 0.0;
    return fit;
  }

  auto objective = [&](double e) {
    return std::abs(e) < 1e-3 ? std::numeric_limits<double>::infinity() : power_fit_residual(xs, us, e);
  };
  const int scan = 200;
  const double step = (e_hi - e_lo) / scan;
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= scan; ++k) {
    const double v = objective(e_lo + k * step);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double lo = e_lo + (best - 1) * step + (best == 1 ? 1e-9 : 0.0);
  const double hi = e_lo + std::min(best + 1, scan) * step;
  double e = num::golden_minimize(objective, lo, hi, 1e-10);
  if (objective(e) > best_val) e = e_lo + best * step;

  std::vector<double> xe(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xe[i] = std::pow(xs[i], e);
  const num::LineFit pf = num::fit_line(xe, us);
  fit.exponent = e;
  fit.c0 = pf.intercept;
  fit.c1 = pf.slope;
  fit.residual = pf.rms;
  fit.log_suspected = fit.log_residual < fit.residual;
  return fit;
}

AsymptoticFit fit_asymptotics(const RadialField& u, const RadialGrid& grid, const FitOptions& opt) {
  if (u.values.size() != grid.size()) fail(ErrorCode::invalid_argument, "fit_asymptotics: size mismatch");
  const double x_lo = opt.x_lo > 0.0 ? opt.x_lo : 4.0 * grid.x.front();
  const double x_hi = opt.x_hi > 0.0 ? opt.x_hi : grid.L / 10.0;
  std::vector<double> xs, us;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.x[i] >= x_lo && grid.x[i] <= x_hi) {
      xs.push_back(grid.x[i]);
      us.push_back(u.values[i]);
    }
  AsymptoticFit fit = fit_power_law(xs, us, opt.e_lo, opt.e_hi);
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  return fit;
}

}  // namespace conelab
