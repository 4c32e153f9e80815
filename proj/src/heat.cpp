#include "conelab/heat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <numbers>

#include "conelab/error.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

double cone_kernel_mode(int n, double nu, double t, double x, double x_tilde, bool overflow_scaling) {
  require(t > 0.0 && x > 0.0 && x_tilde > 0.0, "cone_kernel_mode: t, x, x~ must be positive");
  require(nu >= 0.0, "cone_kernel_mode: nu >= 0");
  const double z = x * x_tilde / (2.0 * t);
  const double pre = std::pow(x * x_tilde, -0.5 * (n - 1)) / (2.0 * t);
  if (!overflow_scaling) {
    if (z > 600.0) fail(ErrorCode::overflow, "cone_kernel_mode: x x~/2t > 600 needs overflow scaling");
    return pre * bessel_i(nu, z) * std::exp(-(x * x + x_tilde * x_tilde) / (4.0 * t));
  }
  const double d = x - x_tilde;
  return pre * bessel_i_scaled(nu, z) * std::exp(-d * d / (4.0 * t));
}

namespace {

std::vector<double> circle_modes(double t, double x, double x_tilde, double tol, int* used) {
  const double z = x * x_tilde / (2.0 * t);
  int count = static_cast<int>(std::ceil(z + 15.0 * std::sqrt(z + 1.0) + 30.0));
  std::vector<double> s = bessel_i_scaled_sequence(0.0, z, count);
  const double d = x - x_tilde;
  const double g = std::exp(-d * d / (4.0 * t)) / (2.0 * t);
  double total = s[0];
  int k = 1;
  for (; k < count; ++k) {
    total += 2.0 * s[k];
    if (s[k] < tol * total && static_cast<double>(k) > z) break;
  }
  s.resize(std::min(k + 1, count));
  for (double& v : s) v *= g;
  if (used) *used = static_cast<int>(s.size());
  return s;
}

}  // namespace

double circle_cone_kernel(double t, double x, double x_tilde, double phi, double tol, int* modes_used) {
  require(t > 0.0 && x > 0.0 && x_tilde > 0.0, "circle_cone_kernel: positive arguments");
  const std::vector<double> h = circle_modes(t, x, x_tilde, tol, modes_used);
  double s = 0.0;
  for (std::size_t k = h.size(); k-- > 1;) s += h[k] * std::cos(k * phi) / std::numbers::pi;
  return s + h[0] / (2.0 * std::numbers::pi);
}

std::vector<double> circle_cone_kernel(double t, double x, double x_tilde, const std::vector<double>& phis,
                                       double tol, int* modes_used) {
  require(t > 0.0 && x > 0.0 && x_tilde > 0.0, "circle_cone_kernel: positive arguments");
  const std::vector<double> h = circle_modes(t, x, x_tilde, tol, modes_used);
  std::vector<double> out;
  out.reserve(phis.size());
  for (double phi : phis) {
    double s = 0.0;
    for (std::size_t k = h.size(); k-- > 1;) s += h[k] * std::cos(k * phi) / std::numbers::pi;
    out.push_back(s + h[0] / (2.0 * std::numbers::pi));
  }
  return out;
}

double radial_cone_kernel(const LinkData& link, double t, double x, double x_tilde) {
  return cone_kernel_mode(link.n, indicial_nu(link.n, 0.0), t, x, x_tilde) / link.vol_F;
}

namespace {

double truncation_radius(const HeatKernelParams& p, double t) {
  return std::sqrt(4.0 * t * std::log(1.0 / p.series_tol));
}

double mode_nu(const HeatKernelParams& p, double mode) {
  require(mode >= 0.0, "heat: mode eigenvalue >= 0");
  if (p.mode_cutoff >= 0) {
    const auto& spec = p.link.laplace_spectrum;
    const std::size_t top = std::min<std::size_t>(p.mode_cutoff, spec.size() - 1);
    if (mode > spec[top].value) fail(ErrorCode::invalid_argument, "heat: mode beyond mode_cutoff");
  }
  return indicial_nu(p.link.n, mode);
}

double integrate(const std::vector<double>& breaks, int order, const std::function<double(double)>& g) {
  return num::integrate_panels(g, breaks, order);
}

// uniform panels of width <= w on [lo, hi], with the first panel graded toward 0 when lo = 0
std::vector<double> spatial_breaks(double lo, double hi, double w) {
  std::vector<double> br;
  if (!(hi > lo)) return br;
  const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / w)));
  const double step = (hi - lo) / pieces;
  if (lo == 0.0) {
    auto g = num::geometric_breaks(step * 1e-14, step, 2.0, true);
    br.insert(br.end(), g.begin(), g.end());
  } else {
    br.push_back(lo);
    br.push_back(lo + step);
  }
  for (int k = 2; k <= pieces; ++k) br.push_back(k == pieces ? hi : lo + k * step);
  return br;
}

}  // namespace

double heat_apply_at(const HeatKernelParams& params, double t, const std::function<double(double)>& f, double support,
                     double x, double mode) {
  require(t > 0.0, "heat_apply: t > 0");
  require(x > 0.0, "heat_apply: x > 0");
  const double nu = mode_nu(params, mode);
  const int n = params.link.n;
  const double R = truncation_radius(params, t);
  const double lo = std::max(0.0, x - R), hi = std::min(support, x + R);
  const auto br = spatial_breaks(lo, hi, 0.5 * std::sqrt(t));
  return integrate(br, 10, [&](double y) {
    if (y <= 0.0) return 0.0;
    return cone_kernel_mode(n, nu, t, x, y, params.overflow_scaling) * f(y) * std::pow(y, n);
  });
}

HeatResult heat_apply(const HeatKernelParams& params, double t, const RadialField& u, const RadialGrid& grid,
                      double mode) {
  require(t > 0.0, "heat_apply: t > 0");
  if (u.values.size() != grid.size()) fail(ErrorCode::invalid_argument, "heat_apply: size mismatch");
  const double nu = mode_nu(params, mode);
  const int n = params.link.n;
  const num::CubicInterpolant f(grid.x, u.values);
  HeatResult res;
  res.truncation_radius = truncation_radius(params, t);
  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  res.truncation_warning = std::abs(u.values.back()) > params.series_tol * umax;

  const double R = res.truncation_radius, wmax = 0.5 * std::sqrt(t);
  // panels follow the grid cells, subdivided where wider than sqrt(t)/2
  std::vector<double> nodes{0.0};
  for (double xv : grid.x) {
    const double prev = nodes.back();
    const int pieces = std::max(1, static_cast<int>(std::ceil((xv - prev) / wmax)));
    for (int k = 1; k <= pieces; ++k) nodes.push_back(k == pieces ? xv : prev + (xv - prev) * k / pieces);
  }
  res.value.values.resize(grid.size());
  const num::GaussRule& rule = num::gauss_legendre(6);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x[i];
    const auto first = std::upper_bound(nodes.begin(), nodes.end(), x - R);
    const auto last = std::lower_bound(nodes.begin(), nodes.end(), x + R);
    std::size_t a = first == nodes.begin() ? 0 : static_cast<std::size_t>(first - nodes.begin()) - 1;
    std::size_t b = std::min(static_cast<std::size_t>(last - nodes.begin()), nodes.size() - 1);
    double acc = 0.0;
    for (std::size_t p = a; p < b; ++p) {
      const double l = nodes[p], r = nodes[p + 1];
      const double half = 0.5 * (r - l), mid = 0.5 * (r + l);
      double s = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double y = mid + half * rule.nodes[k];
        s += rule.weights[k] * cone_kernel_mode(n, nu, t, x, y, params.overflow_scaling) * f(y) * std::pow(y, n);
      }
      acc += half * s;
    }
    res.value.values[i] = acc;
  }
  return res;
}

std::vector<double> heat_convolve(const HeatKernelParams& params, double t, const std::function<double(double)>& f,
                                  double support, const std::vector<double>& points, double mode) {
  require(t > 0.0, "heat_convolve: t > 0");
  const auto sb = num::geometric_breaks(t * 1e-12, t, 2.0, true);
  std::vector<double> out;
  out.reserve(points.size());
  for (double x : points)
    out.push_back(num::integrate_panels([&](double s) { return s > 0.0 ? heat_apply_at(params, s, f, support, x, mode) : 0.0; },
                                        sb, 8));
  return out;
}

HeatResult heat_convolve(const HeatKernelParams& params, double t, const RadialField& f, const RadialGrid& grid,
                         double mode) {
  if (f.values.size() != grid.size()) fail(ErrorCode::invalid_argument, "heat_convolve: size mismatch");
  const num::CubicInterpolant fi(grid.x, f.values);
  HeatResult res;
  res.truncation_radius = truncation_radius(params, t);
  double fmax = 0.0;
  for (double v : f.values) fmax = std::max(fmax, std::abs(v));
  res.truncation_warning = std::abs(f.values.back()) > params.series_tol * fmax;
  res.value.values = heat_convolve(params, t, [&](double y) { return fi(y); }, grid.L, grid.x, mode);
  return res;
}

MappingRow mapping_exponent_report(const HeatKernelParams& params, double N, const MappingOptions& opt) {
  const int n = params.link.n;
  require(N > 0.0 && N <= n, "mapping_exponent_report: 0 < N <= n");
  MappingRow row;
  row.N = N;
  auto f = [N](double y) { return std::pow(y, -N) * smooth_cutoff(y, 0.5, 1.0); };

  row.x = num::logspace(opt.x_lo, opt.x_hi, opt.x_points);
  row.hf = heat_convolve(params, opt.t, f, 1.0, row.x);
  row.fit = fit_power_law(row.x, row.hf, -4.0, 4.0);
  const AsymptoticFit neg = fit_power_law(row.x, row.hf, -4.0, -0.1);
  const AsymptoticFit pos = fit_power_law(row.x, row.hf, 0.1, 4.0);
  row.best_power_residual_away_from_zero = std::min(neg.residual, pos.residual);
  if (N > 2.0) {
    row.expected = "power";
    row.expected_exponent = 2.0 - N;
    row.spatial_pass = std::abs(row.fit.exponent - row.expected_exponent) <= opt.exponent_tol;
  } else if (N == 2.0) {
    row.expected = "log";
    row.spatial_pass = row.fit.log_residual < row.best_power_residual_away_from_zero;
  } else {
    row.expected = "bounded";
    row.spatial_pass = row.fit.exponent >= -opt.exponent_tol;
  }

  row.t = num::logspace(opt.t_lo, opt.t_hi, opt.t_points);
  std::vector<double> lt, ls;
  for (double t : row.t) {
    std::vector<double> xs{1e-9};
    for (double v : num::logspace(1e-3 * std::sqrt(t), 3.0 * std::sqrt(t), 16)) xs.push_back(v);
    double sup = 0.0;
    for (double x : xs) sup = std::max(sup, std::abs(heat_apply_at(params, t, f, 1.0, x)));
    row.sup_ht.push_back(sup);
    lt.push_back(std::log(t));
    ls.push_back(std::log(sup));
  }
  row.temporal_slope = num::fit_line(lt, ls).slope;
  row.temporal_bound = -0.5 * N + opt.slope_tol;
  row.temporal_pass = row.temporal_slope <= row.temporal_bound;
  return row;
}

DecayCheck dirichlet_decay_check(const RadialMetric& metric, double mode, double t_lo, double t_hi, int steps_per_unit) {
  require(t_hi > t_lo && t_lo >= 0.0, "dirichlet_decay_check: 0 <= t_lo < t_hi");
  require(steps_per_unit >= 10, "dirichlet_decay_check: steps_per_unit >= 10");
  RadialOperator op{metric, 1.0, 0.0, mode, OuterCondition::dirichlet};
  const Pencil p = assemble_operator(op);
  DecayCheck dc;
  dc.sigma1 = solve_ground_state(p).sigma;
  const double dt = 1.0 / steps_per_unit;
  num::Tridiagonal A = p.K;
  for (std::size_t i = 0; i < A.size(); ++i) A.diag[i] = p.M[i] + dt * p.K.diag[i];
  for (std::size_t i = 0; i + 1 < A.size(); ++i) {
    A.lower[i] *= dt;
    A.upper[i] *= dt;
  }
  std::vector<double> u(p.size()), rhs(p.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double x = metric.grid.x[p.dofs[k]] / metric.grid.L;
    u[k] = 1.0 - x * x;
  }
  const int total = static_cast<int>(std::ceil(t_hi * steps_per_unit));
  std::vector<double> lt, ln;
  for (int s = 1; s <= total; ++s) {
    for (std::size_t k = 0; k < u.size(); ++k) rhs[k] = p.M[k] * u[k];
    u = num::solve(A, rhs);
    const double t = s * dt;
    if (t >= t_lo - 1e-12) {
      double nrm = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) nrm += p.M[k] * u[k] * u[k];
      dc.t.push_back(t);
      dc.norm.push_back(std::sqrt(nrm));
      lt.push_back(t);
      ln.push_back(0.5 * std::log(nrm));
    }
  }
  // implicit Euler damps e^{-sigma dt} as 1/(1 + sigma dt); undo that for the rate
  const double slope = -num::fit_line(lt, ln).slope;
  dc.fitted_rate = std::expm1(slope * dt) / dt;
  dc.relative_error = std::abs(dc.fitted_rate - dc.sigma1) / dc.sigma1;
  return dc;
}

}  // namespace conelab

namespace conelab {

FlatKernelCheck flat_circle_kernel_check(std::uint64_t seed, int angles, double t_lo, double t_hi, double x_lo,
                                         double x_hi, double tol) {
  require(angles > 0 && t_lo > 0.0 && t_hi >= t_lo && x_lo > 0.0 && x_hi >= x_lo, "flat kernel check: bad ranges");
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phis(angles);
  for (double& p : phis) p = angle(rng) - angle(rng);
  const auto ts = num::logspace(t_lo, t_hi, 5);
  std::vector<double> xs(5);
  for (int k = 0; k < 5; ++k) xs[k] = x_lo + (x_hi - x_lo) * k / 4.0;
  FlatKernelCheck c;
  for (double t : ts)
    for (double x : xs)
      for (double y : xs) {
        int used = 0;
        const auto H = circle_cone_kernel(t, x, y, phis, tol, &used);
        c.max_modes = std::max(c.max_modes, used);
        const double gmax = std::exp(-(x - y) * (x - y) / (4.0 * t)) / (4.0 * std::numbers::pi * t);
        for (std::size_t k = 0; k < phis.size(); ++k) {
          const double d2 = x * x + y * y - 2.0 * x * y * std::cos(phis[k]);
          const double G = std::exp(-d2 / (4.0 * t)) / (4.0 * std::numbers::pi * t);
          const double e = std::abs(H[k] - G);
          c.max_error_vs_angular_max = std::max(c.max_error_vs_angular_max, e / gmax);
          if (G >= 1e-6 * gmax) c.max_pointwise_relative = std::max(c.max_pointwise_relative, e / G);
          ++c.samples;
        }
      }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

RadialFlatCheck radial_mode_flat_check(std::uint64_t seed, int points) {
  require(points > 0, "radial check: points > 0");
  const LinkData s3 = sphere_link(3, 8);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(std::log(0.01), std::log(1.0)), ux(0.1, 2.0);
  RadialFlatCheck c;
  c.points = points;
  for (int k = 0; k < points; ++k) {
    const double t = std::exp(ut(rng)), x = ux(rng), y = ux(rng);
    // average over S^3 of (4 pi t)^{-2} exp(-|x e - y w|^2 / 4t): density (2/pi) sin^2 on [0, pi]
    const auto f = [&](double th) {
      const double d2 = x * x + y * y - 2.0 * x * y * std::cos(th);
      return std::exp(-d2 / (4.0 * t)) * std::sin(th) * std::sin(th);
    };
    std::vector<double> br(33);
    for (int j = 0; j <= 32; ++j) br[j] = std::numbers::pi * j / 32.0;
    const double avg = (2.0 / std::numbers::pi) * num::integrate_panels(f, br, 20) /
                       (16.0 * std::numbers::pi * std::numbers::pi * t * t);
    const double h = radial_cone_kernel(s3, t, x, y);
    c.max_relative_error = std::max(c.max_relative_error, std::abs(h - avg) / avg);
    const double R = std::sqrt(4.0 * t * std::log(1e16));
    const auto g = [&](double z) { return cone_kernel_mode(3, 1.0, t, x, z) * z * z * z; };
    const auto mb = num::geometric_breaks(1e-6, x + R, 1.2, true);
    std::vector<double> bb(mb.begin(), mb.end());
    for (double z = std::max(0.0, x - R); z < x + R; z += std::sqrt(t) / 2.0) bb.push_back(z);
    std::sort(bb.begin(), bb.end());
    bb.erase(std::unique(bb.begin(), bb.end()), bb.end());
    c.max_mass_error = std::max(c.max_mass_error, std::abs(num::integrate_panels(g, bb, 10) - 1.0));
  }
  return c;
}

}  // namespace conelab
