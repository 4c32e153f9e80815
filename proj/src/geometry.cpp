#include "conelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "conelab/error.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

RadialGrid RadialGrid::graded(double L, int N, double p) {
  require(L > 0.0, "grid: L > 0");
  require(N >= 8, "grid: N >= 8");
  require(p >= 1.0, "grid: grading exponent p >= 1");
  RadialGrid g;
  g.L = L;
  g.N = N;
  g.p = p;
  g.x.resize(N);
  for (int i = 1; i <= N; ++i) g.x[i - 1] = L * std::pow(static_cast<double>(i) / N, p);
  g.x.back() = L;
  return g;
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::two_cones: return "two_cones";
    case Topology::cone_and_cap: return "cone_and_cap";
    case Topology::cone_and_boundary: return "cone_and_boundary";
  }
  return "unknown";
}

Topology topology_from_string(const std::string& s) {
  if (s == "two_cones") return Topology::two_cones;
  if (s == "cone_and_cap") return Topology::cone_and_cap;
  if (s == "cone_and_boundary") return Topology::cone_and_boundary;
  fail(ErrorCode::invalid_argument, "unknown topology '" + s + "'");
}

const char* to_string(WarpProfile p) {
  switch (p) {
    case WarpProfile::linear: return "linear";
    case WarpProfile::bilinear: return "bilinear";
    case WarpProfile::sine: return "sine";
  }
  return "unknown";
}

WarpProfile profile_from_string(const std::string& s) {
  if (s == "linear") return WarpProfile::linear;
  if (s == "bilinear") return WarpProfile::bilinear;
  if (s == "sine") return WarpProfile::sine;
  fail(ErrorCode::invalid_argument, "unknown warp profile '" + s + "'");
}

ProfileValues profile_at(WarpProfile p, double L, double x) {
  switch (p) {
    case WarpProfile::linear: return {x, 1.0, 0.0};
    case WarpProfile::bilinear: return {x == L ? 0.0 : x * (L - x) / L, (L - 2.0 * x) / L, -2.0 / L};
    case WarpProfile::sine: {
      const double k = std::numbers::pi / L;
      return {x == L ? 0.0 : std::sin(k * x) / k, std::cos(k * x), -k * std::sin(k * x)};
    }
  }
  return {x, 1.0, 0.0};
}

std::vector<double> RadialMetric::b() const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile_at(profile, grid.L, grid.x[i]).rho * beta[i];
  return out;
}

void RadialMetric::validate() const {
  link.validate();
  if (grid.size() < 8) fail(ErrorCode::invalid_argument, "metric: grid too small");
  if (a.size() != grid.size() || beta.size() != grid.size())
    fail(ErrorCode::invalid_argument, "metric: field sizes do not match the grid");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i])) fail(ErrorCode::positivity, "metric: a must be positive and finite");
    if (!(beta[i] > 0.0) || !std::isfinite(beta[i])) fail(ErrorCode::positivity, "metric: b must be positive");
  }
  if (closed_end() && profile == WarpProfile::linear)
    fail(ErrorCode::invalid_argument, "metric: closed topologies need a profile vanishing at L");
  if (!closed_end() && profile != WarpProfile::linear)
    fail(ErrorCode::invalid_argument, "metric: cone_and_boundary uses the linear profile");
}

namespace {

// Fornberg weights for derivatives 0..2 at z on the given stencil
void fd_weights(const double* xs, int m, double z, double w[3][6]) {
  double c1 = 1.0, c4 = xs[0] - z;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < m; ++j) w[k][j] = 0.0;
  w[0][0] = 1.0;
  for (int i = 1; i < m; ++i) {
    const int mn = std::min(i, 2);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
        w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) w[k][j] = (c4 * w[k][j] - k * w[k - 1][j]) / c3;
      w[0][j] = c4 * w[0][j] / c3;
    }
    c1 = c2;
  }
}

// three-point stencil in x on interior nodes, five nearest nodes at the ends
std::pair<double, double> node_derivs(const std::vector<double>& f, const std::vector<double>& x, std::size_t i) {
  const std::size_t n = f.size();
  std::size_t start = i - 1;
  int m = 3;
  if (i < 2 || i + 2 >= n) {
    start = i < 2 ? 0 : n - 5;
    m = 5;
  }
  double w[3][6];
  fd_weights(&x[start], m, x[i], w);
  double d1 = 0.0, d2 = 0.0;
  for (int j = 0; j < m; ++j) {
    const double df = f[start + j] - f[i];
    d1 += w[1][j] * df;
    d2 += w[2][j] * df;
  }
  return {d1, d2};
}

void check_field(const std::vector<double>& f, const RadialGrid& grid) {
  if (f.size() != grid.size()) fail(ErrorCode::invalid_argument, "field size does not match the grid");
  if (f.size() < 5) fail(ErrorCode::invalid_argument, "field needs at least 5 nodes");
}

// fill node k from the four nodes before it
void extrapolate_last(std::vector<double>& f, const RadialGrid& grid) {
  const std::size_t k = f.size() - 1;
  const double xs[4] = {grid.x[k - 4], grid.x[k - 3], grid.x[k - 2], grid.x[k - 1]};
  const double ys[4] = {f[k - 4], f[k - 3], f[k - 2], f[k - 1]};
  f[k] = num::lagrange_eval(xs, ys, grid.x[k]);
}

}  // namespace

std::vector<double> dx1(const std::vector<double>& f, const RadialGrid& grid) {
  check_field(f, grid);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = node_derivs(f, grid.x, i).first;
  return out;
}

std::vector<double> dx2(const std::vector<double>& f, const RadialGrid& grid) {
  check_field(f, grid);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = node_derivs(f, grid.x, i).second;
  return out;
}

MetricDerivatives metric_derivatives(const RadialMetric& g) {
  MetricDerivatives d;
  d.a = g.a;
  d.a1 = dx1(g.a, g.grid);
  d.a2 = dx2(g.a, g.grid);
  const auto be1 = dx1(g.beta, g.grid);
  const auto be2 = dx2(g.beta, g.grid);
  const std::size_t n = g.grid.size();
  d.b.resize(n);
  d.b1.resize(n);
  d.b2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProfileValues r = profile_at(g.profile, g.grid.L, g.grid.x[i]);
    d.b[i] = r.rho * g.beta[i];
    d.b1[i] = r.d1 * g.beta[i] + r.rho * be1[i];
    d.b2[i] = r.d2 * g.beta[i] + 2.0 * r.d1 * be1[i] + r.rho * be2[i];
  }
  return d;
}

RicciComponents warped_ricci(const RadialMetric& g) {
  g.validate();
  const MetricDerivatives d = metric_derivatives(g);
  const int n = g.n();
  const double kF = g.link.einstein_constant();
  const std::size_t N = g.grid.size();
  RicciComponents r;
  r.ric_rad.values.resize(N);
  r.ric_link.values.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (d.b[i] <= 0.0) continue;
    const double bs = d.b1[i] / d.a[i];
    const double bss = (d.b2[i] - d.a1[i] * d.b1[i] / d.a[i]) / (d.a[i] * d.a[i]);
    r.ric_rad.values[i] = -n * bss / d.b[i];
    r.ric_link.values[i] = -bss / d.b[i] + (kF - (n - 1) * bs * bs) / (d.b[i] * d.b[i]);
  }
  if (g.closed_end()) {
    extrapolate_last(r.ric_rad.values, g.grid);
    extrapolate_last(r.ric_link.values, g.grid);
  }
  return r;
}

RadialField warped_scal(const RadialMetric& g) {
  const RicciComponents r = warped_ricci(g);
  RadialField s;
  s.values.resize(r.ric_rad.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    s.values[i] = r.ric_rad.values[i] + g.n() * r.ric_link.values[i];
  return s;
}

std::vector<double> volume_weights(const RadialMetric& g) {
  const std::vector<double> b = g.b();
  const std::vector<double>& x = g.grid.x;
  const std::size_t N = x.size();
  const int n = g.n();
  std::vector<double> F(N), w(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) F[i] = g.a[i] * std::pow(b[i], n);
  w[0] += F[0] * x[0] / (n + 1.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h * F[i];
    w[i + 1] += 0.5 * h * F[i + 1];
  }
  for (double& v : w) v *= g.link.vol_F;
  return w;
}

double total_volume(const RadialMetric& g) {
  const auto w = volume_weights(g);
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

double weighted_sup_norm(const RadialField& u, const RadialGrid& grid, double gamma) {
  check_field(u.values, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s = std::max(s, std::abs(u.values[i]) * std::pow(grid.x[i], -gamma));
  return s;
}

HessianComponents radial_hessian(const RadialField& f, const RadialMetric& g) {
  check_field(f.values, g.grid);
  const MetricDerivatives d = metric_derivatives(g);
  const auto f1 = dx1(f.values, g.grid);
  const auto f2 = dx2(f.values, g.grid);
  const std::size_t N = g.grid.size();
  HessianComponents h;
  h.hess_rad.values.resize(N);
  h.hess_link.values.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double a2 = d.a[i] * d.a[i];
    h.hess_rad.values[i] = (f2[i] - d.a1[i] * f1[i] / d.a[i]) / a2;
    h.hess_link.values[i] = d.b[i] > 0.0 ? d.b1[i] * f1[i] / (a2 * d.b[i]) : 0.0;
  }
  if (g.closed_end()) extrapolate_last(h.hess_link.values, g.grid);
  return h;
}

RadialField radial_laplacian(const RadialField& f, const RadialMetric& g) {
  const HessianComponents h = radial_hessian(f, g);
  RadialField out;
  out.values.resize(h.hess_rad.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = h.hess_rad.values[i] + g.n() * h.hess_link.values[i];
  return out;
}

double weighted_sobolev_norm(const RadialField& u, const RadialMetric& g, int s, double delta) {
  require(s >= 0 && s <= 2, "weighted_sobolev_norm: s in {0, 1, 2}");
  check_field(u.values, g.grid);
  const auto w = volume_weights(g);
  const auto& x = g.grid.x;
  const std::size_t N = x.size();
  std::vector<double> grad_sq(N, 0.0), hess_sq(N, 0.0);
  if (s >= 1) {
    const auto u1 = dx1(u.values, g.grid);
    for (std::size_t i = 0; i < N; ++i) grad_sq[i] = u1[i] * u1[i] / (g.a[i] * g.a[i]);
  }
  if (s >= 2) {
    const HessianComponents h = radial_hessian(u, g);
    for (std::size_t i = 0; i < N; ++i)
      hess_sq[i] = h.hess_rad.values[i] * h.hess_rad.values[i] + g.n() * h.hess_link.values[i] * h.hess_link.values[i];
  }
  double total = 0.0;
  for (int k = 0; k <= s; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = k == 0 ? u.values[i] * u.values[i] : (k == 1 ? grad_sq[i] : hess_sq[i]);
      acc += w[i] * std::pow(x[i], 2.0 * (k - delta)) * q;
    }
    total += std::sqrt(acc);
  }
  return total;
}

RadialMetric scaled(const RadialMetric& g, double c) {
  require(c > 0.0, "scaled: factor must be positive");
  RadialMetric out = g;
  for (double& v : out.a) v *= c;
  for (double& v : out.beta) v *= c;
  return out;
}

double cone_factor(const RadialMetric& g) {
  double xs[4], ys[4];
  for (int k = 0; k < 4; ++k) {
    xs[k] = g.grid.x[k];
    ys[k] = g.beta[k] / g.a[k];
  }
  return num::lagrange_eval(xs, ys, 0.0);
}

double smooth_cutoff(double x, double lo, double hi) {
  if (x <= lo) return 1.0;
  if (x >= hi) return 0.0;
  const double t = (x - lo) / (hi - lo);
  const double f0 = std::exp(-1.0 / (1.0 - t)), f1 = std::exp(-1.0 / t);
  return f0 / (f0 + f1);
}

std::vector<std::string> preset_names() {
  return {"flat_cone", "sphere_suspension", "perturbed_cone", "perturbed_suspension", "hyperbolic_cone"};
}

namespace {

RadialMetric from_functions(const LinkData& link, const RadialGrid& grid, WarpProfile profile, Topology topo,
                            double gamma, const std::function<double(double)>& a,
                            const std::function<double(double)>& b, const std::function<double(double)>& b1) {
  RadialMetric g;
  g.link = link;
  g.grid = grid;
  g.profile = profile;
  g.topology = topo;
  g.gamma = gamma;
  g.a.resize(grid.size());
  g.beta.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x[i];
    const ProfileValues r = profile_at(profile, grid.L, x);
    g.a[i] = a(x);
    g.beta[i] = r.rho > 0.0 ? b(x) / r.rho : b1(x) / r.d1;
  }
  g.validate();
  return g;
}

}  // namespace

RadialMetric make_preset(const PresetSpec& spec, const LinkData& link) {
  const double c = spec.scale;
  require(c > 0.0, "preset: scale must be positive");
  const double A = spec.amplitude, gam = spec.gamma;
  const double inf = std::numeric_limits<double>::infinity();
  const std::string& nm = spec.name;
  if (nm == "flat_cone" || nm == "perturbed_cone" || nm == "hyperbolic_cone") {
    const double L = spec.L > 0.0 ? spec.L : 1.0;
    const RadialGrid grid = RadialGrid::graded(L, spec.N, spec.p);
    if (spec.profile && *spec.profile != WarpProfile::linear)
      fail(ErrorCode::invalid_argument, "preset " + nm + ": open segments use the linear profile");
    auto one = [c](double) { return c; };
    if (nm == "flat_cone")
      return from_functions(link, grid, WarpProfile::linear, Topology::cone_and_boundary, inf, one,
                            [c](double x) { return c * x; }, [c](double) { return c; });
    if (nm == "perturbed_cone") {
      require(gam > 0.0, "perturbed_cone: gamma > 0");
      auto b = [=](double x) { return c * x * (1.0 + A * std::pow(x, gam) * smooth_cutoff(x, L / 3, 2 * L / 3)); };
      return from_functions(link, grid, WarpProfile::linear, Topology::cone_and_boundary, gam, one, b,
                            [c](double) { return c; });
    }
    return from_functions(link, grid, WarpProfile::linear, Topology::cone_and_boundary, 2.0, one,
                          [c](double x) { return c * std::sinh(x); }, [c](double x) { return c * std::cosh(x); });
  }
  if (nm == "sphere_suspension" || nm == "perturbed_suspension") {
    const double L = std::numbers::pi;
    if (spec.L > 0.0 && std::abs(spec.L - L) > 1e-12)
      fail(ErrorCode::invalid_argument, "preset " + nm + ": L is fixed to pi");
    const RadialGrid grid = RadialGrid::graded(L, spec.N, spec.p);
    const WarpProfile prof = spec.profile.value_or(WarpProfile::bilinear);
    if (prof == WarpProfile::linear) fail(ErrorCode::invalid_argument, "preset " + nm + ": closed ends need a vanishing profile");
    auto one = [c](double) { return c; };
    if (nm == "sphere_suspension")
      return from_functions(link, grid, prof, Topology::cone_and_cap, inf, one,
                            [c](double x) { return c * std::sin(x); }, [c](double x) { return c * std::cos(x); });
    require(gam > 0.0, "perturbed_suspension: gamma > 0");
    auto b = [=](double x) { return c * std::sin(x) * (1.0 + A * std::pow(std::sin(x), gam)); };
    auto b1 = [=](double x) { return c * std::cos(x) * (1.0 + A * (1.0 + gam) * std::pow(std::sin(x), gam)); };
    return from_functions(link, grid, prof, Topology::two_cones, gam, one, b, b1);
  }
  fail(ErrorCode::invalid_argument, "unknown metric preset '" + nm + "'");
}

RadialMetric load_metric_csv(const std::string& path, const LinkData& link, Topology topology, int N, double p,
                             double gamma) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot open metric CSV '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) fail(ErrorCode::io, "metric CSV is empty");
  line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return ch == ' ' || ch == '\r'; }), line.end());
  if (line != "x,a,b") fail(ErrorCode::io, "metric CSV header must be 'x,a,b'");
  std::vector<double> xs, as, bs;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    double x, a, b;
    if (!(in >> x >> a >> b)) fail(ErrorCode::io, "metric CSV line " + std::to_string(lineno) + ": expected x,a,b");
    if (!xs.empty() && !(x > xs.back())) fail(ErrorCode::io, "metric CSV: x must be strictly increasing");
    xs.push_back(x);
    as.push_back(a);
    bs.push_back(b);
  }
  if (xs.size() < 8) fail(ErrorCode::io, "metric CSV: need at least 8 rows");
  if (xs.front() < 0.0) fail(ErrorCode::io, "metric CSV: x must be nonnegative");
  const double L = xs.back();
  const WarpProfile prof = topology == Topology::cone_and_boundary ? WarpProfile::linear : WarpProfile::bilinear;
  std::vector<double> bx, bv, ax, av;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const ProfileValues r = profile_at(prof, L, xs[i]);
    if (xs[i] > 0.0) {
      ax.push_back(xs[i]);
      av.push_back(as[i]);
    }
    if (r.rho > 0.0 && xs[i] > 0.0) {
      bx.push_back(xs[i]);
      bv.push_back(bs[i] / r.rho);
    }
  }
  const num::CubicInterpolant ia(ax, av, true), ib(bx, bv, true);
  RadialMetric g;
  g.link = link;
  g.grid = RadialGrid::graded(L, N, p);
  g.profile = prof;
  g.topology = topology;
  g.gamma = gamma;
  for (double x : g.grid.x) {
    g.a.push_back(ia(x));
    g.beta.push_back(ib(x));
  }
  g.validate();
  return g;
}

}  // namespace conelab
