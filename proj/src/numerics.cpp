#include "conelab/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "conelab/error.hpp"

namespace conelab::num {

std::vector<double> Tridiagonal::apply(std::span<const double> v) const {
  const std::size_t n = size();
  if (v.size() != n) fail(ErrorCode::invalid_argument, "tridiagonal apply: size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += lower[i - 1] * v[i - 1];
    if (i + 1 < n) s += upper[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

bool Tridiagonal::is_symmetric(double rel_tol) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const double scale = std::max(std::abs(lower[i]), std::abs(upper[i]));
    if (std::abs(lower[i] - upper[i]) > rel_tol * scale) return false;
  }
  return true;
}

std::vector<double> solve(const Tridiagonal& t, std::span<const double> rhs) {
  const std::size_t n = t.size();
  if (rhs.size() != n) fail(ErrorCode::invalid_argument, "tridiagonal solve: size mismatch");
  if (n == 0) return {};
  std::vector<double> dl = t.lower, d = t.diag, du = t.upper;
  std::vector<double> b(rhs.begin(), rhs.end());
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, dl.data(), d.data(),
                                        du.data(), b.data(), static_cast<lapack_int>(n));
  if (info != 0) fail(ErrorCode::convergence, "tridiagonal solve: singular pivot at row " + std::to_string(info));
  return b;
}

bool solve_spd(const Tridiagonal& t, std::span<const double> rhs, std::vector<double>& out) {
  const std::size_t n = t.size();
  if (rhs.size() != n) fail(ErrorCode::invalid_argument, "tridiagonal solve: size mismatch");
  std::vector<double> d = t.diag, e = t.lower;
  out.assign(rhs.begin(), rhs.end());
  if (n == 0) return true;
  const lapack_int info = LAPACKE_dptsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, d.data(), e.data(), out.data(),
                                        static_cast<lapack_int>(n));
  return info == 0;
}

namespace {

GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 256) fail(ErrorCode::invalid_argument, "gauss_legendre: order out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

double integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks, int order) {
  const GaussRule& rule = gauss_legendre(order);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
    total += half * s;
  }
  return total;
}

std::vector<double> geometric_breaks(double lo, double hi, double ratio, bool include_zero) {
  std::vector<double> out;
  if (include_zero) out.push_back(0.0);
  if (!(hi > lo) || lo <= 0.0) {
    out.push_back(hi);
    return out;
  }
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::log(hi / lo) / std::log(ratio))));
  const double r = std::pow(hi / lo, 1.0 / pieces);
  double v = lo;
  for (int k = 0; k <= pieces; ++k) {
    out.push_back(k == pieces ? hi : v);
    v *= r;
  }
  return out;
}

CubicInterpolant::CubicInterpolant(std::vector<double> x, std::vector<double> y, bool extrapolate)
    : x_(std::move(x)), y_(std::move(y)), extrapolate_(extrapolate) {
  if (x_.size() != y_.size() || x_.size() < 4) fail(ErrorCode::invalid_argument, "CubicInterpolant: need >= 4 points");
}

double CubicInterpolant::operator()(double at) const {
  if (!extrapolate_) {
    if (at <= x_.front()) return y_.front();
    if (at > x_.back()) return 0.0;
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), at);
  std::size_t j = static_cast<std::size_t>(it - x_.begin());  // x_[j-1] <= at < x_[j]
  std::size_t start = j >= 2 ? j - 2 : 0;
  start = std::min(start, x_.size() - 4);
  double s = 0.0;
  for (std::size_t a = start; a < start + 4; ++a) {
    double l = 1.0;
    for (std::size_t b = start; b < start + 4; ++b)
      if (b != a) l *= (at - x_[b]) / (x_[a] - x_[b]);
    s += l * y_[a];
  }
  return s;
}

double lagrange_eval(std::span<const double> xs, std::span<const double> ys, double at) {
  double s = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    double l = 1.0;
    for (std::size_t b = 0; b < xs.size(); ++b)
      if (b != a) l *= (at - xs[b]) / (xs[a] - xs[b]);
    s += l * ys[a];
  }
  return s;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol, double* fmin,
                       int max_iter) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double xm = fc < fd ? c : d;
  if (fmin) *fmin = std::min(fc, fd);
  return xm;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) fail(ErrorCode::invalid_argument, "fit_line: need >= 2 matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

double observed_order(std::span<const double> resolution, std::span<const double> error) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < resolution.size(); ++i) {
    lx.push_back(std::log(resolution[i]));
    ly.push_back(-std::log(std::abs(error[i])));
  }
  return fit_line(lx, ly).slope;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace conelab::num
