#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace conelab::num {

/// Tridiagonal matrix stored by diagonals. Square of size diag.size().
struct Tridiagonal {
  std::vector<double> lower;  // size n-1, entry (i+1, i)
  std::vector<double> diag;   // size n
  std::vector<double> upper;  // size n-1, entry (i, i+1)

  Tridiagonal() = default;
  explicit Tridiagonal(std::size_t n) : lower(n ? n - 1 : 0, 0.0), diag(n, 0.0), upper(n ? n - 1 : 0, 0.0) {}

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> v) const;
  bool is_symmetric(double rel_tol = 0.0) const;
};

/// Solves T y = rhs with partial pivoting (LAPACK gtsv). Throws convergence
/// error when the factorization hits an exactly singular pivot.
std::vector<double> solve(const Tridiagonal& t, std::span<const double> rhs);

/// Symmetric positive definite solve (LAPACK ptsv, L D L^T). Returns false
/// when the matrix is not positive definite.
bool solve_spd(const Tridiagonal& t, std::span<const double> rhs, std::vector<double>& out);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes, computed once per n and cached.
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre over consecutive breakpoints.
double integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks, int order = 10);

/// Geometric panel breakpoints from lo to hi (lo > 0) with ratio at most `ratio`,
/// prefixed by 0 when include_zero is set.
std::vector<double> geometric_breaks(double lo, double hi, double ratio, bool include_zero);

/// Local cubic Lagrange interpolation on a strictly increasing abscissa.
/// Outside [x_front, x_back] the default holds the end value on the left and
/// returns zero on the right (fields vanish past their support); with
/// `extrapolate` the end cubics are continued instead.
class CubicInterpolant {
 public:
  CubicInterpolant(std::vector<double> x, std::vector<double> y, bool extrapolate = false);
  double operator()(double at) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  bool extrapolate_ = false;
};

/// Value at `at` of the polynomial through (xs[k], ys[k]).
double lagrange_eval(std::span<const double> xs, std::span<const double> ys, double at);

/// Minimizes a unimodal function on [lo, hi] by golden-section search.
/// Returns the abscissa; `fmin` receives the value when non-null.
double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                       double* fmin = nullptr, int max_iter = 200);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Observed order of convergence from a sequence of errors for
/// resolutions growing by a constant factor: least-squares slope of
/// -log(err) against log(resolution).
double observed_order(std::span<const double> resolution, std::span<const double> error);

std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace conelab::num
