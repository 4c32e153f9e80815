#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "conelab/error.hpp"
#include "conelab/heat.hpp"

namespace conelab {

namespace {

// log of the series sum_k (z/2)^{nu+2k} / (k! Gamma(nu+k+1))
double log_series(double nu, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0, sum = 1.0, log_offset = 0.0;
  for (int k = 0; k < 100000; ++k) {
    term *= q / ((k + 1.0) * (nu + k + 1.0));
    sum += term;
    if (term < 1e-17 * sum && k + 1.0 > 0.5 * z) break;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      log_offset += 250.0 * std::numbers::ln10;
    }
  }
  return nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) + log_offset + std::log(sum);
}

// e^{-z} I_nu(z) sqrt(2 pi z) for large z
double hankel_scaled(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = -term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term) && k > 1) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

using Poly = std::vector<double>;

const std::vector<Poly>& debye_polynomials() {
  static const std::vector<Poly> U = [] {
    std::vector<Poly> u{{1.0}};
    for (int k = 0; k < 12; ++k) {
      const Poly& p = u.back();
      Poly next(p.size() + 3, 0.0);
      // 1/2 p^2 (1 - p^2) U'
      for (std::size_t j = 1; j < p.size(); ++j) {
        const double d = j * p[j];  // coefficient of p^{j-1}
        next[j + 1] += 0.5 * d;
        next[j + 3] -= 0.5 * d;
      }
      // 1/8 int_0^p (1 - 5 t^2) U(t) dt
      for (std::size_t j = 0; j < p.size(); ++j) {
        next[j + 1] += 0.125 * p[j] / (j + 1.0);
        next[j + 3] -= 0.625 * p[j] / (j + 3.0);
      }
      u.push_back(next);
    }
    return u;
  }();
  return U;
}

double poly_eval(const Poly& p, double x) {
  double s = 0.0;
  for (std::size_t j = p.size(); j-- > 0;) s = s * x + p[j];
  return s;
}

// log of e^{-z} I_nu(z) by the uniform expansion in nu
double debye_log_scaled(double nu, double z) {
  const double w = z / nu;
  const double s = std::sqrt(1.0 + w * w);
  const double p = 1.0 / s;
  const double eta = s + std::log(w / (1.0 + s));
  const auto& U = debye_polynomials();
  double sum = 0.0, pw = 1.0;
  for (const Poly& u : U) {
    sum += poly_eval(u, p) * pw;
    pw /= nu;
  }
  return nu * eta - z - 0.5 * std::log(2.0 * std::numbers::pi * nu) - 0.25 * std::log(1.0 + w * w) + std::log(sum);
}

double log_scaled(double nu, double z) {
  if (z <= 30.0) return log_series(nu, z) - z;
  if (nu * nu <= 0.5 * z) return std::log(hankel_scaled(nu, z)) - 0.5 * std::log(2.0 * std::numbers::pi * z);
  if (nu >= 20.0) return debye_log_scaled(nu, z);
  return log_series(nu, z) - z;
}

}  // namespace

double bessel_i_scaled(double nu, double z) {
  require(nu >= 0.0 && z >= 0.0, "bessel_i: nu >= 0 and z >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return std::exp(log_scaled(nu, z));
}

double bessel_i(double nu, double z) {
  require(nu >= 0.0 && z >= 0.0, "bessel_i: nu >= 0 and z >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return std::exp(log_scaled(nu, z) + z);
}

std::vector<double> bessel_i_scaled_sequence(double nu, double z, int count) {
  require(count >= 1, "bessel sequence: count >= 1");
  std::vector<double> out(count);
  if (count < 3 || z < 1.0) {
    for (int k = 0; k < count; ++k) out[k] = bessel_i_scaled(nu + k, z);
    return out;
  }
  out[count - 1] = bessel_i_scaled(nu + count - 1, z);
  out[count - 2] = bessel_i_scaled(nu + count - 2, z);
  if (out[count - 1] < 1e-280) {
    for (int k = 0; k < count - 2; ++k) out[k] = bessel_i_scaled(nu + k, z);
    return out;
  }
  for (int k = count - 2; k >= 1; --k) out[k - 1] = out[k + 1] + 2.0 * (nu + k) / z * out[k];
  return out;
}

}  // namespace conelab
