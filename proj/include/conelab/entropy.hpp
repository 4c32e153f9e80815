#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conelab/geometry.hpp"
#include "conelab/spectral.hpp"

namespace conelab {

enum class EntropyKind { lambda, mu_minus, mu_plus, nu_minus, nu_plus };
const char* to_string(EntropyKind k);

enum class Sign { minus, plus };
const char* to_string(Sign s);
Sign sign_from_string(const std::string& s);

struct StartResult {
  std::string start;  // constant, ground_state, random
  double value = 0.0;
  double el_residual = 0.0;
  bool converged = false;
};

struct EntropyReport {
  EntropyKind kind = EntropyKind::lambda;
  double value = 0.0;
  std::optional<double> tau;
  RadialField omega;
  RadialField f;  // -2 log omega
  double el_residual = 0.0;
  double constraint_residual = 0.0;
  double self_consistency = 0.0;  // |value - functional(omega)|
  AsymptoticFit asymptotics;
  bool has_asymptotics = false;
  // (4 pi tau)^{-m/2} int f e^{-f} dV and the value m/2 -+ nu it equals at tau_g
  double normalization_lhs = 0.0;
  double normalization_target = 0.0;
  bool normalization_checked = false;
  bool nonconvex = false;
  std::vector<StartResult> starts;
  std::vector<std::pair<double, double>> tau_profile;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct EntropyOptions {
  double el_tol = 1e-10;      // Newton target on the volume-weighted EL residual
  int max_descent = 400;
  int max_newton = 60;
  bool multistart = true;
  std::uint64_t seed = 12345;
  double agreement_tol = 1e-6;  // multistart minimizers must agree to this
  double tau_lo = 1e-3, tau_hi = 1e3;
  int tau_scan = 25;
  double log_tau_tol = 1e-7;
  bool fit_asymptotics = true;
  FitOptions fit;
};

/// int (scal omega^2 + 4 |grad omega|^2) dV for normalized omega (nodal).
double evaluate_lambda_functional(const RadialMetric& g, const RadialField& omega);
/// W_-+ in the omega form, constraint (4 pi tau)^{-m/2} int omega^2 = 1.
double evaluate_w(const RadialMetric& g, const RadialField& omega, double tau, Sign sign);

EntropyReport compute_lambda(const RadialMetric& g, const EntropyOptions& opt = {});
EntropyReport compute_mu(const RadialMetric& g, double tau, Sign sign, const EntropyOptions& opt = {});
EntropyReport compute_nu(const RadialMetric& g, Sign sign, const EntropyOptions& opt = {});
EntropyReport mu_simple(const RadialMetric& g, Sign sign, const EntropyOptions& opt = {});

/// Metric perturbed along h = h_rad (a dx)^2 + h_link b^2 g_F by eps.
RadialMetric perturbed_metric(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link, double eps);

/// -int <h, Ric + Hess f> e^{-f} dV at the lambda minimizer.
double first_variation_lambda(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link,
                              const EntropyReport* lambda_report = nullptr);

struct VariationCheck {
  double formula = 0.0;
  std::vector<double> eps;
  std::vector<double> central;   // (lambda(g + eps h) - lambda(g - eps h)) / 2 eps
  double richardson_order = 0.0; // from successive differences
  double extrapolated = 0.0;
  double relative_gap = 0.0;     // |formula - extrapolated| / max(|extrapolated|, 1e-300)
};

/// Central differences at eps, eps/2, eps/4.
VariationCheck first_variation_check(const RadialMetric& g, const RadialField& h_rad, const RadialField& h_link,
                                     double eps = 1e-3);

/// Frame components of the Lie derivative of g along xi(x) d/dx.
std::pair<RadialField, RadialField> lie_derivative_radial(const RadialMetric& g, const RadialField& xi);

}  // namespace conelab
