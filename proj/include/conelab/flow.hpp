#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conelab/entropy.hpp"
#include "conelab/geometry.hpp"

namespace conelab {

/// steady: -2Ric + L_W g; shrink adds +2g; expand adds -2g.
enum class Normalization { steady, shrink, expand };
const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);
double soliton_constant(Normalization n);

enum class FlowEntropy { none, lambda, mu_minus, mu_plus };
const char* to_string(FlowEntropy e);
FlowEntropy flow_entropy_from_string(const std::string& s);
/// The entropy that is monotone under the given normalization.
FlowEntropy matching_entropy(Normalization n);

struct FlowConfig {
  Normalization normalization = Normalization::steady;
  std::optional<RadialMetric> reference;  // defaults to the initial metric
  double T = 1.0;
  double cfl = 0.5;            // first step = cfl * min(dx)^2 * min(a)^2
  double sample_period = 0.0;  // 0: T / 64
  FlowEntropy sample = FlowEntropy::none;
  double change_tol = 2e-3;  // per-step relative change in (a, beta)
  double dt_max = 0.0;       // 0: sample period
  double fixed_dt = 0.0;     // > 0 disables the step controller
  double cone_drift_tol = 1e-3;
  double min_dt = 1e-14;
  EntropyOptions entropy;
};

struct FlowState {
  double t = 0.0;
  RadialMetric metric;
  double sup_ric = 0.0;
  double sup_ric_minus_cg = 0.0;
  double weighted_ric_minus_cg = 0.0;
  double sup_w = 0.0;
  double cone_factor = 0.0;
  std::optional<double> entropy;
  double entropy_residual = 0.0;
  int steps = 0;
};

struct FlowRhs {
  std::vector<double> da;
  std::vector<double> dbeta;
};

struct FlowTrajectory {
  Normalization normalization = Normalization::steady;
  FlowEntropy sample = FlowEntropy::none;
  std::vector<FlowState> states;
  int steps = 0;
  int rejected = 0;
  std::optional<double> perturbation_order_initial;
  std::optional<double> perturbation_order_final;
  std::vector<std::string> warnings;
};

/// Radial component W^x of g^ij (Gamma^x_ij(g) - Gamma^x_ij(ref)).
RadialField deturck_vector_field(const RadialMetric& g, const RadialMetric& reference);

/// (da/dt, dbeta/dt) of the normalized Ricci-de Turck flow, with dbeta = db / rho.
FlowRhs flow_rhs(const RadialMetric& g, const RadialMetric& reference, Normalization norm);

/// sup over nodes of the frame norm of Ric - c g. With `weighted` each node is
/// multiplied by rho(x)^2, which vanishes like the squared distance to the
/// tip and to closed ends.
double sup_ricci_deviation(const RadialMetric& g, double c, bool weighted = false);

/// Fitted tip exponent of the deviation from the reference, measured on the
/// cone ratio beta/a and on a/a(0) so a constant rescaling of the tip does not
/// count. Empty when the two agree near the tip.
std::optional<double> perturbation_order(const RadialMetric& g, const RadialMetric& reference);

FlowTrajectory run_flow(const RadialMetric& initial, const FlowConfig& config);

struct MonotonicityReport {
  FlowEntropy which = FlowEntropy::lambda;
  std::vector<double> times;
  std::vector<double> values;
  double min_difference = 0.0;
  double total_variation = 0.0;
  bool pass = false;
  bool constant = false;
  std::optional<bool> stationarity_confirmed;
  double stationarity_residual = 0.0;
  double tol = 1e-7;
};

MonotonicityReport monotonicity_report(const FlowTrajectory& traj, FlowEntropy which, double tol_mono = 1e-7,
                                       double tol_constant = 1e-9);

}  // namespace conelab
