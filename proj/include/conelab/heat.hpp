#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conelab/geometry.hpp"
#include "conelab/link.hpp"
#include "conelab/spectral.hpp"

namespace conelab {

/// Modified Bessel function of the first kind, real order nu >= 0, z >= 0.
double bessel_i(double nu, double z);
/// e^{-z} I_nu(z).
double bessel_i_scaled(double nu, double z);
/// e^{-z} I_{nu+k}(z) for k = 0..count-1 by downward recurrence.
std::vector<double> bessel_i_scaled_sequence(double nu, double z, int count);

struct HeatKernelParams {
  LinkData link;
  int mode_cutoff = -1;        // largest spectrum index used; -1 = all supplied
  double series_tol = 1e-14;
  bool overflow_scaling = true;
};

/// Mode kernel (x x~)^{-(n-1)/2} (1/2t) I_nu(x x~/2t) exp(-(x^2+x~^2)/4t).
double cone_kernel_mode(int n, double nu, double t, double x, double x_tilde, bool overflow_scaling = true);

/// Assembled kernel on the cone over the unit circle at angle difference phi,
/// summing modes until they drop below tol relative to the partial sum.
/// `modes_used` receives the cutoff when non-null.
double circle_cone_kernel(double t, double x, double x_tilde, double phi, double tol = 1e-17, int* modes_used = nullptr);
std::vector<double> circle_cone_kernel(double t, double x, double x_tilde, const std::vector<double>& phis,
                                       double tol = 1e-17, int* modes_used = nullptr);

/// Radial part of the cone kernel for the link: h_{nu(0)} / vol_F.
double radial_cone_kernel(const LinkData& link, double t, double x, double x_tilde);

struct HeatResult {
  RadialField value;
  bool truncation_warning = false;
  double truncation_radius = 0.0;
};

/// (H(t)u)(x_i) = int h_{nu(mode)}(t, x_i, x~) u(x~) x~^n dx~ with u interpolated on the grid.
HeatResult heat_apply(const HeatKernelParams& params, double t, const RadialField& u, const RadialGrid& grid,
                      double mode = 0.0);

/// Same integral for a callable profile evaluated at arbitrary points. `support`
/// is the right end of the support of f.
double heat_apply_at(const HeatKernelParams& params, double t, const std::function<double(double)>& f, double support,
                     double x, double mode = 0.0);

/// int_0^t (H(s) f)(x) ds at the given points.
std::vector<double> heat_convolve(const HeatKernelParams& params, double t, const std::function<double(double)>& f,
                                  double support, const std::vector<double>& points, double mode = 0.0);
HeatResult heat_convolve(const HeatKernelParams& params, double t, const RadialField& f, const RadialGrid& grid,
                         double mode = 0.0);

struct MappingRow {
  double N = 0.0;
  std::string expected;      // bounded, log, power
  double expected_exponent = 0.0;
  AsymptoticFit fit;
  double best_power_residual_away_from_zero = 0.0;  // min over |e| >= 0.1
  double temporal_slope = 0.0;
  double temporal_bound = 0.0;  // -N/2 + 0.15
  bool spatial_pass = false;
  bool temporal_pass = false;
  std::vector<double> x, hf;        // spatial profile of H*f
  std::vector<double> t, sup_ht;    // temporal samples of sup|H(t)f|
};

struct MappingOptions {
  double t = 0.25;
  double x_lo = 1e-3, x_hi = 3e-2;
  int x_points = 24;
  double t_lo = 1e-4, t_hi = 1e-2;
  int t_points = 9;
  double slope_tol = 0.15;
  double exponent_tol = 0.1;
};

/// Spatial exponent and temporal decay of H * (x^{-N} chi), chi = 1 on [0, 1/2], 0 past 1.
MappingRow mapping_exponent_report(const HeatKernelParams& params, double N, const MappingOptions& opt = {});

struct DecayCheck {
  double sigma1 = 0.0;          // ground eigenvalue of the Dirichlet pencil
  double fitted_rate = 0.0;     // -d log||u|| / dt over the window
  double relative_error = 0.0;
  std::vector<double> t, norm;
};

/// Time-steps u_t = -Delta u with outer Dirichlet condition (implicit, on the
/// assembled pencil) and compares the decay rate on [t_lo, t_hi] with sigma_1.
DecayCheck dirichlet_decay_check(const RadialMetric& metric, double mode, double t_lo, double t_hi, int steps_per_unit);


struct FlatKernelCheck {
  int samples = 0;
  int max_modes = 0;
  double max_error_vs_angular_max = 0.0;  // |H - G| / max_phi G
  double max_pointwise_relative = 0.0;    // |H - G| / G where G >= 1e-6 max_phi G
  double seconds = 0.0;
};

/// Cone over the unit circle against the planar Gaussian on a 5 x 5 x 5 grid of
/// (t, x, x~) with `angles` random (theta, theta~) pairs each.
FlatKernelCheck flat_circle_kernel_check(std::uint64_t seed, int angles, double t_lo, double t_hi, double x_lo,
                                         double x_hi, double tol = 1e-17);

struct RadialFlatCheck {
  int points = 0;
  double max_relative_error = 0.0;  // mode-0 kernel vs S^3 average of the R^4 Gaussian
  double max_mass_error = 0.0;      // |int h_0 x~^3 dx~ - 1|
};

/// n = 3 radial-mode check; the average is computed by Gauss-Legendre quadrature in the polar angle.
RadialFlatCheck radial_mode_flat_check(std::uint64_t seed, int points);

}  // namespace conelab
