#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conelab/link.hpp"

namespace conelab {

/// Graded radial mesh x_i = L (i/N)^p, i = 1..N.
struct RadialGrid {
  std::vector<double> x;
  double L = 1.0;
  double p = 2.0;
  int N = 0;

  static RadialGrid graded(double L, int N, double p);
  std::size_t size() const { return x.size(); }
};

enum class Topology { two_cones, cone_and_cap, cone_and_boundary };
const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Analytic factor rho in b = rho * beta. It carries the vanishing of b at
/// closed ends so beta stays smooth and positive.
enum class WarpProfile { linear, bilinear, sine };
const char* to_string(WarpProfile p);
WarpProfile profile_from_string(const std::string& s);

struct ProfileValues {
  double rho, d1, d2;
};
ProfileValues profile_at(WarpProfile p, double L, double x);

/// Warped product g = a^2 dx^2 + b^2 g_F on a radial grid, b = rho * beta.
struct RadialMetric {
  LinkData link;
  RadialGrid grid;
  std::vector<double> a;
  std::vector<double> beta;
  WarpProfile profile = WarpProfile::linear;
  Topology topology = Topology::cone_and_boundary;
  double gamma = std::numeric_limits<double>::infinity();

  int n() const { return link.n; }
  int m() const { return link.n + 1; }
  std::vector<double> b() const;
  /// True when the last node is a closed end (b = 0 there).
  bool closed_end() const { return topology != Topology::cone_and_boundary; }
  void validate() const;
};

/// Scalar radial field with optional fitted tip asymptotics.
struct RadialField {
  std::vector<double> values;
  std::optional<double> c0;
  std::optional<double> exponent;
};

/// Derivatives of a and b in x, plus the grid's discrete metric terms.
struct MetricDerivatives {
  std::vector<double> a, a1, a2;
  std::vector<double> b, b1, b2;
};

/// First and second x-derivatives of a nodal field: three-point Lagrange
/// differences inside, the five nearest nodes at either end.
std::vector<double> dx1(const std::vector<double>& f, const RadialGrid& grid);
std::vector<double> dx2(const std::vector<double>& f, const RadialGrid& grid);

MetricDerivatives metric_derivatives(const RadialMetric& g);

struct RicciComponents {
  RadialField ric_rad;
  RadialField ric_link;
};

/// Frame components of Ric. Closed-end nodes (b = 0) are filled by extrapolation.
RicciComponents warped_ricci(const RadialMetric& g);
RadialField warped_scal(const RadialMetric& g);

/// Quadrature weights of dV = a b^n vol_F dx, trapezoidal, tip cell ~ x^n.
std::vector<double> volume_weights(const RadialMetric& g);
double total_volume(const RadialMetric& g);

double weighted_sup_norm(const RadialField& u, const RadialGrid& grid, double gamma);
double weighted_sobolev_norm(const RadialField& u, const RadialMetric& g, int s, double delta);

struct HessianComponents {
  RadialField hess_rad;
  RadialField hess_link;
};
HessianComponents radial_hessian(const RadialField& f, const RadialMetric& g);
/// div grad f (trace of the Hessian).
RadialField radial_laplacian(const RadialField& f, const RadialMetric& g);

/// Metric c^2 g: a and b multiplied by c.
RadialMetric scaled(const RadialMetric& g, double c);

/// lim b / (a x) at the tip, by extrapolating beta / a to x = 0.
double cone_factor(const RadialMetric& g);

struct PresetSpec {
  std::string name = "sphere_suspension";
  double L = 0.0;          // 0 selects the preset's natural length
  double amplitude = 0.1;  // perturbations
  double gamma = 2.0;      // perturbation order
  double scale = 1.0;      // constant conformal factor c (metric c^2 g)
  int N = 2000;
  double p = 2.0;
  std::optional<WarpProfile> profile;  // default: linear for open, bilinear for closed
};

/// Names: flat_cone, sphere_suspension, perturbed_cone, perturbed_suspension, hyperbolic_cone.
RadialMetric make_preset(const PresetSpec& spec, const LinkData& link);
std::vector<std::string> preset_names();

/// Reads CSV with header x,a,b and interpolates onto the graded grid.
RadialMetric load_metric_csv(const std::string& path, const LinkData& link, Topology topology, int N, double p,
                             double gamma);

/// Smooth cutoff: 1 on [0, lo], 0 on [hi, inf).
double smooth_cutoff(double x, double lo, double hi);

}  // namespace conelab
