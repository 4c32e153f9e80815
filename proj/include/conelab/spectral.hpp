#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "conelab/geometry.hpp"
#include "conelab/link.hpp"
#include "conelab/numerics.hpp"

namespace conelab {

/// nu(lambda) = sqrt(lambda + ((n-1)/2)^2).
double indicial_nu(int n, double lambda);

struct IndicialRow {
  double lambda = 0.0;
  int multiplicity = 1;
  double nu = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  bool in_window = false;  // nu in [0, 1): both exponents admissible at the tip
};

struct IndicialData {
  int n = 0;
  double gamma = 0.0;
  std::vector<IndicialRow> rows;
  double gamma_bar = 0.0;   // min(gamma, mu_plus(lambda_1))
  bool essentially_self_adjoint = false;  // n >= 3
};

IndicialData indicial_exponents(const LinkData& link, double gamma);

enum class OuterCondition { natural, dirichlet };

/// -(c/(a b^n)) (b^n/a u')' + c lambda_F u / b^2 + q scal u, positive-spectrum sign.
struct RadialOperator {
  RadialMetric metric;
  double c = 4.0;
  double q = 1.0;
  double mode = 0.0;
  OuterCondition outer = OuterCondition::natural;
};

/// Symmetric tridiagonal pencil (K, M) on the unknown nodes; M is lumped.
struct Pencil {
  num::Tridiagonal K;
  std::vector<double> M;
  std::vector<double> potential;  // diagonal part of K coming from the potential
  std::vector<std::size_t> dofs;  // grid node of each unknown
  std::size_t nodes = 0;
  bool extend_last = false;  // closed end: last node copies its neighbour
  std::size_t size() const { return M.size(); }
  /// Nodal field from unknowns (Dirichlet node 0, closed end extended).
  std::vector<double> expand(const std::vector<double>& u) const;
  std::vector<double> restrict_to_dofs(const std::vector<double>& nodal) const;
  /// Energy form u^T K u.
  double energy(const std::vector<double>& u) const;
};

Pencil assemble_operator(const RadialOperator& op);

struct GroundState {
  double sigma = 0.0;
  RadialField u;            // nodal, normalized to sum w u^2 = 1, positive
  std::vector<double> dof;  // same on the unknowns
  double residual = 0.0;    // ||(K - sigma M) u|| / ||M u|| in the M^{-1} norm
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

GroundState solve_ground_state(const RadialOperator& op, const EigenOptions& opt = {});
GroundState solve_ground_state(const Pencil& pencil, const EigenOptions& opt = {});

struct AsymptoticFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double exponent = 0.0;      // +inf sentinel when u is constant
  double residual = 0.0;      // RMS of the power-model residual
  double log_c0 = 0.0;
  double log_c1 = 0.0;
  double log_residual = 0.0;  // RMS of c0 + c1 log x model
  bool log_suspected = false; // log model fits better than the power model
  int points = 0;
  double x_lo = 0.0, x_hi = 0.0;
};

struct FitOptions {
  double x_lo = 0.0;  // 0 selects 4 x_1
  double x_hi = 0.0;  // 0 selects L / 10
  double e_lo = 0.0;  // exponent bracket (e_lo, e_hi]
  double e_hi = 4.0;
};

AsymptoticFit fit_asymptotics(const RadialField& u, const RadialGrid& grid, const FitOptions& opt = {});

/// Same fit on explicit samples; the exponent bracket may straddle 0
/// (|e| < 1e-3 is excluded since x^0 duplicates the constant).
AsymptoticFit fit_power_law(const std::vector<double>& x, const std::vector<double>& u, double e_lo, double e_hi);

/// RMS residual of the best c0 + c1 x^e fit with e held fixed.
double power_fit_residual(const std::vector<double>& x, const std::vector<double>& u, double e);

}  // namespace conelab
