#pragma once

#include <optional>
#include <string>
#include <vector>

namespace conelab {

struct Eigenvalue {
  double value = 0.0;
  int multiplicity = 1;
};

/// Cross-section (F, g_F) described by spectral data.
struct LinkData {
  int n = 0;
  double scal_F = 0.0;
  std::vector<Eigenvalue> laplace_spectrum;
  std::optional<std::vector<double>> einstein_tt_spectrum;
  double vol_F = 0.0;
  double complete_up_to = 0.0;  // spectrum is complete up to this eigenvalue
  std::string name;

  /// Einstein constant scal_F / n.
  double einstein_constant() const { return n > 0 ? scal_F / n : 0.0; }
  /// Smallest nonzero Laplace eigenvalue; +inf when none is recorded.
  double lambda1() const;
  void validate() const;
};

enum class Stability { strictly_stable, stable_not_strict, unstable, undecidable };
const char* to_string(Stability s);

/// Unit round S^n with eigenvalues k(k+n-1), k = 0..k_max.
LinkData sphere_link(int n, int k_max);

/// Dimension of degree-k spherical harmonics on S^n.
long long sphere_harmonic_dimension(int n, int k);

Stability check_tangential_stability(const LinkData& link);
bool check_admissibility_gap(const LinkData& link);

/// Resolves "S<n>" to a built-in sphere (k_max chosen to cover 2(n+1) with margin).
std::optional<LinkData> builtin_link(const std::string& name);

/// Parses the key-value link file format (see docs/config.md).
LinkData parse_link_text(const std::string& text);
LinkData load_link_file(const std::string& path);

/// Built-in name or file path.
LinkData resolve_link(const std::string& name_or_path);

}  // namespace conelab
