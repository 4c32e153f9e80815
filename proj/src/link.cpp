#include "conelab/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "conelab/error.hpp"

namespace conelab {

namespace {

long long binom(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double LinkData::lambda1() const {
  for (const auto& e : laplace_spectrum)
    if (e.value > 0.0) return e.value;
  return std::numeric_limits<double>::infinity();
}

void LinkData::validate() const {
  if (n < 1) fail(ErrorCode::invalid_argument, "link: n must be >= 1");
  if (!(vol_F > 0.0)) fail(ErrorCode::invalid_argument, "link: vol_F must be positive");
  if (laplace_spectrum.empty()) fail(ErrorCode::invalid_argument, "link: empty Laplace spectrum");
  if (laplace_spectrum.front().value != 0.0 || laplace_spectrum.front().multiplicity != 1)
    fail(ErrorCode::invalid_argument, "link: spectrum must begin with (0, 1)");
  for (std::size_t i = 0; i < laplace_spectrum.size(); ++i) {
    if (laplace_spectrum[i].multiplicity < 1) fail(ErrorCode::invalid_argument, "link: multiplicity must be >= 1");
    if (i > 0 && !(laplace_spectrum[i].value > laplace_spectrum[i - 1].value))
      fail(ErrorCode::invalid_argument, "link: eigenvalues must be strictly increasing");
  }
  if (complete_up_to < laplace_spectrum.back().value)
    fail(ErrorCode::invalid_argument, "link: complete_up_to below the largest listed eigenvalue");
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::strictly_stable: return "strictly_stable";
    case Stability::stable_not_strict: return "stable_not_strict";
    case Stability::unstable: return "unstable";
    case Stability::undecidable: return "undecidable";
  }
  return "unknown";
}

long long sphere_harmonic_dimension(int n, int k) {
  // homogeneous polynomials of degree k in n+1 variables minus those of degree k-2
  return binom(k + n, n) - binom(k + n - 2, n);
}

LinkData sphere_link(int n, int k_max) {
  require(n >= 1, "sphere_link: n >= 1");
  require(k_max >= 1, "sphere_link: k_max >= 1");
  LinkData link;
  link.n = n;
  link.scal_F = static_cast<double>(n) * (n - 1);
  for (int k = 0; k <= k_max; ++k)
    link.laplace_spectrum.push_back({static_cast<double>(k) * (k + n - 1), static_cast<int>(sphere_harmonic_dimension(n, k))});
  link.vol_F = 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
  link.complete_up_to = link.laplace_spectrum.back().value;
  link.name = "S" + std::to_string(n);
  return link;
}

Stability check_tangential_stability(const LinkData& link) {
  link.validate();
  const int n = link.n;
  if (std::abs(link.scal_F - n * (n - 1.0)) > 1e-12 * std::max(1.0, n * (n - 1.0)))
    fail(ErrorCode::precondition, "tangential stability: scal_F must equal n(n-1)");
  const double lo = n, hi = 2.0 * (n + 1);
  if (link.complete_up_to < hi)
    fail(ErrorCode::truncation, "tangential stability: spectrum complete only up to " +
                                    std::to_string(link.complete_up_to) + " < 2(n+1) = " + std::to_string(hi));
  bool open_hit = false, closed_hit = false;
  for (const auto& e : link.laplace_spectrum) {
    if (e.value == 0.0) continue;
    if (e.value > lo && e.value < hi) open_hit = true;
    if (e.value >= lo && e.value <= hi) closed_hit = true;
  }
  if (open_hit) return Stability::unstable;
  if (!link.einstein_tt_spectrum) return Stability::undecidable;
  const auto& tt = *link.einstein_tt_spectrum;
  if (std::any_of(tt.begin(), tt.end(), [](double v) { return v < 0.0; })) return Stability::unstable;
  const bool tt_strict = std::all_of(tt.begin(), tt.end(), [](double v) { return v > 0.0; });
  if (!closed_hit && tt_strict) return Stability::strictly_stable;
  return Stability::stable_not_strict;
}

bool check_admissibility_gap(const LinkData& link) {
  require(!link.laplace_spectrum.empty(), "admissibility gap: empty spectrum");
  return link.lambda1() >= static_cast<double>(link.n);
}

std::optional<LinkData> builtin_link(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'S' && name[0] != 's')) return std::nullopt;
  const std::string digits = name.substr(1);
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
  const int n = std::stoi(digits);
  if (n < 1) return std::nullopt;
  // k(k+n-1) >= 2(n+1) holds at k = 2; keep a few extra modes for the heat series
  return sphere_link(n, 8);
}

LinkData parse_link_text(const std::string& text) {
  LinkData link;
  bool have_n = false, have_scal = false, have_vol = false, have_complete = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::io, "link file line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::istringstream val(trim(line.substr(eq + 1)));
    auto bad = [&] { fail(ErrorCode::io, "link file line " + std::to_string(lineno) + ": bad value for " + key); };
    if (key == "n") {
      if (!(val >> link.n)) bad();
      have_n = true;
    } else if (key == "scal_F") {
      if (!(val >> link.scal_F)) bad();
      have_scal = true;
    } else if (key == "vol_F") {
      if (!(val >> link.vol_F)) bad();
      have_vol = true;
    } else if (key == "complete_up_to") {
      if (!(val >> link.complete_up_to)) bad();
      have_complete = true;
    } else if (key == "eigenvalue") {
      Eigenvalue e;
      if (!(val >> e.value >> e.multiplicity)) bad();
      link.laplace_spectrum.push_back(e);
    } else if (key == "tt") {
      if (!link.einstein_tt_spectrum) link.einstein_tt_spectrum.emplace();
      double v;
      while (val >> v) link.einstein_tt_spectrum->push_back(v);
    } else if (key == "name") {
      link.name = val.str();
    } else {
      fail(ErrorCode::io, "link file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_n || !have_scal || !have_vol) fail(ErrorCode::io, "link file: n, scal_F and vol_F are required");
  if (!have_complete && !link.laplace_spectrum.empty()) link.complete_up_to = link.laplace_spectrum.back().value;
  link.validate();
  return link;
}

LinkData load_link_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot open link file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  LinkData link = parse_link_text(ss.str());
  if (link.name.empty()) link.name = path;
  return link;
}

LinkData resolve_link(const std::string& name_or_path) {
  if (auto b = builtin_link(name_or_path)) return *b;
  return load_link_file(name_or_path);
}

}  // namespace conelab
