#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conelab/geometry.hpp"

using namespace conelab;

namespace {

struct Smooth {
  // a = exp(0.1 x^2), b = x exp(0.2 x)
  static double a(double x) { return std::exp(0.1 * x * x); }
  static double a1(double x) { return 0.2 * x * a(x); }
  static double b(double x) { return x * std::exp(0.2 * x); }
  static double b1(double x) { return (1.0 + 0.2 * x) * std::exp(0.2 * x); }
  static double b2(double x) { return (0.4 + 0.04 * x) * std::exp(0.2 * x); }
};

RadialMetric smooth_metric(const LinkData& link, int N) {
  RadialMetric g;
  g.link = link;
  g.grid = RadialGrid::graded(1.0, N, 2.0);
  g.profile = WarpProfile::linear;
  g.topology = Topology::cone_and_boundary;
  for (double x : g.grid.x) {
    g.a.push_back(Smooth::a(x));
    g.beta.push_back(Smooth::b(x) / x);
  }
  return g;
}

// Brioschi formula for E = a^2, G = b^2, F = 0, no angular dependence
double gauss_curvature(double x) {
  const double h = 1e-4;
  auto inner = [](double s) {
    const double E = Smooth::a(s) * Smooth::a(s), G = Smooth::b(s) * Smooth::b(s);
    const double Gx = 2.0 * Smooth::b(s) * Smooth::b1(s);
    return Gx / std::sqrt(E * G);
  };
  const double d = (-inner(x + 2 * h) + 8 * inner(x + h) - 8 * inner(x - h) + inner(x - 2 * h)) / (12 * h);
  return -d / (2.0 * Smooth::a(x) * Smooth::b(x));
}

// frame Ricci of a b-warped product over a unit sphere, written in arclength s = int a dx
void warped_oracle(int n, double x, double& rad, double& link) {
  const double a = Smooth::a(x), b = Smooth::b(x);
  const double bs = Smooth::b1(x) / a;
  const double bss = Smooth::b2(x) / (a * a) - Smooth::a1(x) * Smooth::b1(x) / (a * a * a);
  rad = -n * bss / b;
  link = -bss / b + (n - 1) * (1.0 - bs * bs) / (b * b);
}

double interior_error(int n, int N) {
  const LinkData link = sphere_link(n, 4);
  const RadialMetric g = smooth_metric(link, N);
  const RicciComponents r = warped_ricci(g);
  double e = 0.0;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    const double x = g.grid.x[i];
    if (x < 0.1 || x > 0.9) continue;
    double rad, lk;
    warped_oracle(n, x, rad, lk);
    e = std::max({e, std::abs(r.ric_rad.values[i] - rad), std::abs(r.ric_link.values[i] - lk)});
  }
  return e;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("graded grid") {
    const RadialGrid g = RadialGrid::graded(2.0, 100, 2.0);
    CHECK(g.size() == 100);
    CHECK(g.x.front() == doctest::Approx(2.0 * 1e-4));
    CHECK(g.x.back() == 2.0);
  }

  TEST_CASE("surface curvature matches the Brioschi formula") {
    const LinkData s1 = sphere_link(1, 4);
    const RadialMetric g = smooth_metric(s1, 800);
    const RicciComponents r = warped_ricci(g);
    for (std::size_t i = 0; i < g.grid.size(); i += 37) {
      const double x = g.grid.x[i];
      if (x < 0.05 || x > 0.95) continue;
      CHECK(r.ric_rad.values[i] == doctest::Approx(gauss_curvature(x)).epsilon(1e-5));
      CHECK(r.ric_link.values[i] == doctest::Approx(gauss_curvature(x)).epsilon(1e-5));
    }
  }

  TEST_CASE("warped Ricci converges at second order") {
    const double e1 = interior_error(3, 400), e2 = interior_error(3, 800), e3 = interior_error(3, 1600);
    CHECK(std::log2(e1 / e2) > 1.8);
    CHECK(std::log2(e2 / e3) > 1.8);
    CHECK(e3 < 1e-5);
  }

  TEST_CASE("flat cone is Ricci flat to roundoff") {
    PresetSpec ps;
    ps.name = "flat_cone";
    ps.N = 2000;
    const RadialMetric g = make_preset(ps, sphere_link(3, 8));
    const RicciComponents r = warped_ricci(g);
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
      CHECK(std::abs(r.ric_rad.values[i]) < 1e-9);
      CHECK(std::abs(r.ric_link.values[i]) < 1e-9);
    }
    CHECK(cone_factor(g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cone_factor(scaled(g, 2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("round S4 suspension: scalar curvature and volume") {
    const double exact = 8.0 * std::numbers::pi * std::numbers::pi / 3.0;
    double prev = 0.0;
    for (int N : {500, 1000, 2000}) {
      PresetSpec ps;
      ps.N = N;
      const RadialMetric g = make_preset(ps, sphere_link(3, 8));
      const double err = std::abs(total_volume(g) - exact);
      if (prev > 0.0) CHECK(prev / err >= 3.5);
      prev = err;
      const RadialField s = warped_scal(g);
      for (std::size_t i = 0; i < s.values.size(); i += 50)
        if (g.grid.x[i] > 0.05) CHECK(s.values[i] == doctest::Approx(12.0).epsilon(1e-4));
    }
    PresetSpec ps;
    ps.scale = 2.0;
    const RadialMetric g2 = make_preset(ps, sphere_link(3, 8));
    CHECK(warped_scal(g2).values[1000] == doctest::Approx(3.0).epsilon(1e-6));
  }

  TEST_CASE("Hessian and Laplacian of x^2 on the flat cone") {
    PresetSpec ps;
    ps.name = "flat_cone";
    ps.N = 500;
    const RadialMetric g = make_preset(ps, sphere_link(3, 8));
    RadialField f;
    for (double x : g.grid.x) f.values.push_back(x * x);
    const HessianComponents h = radial_hessian(f, g);
    const RadialField lap = radial_laplacian(f, g);
    for (std::size_t i = 0; i < g.grid.size(); i += 25) {
      CHECK(h.hess_rad.values[i] == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(h.hess_link.values[i] == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(lap.values[i] == doctest::Approx(8.0).epsilon(1e-9));
    }
    CHECK(weighted_sup_norm(f, g.grid, 2.0) == doctest::Approx(1.0));
  }

  TEST_CASE("weighted Sobolev norm on the exact cone") {
    PresetSpec ps;
    ps.name = "flat_cone";
    ps.N = 1000;
    const LinkData s3 = sphere_link(3, 8);
    const RadialMetric g = make_preset(ps, s3);
    // ||1||_{L2} over the unit cone is sqrt(vol_F / 4)
    const double unit = std::sqrt(s3.vol_F / 4.0);
    RadialField one, u, q;
    for (double x : g.grid.x) {
      one.values.push_back(1.0);
      u.values.push_back(x);
      q.values.push_back(x * x);
    }
    CHECK(weighted_sobolev_norm(one, g, 0, 0.0) == doctest::Approx(unit).epsilon(1e-5));
    CHECK(weighted_sobolev_norm(u, g, 1, 1.0) == doctest::Approx(2.0 * unit).epsilon(1e-5));
    // x^2 with delta = 2: |u| x^-2 = 1, |grad u| x^-1 = 2, |Hess u| = 2 sqrt(1 + n)
    CHECK(weighted_sobolev_norm(q, g, 2, 2.0) == doctest::Approx((3.0 + 2.0 * std::sqrt(4.0)) * unit).epsilon(1e-5));
    CHECK_THROWS(weighted_sobolev_norm(q, g, 3, 0.0));
  }

  TEST_CASE("metric CSV round trip and validation") {
    const LinkData s3 = sphere_link(3, 8);
    const std::string path = "geometry_metric.csv";
    {
      FILE* fp = std::fopen(path.c_str(), "w");
      std::fprintf(fp, "x,a,b\n");
      for (int i = 0; i <= 400; ++i) {
        const double x = i / 400.0;
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", x, Smooth::a(x), Smooth::b(x));
      }
      std::fclose(fp);
    }
    const RadialMetric g = load_metric_csv(path, s3, Topology::cone_and_boundary, 400, 2.0, 2.0);
    for (std::size_t i = 100; i < g.grid.size(); i += 50) {
      CHECK(g.a[i] == doctest::Approx(Smooth::a(g.grid.x[i])).epsilon(1e-8));
      CHECK(g.b()[i] == doctest::Approx(Smooth::b(g.grid.x[i])).epsilon(1e-8));
    }
    RadialMetric bad = g;
    bad.a[3] = -1.0;
    CHECK_THROWS(bad.validate());
    std::remove(path.c_str());
  }
}
