#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "conelab/heat.hpp"

using namespace conelab;

TEST_SUITE("heat") {
  TEST_CASE("modified Bessel I against an independent implementation") {
    for (double nu : {0.0, 0.5, 1.0, 1.7, 3.0, 10.0, 25.3, 120.0})
      for (double z : {1e-3, 0.1, 1.0, 5.0, 29.9, 30.1, 80.0, 200.0, 650.0}) {
        const double ref = boost::math::cyl_bessel_i(nu, z);
        if (!std::isfinite(ref) || ref == 0.0) continue;
        CHECK(bessel_i(nu, z) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(bessel_i_scaled(nu, z) == doctest::Approx(ref * std::exp(-z)).epsilon(1e-12));
      }
    CHECK(bessel_i(0.5, 1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0)).epsilon(1e-14));
    CHECK(bessel_i_scaled(2.5, 1e8) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 1e8)).epsilon(1e-7));
    const auto seq = bessel_i_scaled_sequence(0.0, 100.0, 200);
    for (int k = 0; k < 200; k += 9)
      CHECK(seq[k] == doctest::Approx(boost::math::cyl_bessel_i(k, 100.0) * std::exp(-100.0)).epsilon(1e-12));
  }

  TEST_CASE("cone over the unit circle is the plane") {
    const FlatKernelCheck c = flat_circle_kernel_check(7, 20, 0.01, 1.0, 0.1, 2.0);
    CHECK(c.max_error_vs_angular_max < 1e-10);
    CHECK(c.max_modes > 10);
    const double t = 0.2, x = 0.8, y = 1.1, phi = 2.0;
    const double d2 = x * x + y * y - 2 * x * y * std::cos(phi);
    CHECK(circle_cone_kernel(t, x, y, phi) ==
          doctest::Approx(std::exp(-d2 / (4 * t)) / (4 * std::numbers::pi * t)).epsilon(1e-10));
  }

  TEST_CASE("radial mode over S3 averages the R4 Gaussian and conserves mass") {
    const RadialFlatCheck r = radial_mode_flat_check(3, 10);
    CHECK(r.max_relative_error < 1e-10);
    CHECK(r.max_mass_error < 1e-10);
    HeatKernelParams hp{sphere_link(3, 8)};
    for (double t : {0.01, 0.3})
      CHECK(heat_apply_at(hp, t, [](double) { return 1.0; }, 1e9, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("semigroup property on a grid") {
    HeatKernelParams hp{sphere_link(3, 8)};
    const RadialGrid grid = RadialGrid::graded(6.0, 600, 2.0);
    RadialField u;
    for (double x : grid.x) u.values.push_back(std::exp(-4 * x * x) * smooth_cutoff(x, 1.0, 2.0));
    const auto a = heat_apply(hp, 0.05, u, grid);
    const auto ab = heat_apply(hp, 0.07, a.value, grid);
    const auto c = heat_apply(hp, 0.12, u, grid);
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      e = std::max(e, std::abs(ab.value.values[i] - c.value.values[i]));
      m = std::max(m, std::abs(c.value.values[i]));
    }
    CHECK(e / m < 1e-6);
  }

  TEST_CASE("Duhamel integral of a constant source") {
    // on the exact cone int_0^t H(s) 1 ds = t
    HeatKernelParams hp{sphere_link(3, 8)};
    const auto v = heat_convolve(hp, 0.3, [](double) { return 1.0; }, 1e9, std::vector<double>{0.2, 0.7});
    CHECK(v[0] == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(v[1] == doctest::Approx(0.3).epsilon(1e-7));
  }

  TEST_CASE("mapping rows for n = 3") {
    HeatKernelParams hp{sphere_link(3, 8)};
    const MappingRow r1 = mapping_exponent_report(hp, 1.0);
    CHECK(r1.expected == "bounded");
    CHECK(r1.spatial_pass);
    CHECK(r1.temporal_pass);
    const MappingRow r2 = mapping_exponent_report(hp, 2.0);
    CHECK(r2.expected == "log");
    CHECK(r2.fit.log_suspected);
    CHECK(r2.spatial_pass);
  }

  TEST_CASE("Dirichlet decay rate is the first eigenvalue") {
    PresetSpec ps;
    ps.name = "flat_cone";
    ps.N = 1000;
    const RadialMetric g = make_preset(ps, sphere_link(3, 8));
    const DecayCheck d = dirichlet_decay_check(g, 0.0, 0.1, 1.0, 4000);
    const double j = boost::math::cyl_bessel_j_zero(1.0, 1);
    CHECK(d.sigma1 == doctest::Approx(j * j).epsilon(1e-4));
    CHECK(d.relative_error < 1e-3);
  }
}
