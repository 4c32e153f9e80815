#include <doctest.h>

#include <cmath>

#include "conelab/error.hpp"
#include "conelab/flow.hpp"

using namespace conelab;

namespace {

RadialMetric preset(const std::string& name, int N, double L = 0.0, double amplitude = 0.1, double scale = 1.0) {
  PresetSpec ps;
  ps.name = name;
  ps.N = N;
  ps.p = 1.5;
  ps.L = L;
  ps.amplitude = amplitude;
  ps.scale = scale;
  if (name.find("suspension") != std::string::npos) ps.profile = WarpProfile::sine;
  return make_preset(ps, sphere_link(3, 8));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("de Turck field vanishes against itself") {
    const RadialMetric g = preset("perturbed_cone", 300, 3.0, 0.05);
    CHECK(max_abs(deturck_vector_field(g, g).values) < 1e-12);
  }

  TEST_CASE("fixed points have vanishing right-hand side") {
    const FlowRhs flat = flow_rhs(preset("flat_cone", 400), preset("flat_cone", 400), Normalization::steady);
    CHECK(max_abs(flat.da) < 1e-7);
    CHECK(max_abs(flat.dbeta) < 1e-7);
    const RadialMetric s4 = preset("sphere_suspension", 400, 0.0, 0.0, std::sqrt(3.0));
    const FlowRhs sh = flow_rhs(s4, s4, Normalization::shrink);
    CHECK(max_abs(sh.da) < 1e-7);
    CHECK(max_abs(sh.dbeta) < 1e-7);
    CHECK(sup_ricci_deviation(s4, 1.0) < 1e-7);
  }

  TEST_CASE("Taylor remainder of the right-hand side is quadratic") {
    const RadialMetric g = preset("perturbed_cone", 300, 3.0, 0.05);
    const RadialMetric ref = preset("flat_cone", 300, 3.0);
    auto shifted = [&](double e) {
      RadialMetric h = g;
      for (std::size_t i = 0; i < h.a.size(); ++i) {
        const double x = h.grid.x[i];
        h.a[i] *= 1.0 + e * x * x * std::exp(-x);
        h.beta[i] *= 1.0 + e * x * x * std::cos(x);
      }
      return h;
    };
    const double e0 = 1e-6;
    const FlowRhs r0 = flow_rhs(g, ref, Normalization::steady);
    const FlowRhs rp = flow_rhs(shifted(e0), ref, Normalization::steady);
    const FlowRhs rm = flow_rhs(shifted(-e0), ref, Normalization::steady);
    std::vector<double> rem;
    for (double e : {4e-3, 2e-3, 1e-3}) {
      const FlowRhs r = flow_rhs(shifted(e), ref, Normalization::steady);
      double m = 0.0;
      for (std::size_t i = 0; i < r.da.size(); ++i) {
        const double lin = e * (rp.da[i] - rm.da[i]) / (2 * e0);
        m = std::max(m, std::abs(r.da[i] - r0.da[i] - lin));
      }
      rem.push_back(m);
    }
    CHECK(std::log2(rem[0] / rem[1]) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(rem[1] / rem[2]) == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("linearly implicit Euler converges at first order in dt") {
    const RadialMetric g = preset("perturbed_cone", 200, 3.0, 0.05);
    FlowConfig c;
    c.reference = preset("flat_cone", 200, 3.0);
    c.T = 0.02;
    c.sample_period = 0.02;
    std::vector<std::vector<double>> finals;
    for (double dt : {2e-3, 1e-3, 5e-4, 2.5e-4}) {
      c.fixed_dt = dt;
      finals.push_back(run_flow(g, c).states.back().metric.a);
    }
    std::vector<double> d;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
      double m = 0.0;
      for (std::size_t i = 0; i < finals[k].size(); ++i) m = std::max(m, std::abs(finals[k][i] - finals[k + 1][i]));
      d.push_back(m);
    }
    CHECK(std::log2(d[1] / d[2]) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(std::log2(d[0] / d[1]) == doctest::Approx(1.0).epsilon(0.25));
  }

  TEST_CASE("perturbation order of the perturbed cone") {
    const RadialMetric g = preset("perturbed_cone", 600, 3.0, 0.05);
    const auto o = perturbation_order(g, preset("flat_cone", 600, 3.0));
    REQUIRE(o.has_value());
    CHECK(*o == doctest::Approx(2.0).epsilon(0.02));
    CHECK_FALSE(perturbation_order(preset("flat_cone", 600, 3.0), preset("flat_cone", 600, 3.0)).has_value());
  }

  TEST_CASE("sampled entropy must match the normalization") {
    FlowConfig c;
    c.normalization = Normalization::shrink;
    c.sample = FlowEntropy::mu_plus;
    c.T = 0.01;
    try {
      run_flow(preset("sphere_suspension", 100, 0.0, 0.0, std::sqrt(3.0)), c);
      FAIL("expected a normalization error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::normalization);
    }
    CHECK(matching_entropy(Normalization::steady) == FlowEntropy::lambda);
    CHECK(matching_entropy(Normalization::expand) == FlowEntropy::mu_plus);
  }

  TEST_CASE("flat cone stays put under steady flow") {
    FlowConfig c;
    c.T = 0.5;
    c.sample = FlowEntropy::lambda;
    const FlowTrajectory tr = run_flow(preset("flat_cone", 300), c);
    const MonotonicityReport m = monotonicity_report(tr, FlowEntropy::lambda);
    CHECK(m.constant);
    CHECK(m.stationarity_confirmed.value_or(false));
    const auto& a0 = tr.states.front().metric.a;
    const auto& a1 = tr.states.back().metric.a;
    for (std::size_t i = 0; i < a0.size(); ++i) CHECK(std::abs(a0[i] - a1[i]) < 1e-10);
  }
}
