#include <doctest.h>

#include "conelab/error.hpp"
#include "conelab/link.hpp"
#include "conelab/spectral.hpp"

using namespace conelab;

TEST_SUITE("link") {
  TEST_CASE("sphere spectra and multiplicities") {
    const LinkData s2 = sphere_link(2, 6);
    CHECK(s2.scal_F == doctest::Approx(2.0));
    for (int k = 0; k <= 6; ++k) {
      CHECK(s2.laplace_spectrum[k].value == doctest::Approx(k * (k + 1.0)));
      CHECK(s2.laplace_spectrum[k].multiplicity == 2 * k + 1);
    }
    CHECK(sphere_harmonic_dimension(3, 2) == 9);
    CHECK(sphere_harmonic_dimension(1, 4) == 2);
    CHECK(sphere_link(3, 8).lambda1() == doctest::Approx(3.0));
  }

  TEST_CASE("round S3 with nonnegative TT spectrum is stable but not strictly") {
    LinkData s3 = sphere_link(3, 8);
    s3.einstein_tt_spectrum = std::vector<double>{0.0, 2.0, 5.0};
    CHECK(check_tangential_stability(s3) == Stability::stable_not_strict);
    s3.einstein_tt_spectrum = std::vector<double>{1.0, 2.0};
    // lambda_1 = n and lambda_2 = 2(n+1) sit on the closed band
    CHECK(check_tangential_stability(s3) == Stability::stable_not_strict);
    CHECK(check_admissibility_gap(s3));
  }

  TEST_CASE("violating spectra are unstable") {
    LinkData s3 = sphere_link(3, 8);
    s3.einstein_tt_spectrum = std::vector<double>{-0.5, 1.0};
    CHECK(check_tangential_stability(s3) == Stability::unstable);
    LinkData band = sphere_link(3, 8);
    band.einstein_tt_spectrum = std::vector<double>{1.0};
    band.laplace_spectrum.push_back({5.0, 1});
    std::sort(band.laplace_spectrum.begin(), band.laplace_spectrum.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) { return a.value < b.value; });
    CHECK(check_tangential_stability(band) == Stability::unstable);
  }

  TEST_CASE("missing TT spectrum is undecidable, truncation is an error") {
    const LinkData s3 = sphere_link(3, 8);
    CHECK(check_tangential_stability(s3) == Stability::undecidable);
    LinkData cut = sphere_link(3, 1);
    cut.einstein_tt_spectrum = std::vector<double>{1.0};
    try {
      check_tangential_stability(cut);
      FAIL("expected truncation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::truncation);
    }
  }

  TEST_CASE("link file parsing") {
    const std::string text =
        "n = 3\nscal_F = 6\nvol_F = 19.739208802178716\ncomplete_up_to = 20\n"
        "eigenvalue = 0 1\neigenvalue = 9 4\neigenvalue = 14 9\neigenvalue = 20 16\ntt = 0.5 2\nname = test\n";
    const LinkData l = parse_link_text(text);
    CHECK(l.n == 3);
    CHECK(l.laplace_spectrum.size() == 4);
    CHECK(l.laplace_spectrum[2].multiplicity == 9);
    CHECK(l.einstein_tt_spectrum->size() == 2);
    CHECK(check_tangential_stability(l) == Stability::strictly_stable);
    CHECK_THROWS_AS(parse_link_text("n = 3\nbogus = 1\n"), Error);
    CHECK_THROWS_AS(parse_link_text("n = 3\n"), Error);
    CHECK(resolve_link("S2").n == 2);
  }

  TEST_CASE("indicial roots") {
    const LinkData s3 = sphere_link(3, 8);
    CHECK(indicial_nu(3, 0.0) == 1.0);
    CHECK(indicial_nu(4, 0.0) == 1.5);
    const IndicialData d = indicial_exponents(s3, 2.0);
    CHECK(d.gamma_bar == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.rows[1].mu_plus == doctest::Approx(1.0));
    CHECK(d.rows[1].mu_minus == doctest::Approx(-3.0));
    CHECK(d.essentially_self_adjoint);
    CHECK(indicial_exponents(s3, 0.5).gamma_bar == doctest::Approx(0.5));
  }
}
