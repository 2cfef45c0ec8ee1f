#include <doctest.h>

#include <cmath>

#include "fracac/error.hpp"
#include "fracac/specfun.hpp"
#include "gen.hpp"

using namespace fracac;

TEST_CASE("gamma function values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  // 50-digit references (tests/oracles/gen_oracles.py)
  CHECK(gamma_fn(-0.45) == doctest::Approx(-3.5913872638523891868).epsilon(1e-13));
  CHECK(gamma_fn(-1.5) == doctest::Approx(2.3632718012073547031).epsilon(1e-13));
  CHECK(gamma_fn(0.1) == doctest::Approx(9.5135076986687318363).epsilon(1e-13));
  CHECK(gamma_fn(7.3) == doctest::Approx(1271.4236336639092731).epsilon(1e-13));
  CHECK(gamma_fn(-3.7) == doctest::Approx(0.25164399590242264351).epsilon(1e-12));
  CHECK(gamma_fn(19.5) == doctest::Approx(27724322986333718.178).epsilon(1e-12));
}

TEST_CASE("gamma function poles are domain errors") {
  for (double x : {0.0, -1.0, -2.0, -7.0}) {
    try {
      gamma_fn(x);
      FAIL("expected a domain error at " << x);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
}

TEST_CASE("reflection consistency on random arguments") {
  testing::Gen g(11);
  for (int i = 0; i < 100; ++i) {
    const double x = g.uniform(1e-3, 1 - 1e-3);
    CHECK(gamma_fn(x) * gamma_fn(1 - x) * std::sin(M_PI * x) / M_PI == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("order constants against high-precision values") {
  struct Row {
    double a, c, nf, d, p;
  };
  const Row rows[] = {
      {0.3, 0.57828788507323804397, 1.7292425205714860519, 0.29053953083424974529, -0.43231063014287151297},
      {0.9, 0.74412024374868047955, 1.3438688281913486948, 0.88008082308694325325, -0.3359672070478371737},
      {1.5, 1.2533141373155002512, 0.79788456080286535588, 2.0920992401062032979, -0.19947114020071633897},
      {1.9, 5.2202114622984373873, 0.1915631210004094663, 10.115591468552555095, -0.047890780250102366575},
  };
  for (const auto& r : rows) {
    const AlphaConstants k = alpha_constants(r.a);
    CHECK(k.fractional_available);
    CHECK(k.c_alpha == doctest::Approx(r.c).epsilon(1e-12));
    CHECK(k.norm_factor == doctest::Approx(r.nf).epsilon(1e-12));
    CHECK(k.d_alpha == doctest::Approx(r.d).epsilon(1e-12));
    CHECK(k.tail_p == doctest::Approx(r.p).epsilon(1e-12));
  }
  CHECK(c_alpha(0.9) == doctest::Approx(0.7441).epsilon(1e-4));
}

TEST_CASE("removable singularity at alpha one") {
  CHECK(c_alpha(1.0) == doctest::Approx(M_PI / 4).epsilon(1e-15));
  CHECK(std::abs(c_alpha(1.0) - M_PI / 4) < 1e-8);
  // both sides of the guard band agree with the limit to 1e-5
  CHECK(std::abs(c_alpha(1 - 1e-6) - 0.7853977100537790319) < 1e-12);
  CHECK(std::abs(c_alpha(1 + 1e-6) - 0.78539861674202522876) < 1e-12);
  CHECK(std::abs(c_alpha(1 - 1e-6) - c_alpha(1 + 1e-6)) < 1e-5);
  CHECK(1.0 / norm_factor(1.0) == doctest::Approx(M_PI / 4).epsilon(1e-14));
  CHECK(d_alpha(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("alpha two endpoint") {
  const AlphaConstants k = alpha_constants(2.0);
  CHECK_FALSE(k.fractional_available);
  CHECK(std::isnan(k.c_alpha));
  CHECK(std::isnan(k.norm_factor));
  CHECK(std::isnan(k.tail_p));
  CHECK(std::isinf(k.d_alpha));
  CHECK(std::isfinite(d_alpha(2.0 - 1e-9)));
}

TEST_CASE("order outside (0, 2] is a domain error") {
  for (double a : {0.0, -0.5, 2.0000001, double(NAN)}) {
    try {
      alpha_constants(a);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
}

TEST_CASE("constant identities over a fine order grid") {
  for (int i = 0; i < 200; ++i) {
    const double a = 0.05 + 1.9 * (i + 0.5) / 200.0;
    if (std::abs(a - 1.0) < 1e-12) continue;
    const AlphaConstants k = alpha_constants(a);
    CHECK(std::abs(k.c_alpha * k.norm_factor - 1.0) < 1e-10);
    CHECK(k.tail_p == doctest::Approx(-1.0 / (4.0 * k.c_alpha)).epsilon(1e-12));
    CHECK(k.tail_p < 0.0);
    CHECK(std::isfinite(k.d_alpha));
  }
}
