#include "deltashell/specfun.hpp"

#include <doctest.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_laguerre.h>

#include <cmath>

#include "deltashell/errors.hpp"
#include "oracles.hpp"

using namespace dshell;
using namespace dshell::specfun;

TEST_CASE("gamma_ratio vanishes exactly at nonnegative integer nu") {
  for (int n = 0; n <= 12; ++n) {
    CHECK(gamma_ratio((double)n, 0.5) == 0.0);
    CHECK(gamma_ratio((double)n, 1.5) == 0.0);
  }
}

TEST_CASE("gamma_ratio against the high-precision gamma oracle") {
  // frozen from the oracle: Gamma(-0.25)/Gamma(0.25)
  const double expect = oracles::mp_gamma_ratio(-0.25, 0.5);
  CHECK(gamma_ratio(-0.25, 0.5) == doctest::Approx(expect).epsilon(1e-13));

  for (double nu : {-2.7, -0.9, 0.3, 1.4, 3.8, 7.2}) {
    for (double off : {0.5, 1.5, 2.5}) {
      const double mine = gamma_ratio(nu, off);
      const double ref = oracles::mp_gamma_ratio(nu, off);
      CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("gamma_ratio recurrence Gamma(-nu-3/2) = Gamma(-nu-1/2)/(-nu-3/2)") {
  const double nu = 0.3;
  const double lhs = gamma_ratio(nu, 1.5);
  const double rhs = gamma_ratio(nu, 0.5) / (-nu - 1.5);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("sph_bessel closed forms") {
  const SphBessel b0 = sph_bessel(0, M_PI);
  CHECK(std::fabs(b0.j) < 1e-14);
  CHECK(b0.n == doctest::Approx(1.0 / M_PI).epsilon(1e-14));

  const SphBessel b1 = sph_bessel(1, 1.0);
  CHECK(b1.j == doctest::Approx(std::sin(1.0) - std::cos(1.0)).epsilon(1e-14));
}

TEST_CASE("sph_bessel small-argument asymptotics") {
  for (int l = 0; l <= 5; ++l) {
    const double x = 1e-3;
    const SphBessel b = sph_bessel(l, x);
    const double jlead = std::pow(x, l) / double_factorial(2 * l + 1);
    const double nlead = -double_factorial(2 * l - 1) / std::pow(x, l + 1);
    CHECK(b.j == doctest::Approx(jlead).epsilon(1e-5));
    CHECK(b.n == doctest::Approx(nlead).epsilon(1e-5));
  }
}

TEST_CASE("sph_bessel recurrence and GSL cross-check over the contract range") {
  for (int l = 0; l <= 6; ++l) {
    for (double x : {1e-4, 1e-3, 0.05, 0.3, 1.0, 2.5, 7.0, 14.0, 29.0, 50.0}) {
      const SphBessel b = sph_bessel(l, x);
      const double jref = gsl_sf_bessel_jl(l, x);
      const double nref = gsl_sf_bessel_yl(l, x);
      CHECK(b.j == doctest::Approx(jref).epsilon(1e-12).scale(std::fabs(jref) + 1e-300));
      CHECK(b.n == doctest::Approx(nref).epsilon(1e-12));
      if (l >= 1 && l <= 5) {
        const SphBessel lo = sph_bessel(l - 1, x);
        const SphBessel hi = sph_bessel(l + 1, x);
        const double scale = std::fabs((2 * l + 1) / x * b.j) + std::fabs(lo.j);
        CHECK(std::fabs(lo.j + hi.j - (2 * l + 1) / x * b.j) <= 1e-10 * scale);
        const double nscale = std::fabs((2 * l + 1) / x * b.n) + std::fabs(lo.n);
        CHECK(std::fabs(lo.n + hi.n - (2 * l + 1) / x * b.n) <= 1e-10 * nscale);
      }
      // derivative identity f' = f_{l-1} - (l+1)/x f
      if (l >= 1) {
        const SphBessel lo = sph_bessel(l - 1, x);
        CHECK(b.jp == doctest::Approx(lo.j - (l + 1) / x * b.j).epsilon(1e-10));
        CHECK(b.np == doctest::Approx(lo.n - (l + 1) / x * b.n).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sph_bessel domain errors") {
  CHECK_THROWS_AS(sph_bessel(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(sph_bessel(0, -1.0), std::domain_error);
}

TEST_CASE("modified spherical bessel closed forms and Wronskian") {
  for (double x : {0.05, 0.4, 1.7, 3.2, 8.0}) {
    const ModSphBessel m0 = mod_sph_bessel(0, x);
    CHECK(m0.i == doctest::Approx(std::sinh(x) / x).epsilon(1e-13));
    CHECK(m0.k == doctest::Approx(M_PI / 2.0 * std::exp(-x) / x).epsilon(1e-13));
    for (int l = 0; l <= 4; ++l) {
      const ModSphBessel m = mod_sph_bessel(l, x);
      const double w = m.i * m.kp - m.ip * m.k;
      CHECK(w == doctest::Approx(-M_PI / (2.0 * x * x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("kummer_m trivial values") {
  CHECK(kummer_m(0.0, 1.5, 3.7).value == doctest::Approx(1.0));
  for (double z : {0.1, 0.9, 4.0}) {
    CHECK(kummer_m(-1.0, 1.5, z).value ==
          doctest::Approx(1.0 - 2.0 * z / 3.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(kummer_m(0.5, -2.0, 1.0), std::domain_error);
}

TEST_CASE("kummer_m against the high-precision series oracle") {
  const double cases[][3] = {{-0.7, 1.5, 2.0},  {-3.3, 2.5, 0.01},
                             {-5.1, 1.5, 25.0}, {2.2, 3.5, 40.0},
                             {-7.9, 2.5, 80.0}, {-0.25, 0.5, 130.0}};
  for (const auto& c : cases) {
    const EvalResult m = kummer_m(c[0], c[1], c[2]);
    const double ref = oracles::mp_kummer_m(c[0], c[1], c[2]);
    CHECK(std::fabs(m.value - ref) <=
          std::max(3.0 * m.abs_error_estimate, 1e-12 * std::fabs(ref)));
  }
}

TEST_CASE("kummer transformation self-consistency") {
  for (double a : {-1.7, 0.4}) {
    for (double z : {0.5, 3.0, 12.0}) {
      const double b = 2.5;
      const EvalResult lhs = kummer_m(a, b, z);
      const EvalResult rhs = kummer_m(b - a, b, -z);  // internally transformed
      const double err = lhs.abs_error_estimate * std::exp(-z) +
                         rhs.abs_error_estimate + 1e-14 * std::fabs(rhs.value);
      CHECK(std::fabs(lhs.value * std::exp(-z) - rhs.value) <= 10.0 * err + 1e-300);
    }
  }
}

TEST_CASE("kummer_m nonconvergence is reported, not silent") {
  CHECK_THROWS_AS(kummer_m(-0.3, 1.5, 1e6), SolverError);
}

TEST_CASE("kummer_u polynomial reduction at nonpositive integer a") {
  // U(-1, 3/2, z) is proportional to L_1^{1/2}(z) = 3/2 - z
  for (double z : {0.3, 1.1, 6.0}) {
    const double u = kummer_u(-1.0, 1.5, z).value;
    const double lag = laguerre(1, 0.5, z);
    CHECK(u == doctest::Approx(-lag).epsilon(1e-12));
  }
}

TEST_CASE("kummer_u against independent oracles") {
  // ODE continuation oracle (asymptotic seed far out, integrated inward)
  const double u_ode = oracles::ode_kummer_u(-0.3, 1.5, 1.0);
  CHECK(kummer_u(-0.3, 1.5, 1.0).value == doctest::Approx(u_ode).epsilon(1e-8));

  // high-precision connection-formula oracle across the z range, including
  // the cancellation-prone midzone
  const double cases[][3] = {{-0.3, 1.5, 0.01}, {-2.6, 2.5, 4.0},
                             {-4.2, 1.5, 12.0}, {-6.3, 2.5, 16.0},
                             {-5.45, 3.5, 21.0}, {-7.1, 2.5, 60.0},
                             {3.25, 2.5, 0.0025}};
  for (const auto& c : cases) {
    const EvalResult u = kummer_u(c[0], c[1], c[2]);
    const double ref = oracles::mp_kummer_u(c[0], c[1], c[2]);
    CHECK(std::fabs(u.value - ref) <=
          std::max(3.0 * u.abs_error_estimate, 1e-11 * std::fabs(ref)));
  }
}

TEST_CASE("kummer_u asymptotic law z^{-a}") {
  const double u = kummer_u(-0.3, 1.5, 40.0).value;
  CHECK(u == doctest::Approx(std::pow(40.0, 0.3)).epsilon(0.01));
}

TEST_CASE("M/U Wronskian identity validates values and derivatives") {
  // M U' - M' U = -Gamma(b)/Gamma(a) z^{-b} e^z
  for (double a : {-2.3, -0.5, 0.7}) {
    for (int l = 0; l <= 2; ++l) {
      const double b = l + 1.5;
      for (double z : {0.01, 0.1, 1.0, 4.0, 10.0}) {
        const double m = kummer_m(a, b, z).value;
        const double mp = kummer_m_deriv(a, b, z).value;
        const double u = kummer_u(a, b, z).value;
        const double up = kummer_u_deriv(a, b, z).value;
        const double lhs = m * up - mp * u;
        const double expect = -std::tgamma(b) * rgamma(a) * std::pow(z, -b) *
                              std::exp(z);
        CHECK(lhs == doctest::Approx(expect).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("kummer_u error budget reporting") {
  // midzone point with genuine branch cancellation: estimate is honest and
  // tightening the budget turns it into a reported error
  const EvalResult u = kummer_u(-6.3, 2.5, 16.0);
  const double ref = oracles::mp_kummer_u(-6.3, 2.5, 16.0);
  CHECK(std::fabs(u.value - ref) <= 3.0 * u.abs_error_estimate);
  CHECK_THROWS_AS(kummer_u_checked(-6.3, 2.5, 16.0, 1e-16, 0.0),
                  PrecisionLossError);
  CHECK_NOTHROW(kummer_u_checked(-6.3, 2.5, 16.0, 1e-6));
}

TEST_CASE("kummer_u_scaled matches plain evaluation in range") {
  for (double a : {-3.3, 0.7, 2.2}) {
    for (double z : {0.01, 2.0, 30.0}) {
      const SignedLog s = kummer_u_scaled(a, 1.5, z);
      const double plain = kummer_u(a, 1.5, z).value;
      CHECK(s.sign * std::exp(s.log_abs) == doctest::Approx(plain).epsilon(1e-9));
    }
  }
}

TEST_CASE("laguerre against GSL") {
  for (int n : {0, 1, 3, 7}) {
    for (double x : {0.0, 0.4, 2.2, 9.0}) {
      CHECK(laguerre(n, 0.5, x) ==
            doctest::Approx(gsl_sf_laguerre_n(n, 0.5, x)).epsilon(1e-12));
    }
  }
}
