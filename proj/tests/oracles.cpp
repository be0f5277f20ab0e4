#include "oracles.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gsl/gsl_sf_legendre.h>

namespace oracles {

namespace {
constexpr mpfr_prec_t kPrec = 256;
}

double mp_gamma(double x) {
  mpfr_t v, r;
  mpfr_init2(v, kPrec);
  mpfr_init2(r, kPrec);
  mpfr_set_d(v, x, MPFR_RNDN);
  mpfr_gamma(r, v, MPFR_RNDN);
  const double out = mpfr_get_d(r, MPFR_RNDN);
  mpfr_clear(v);
  mpfr_clear(r);
  return out;
}

double mp_gamma_ratio(double nu, double offset) {
  mpfr_t a, b, ga, gb;
  mpfr_init2(a, kPrec);
  mpfr_init2(b, kPrec);
  mpfr_init2(ga, kPrec);
  mpfr_init2(gb, kPrec);
  mpfr_set_d(a, -nu - offset, MPFR_RNDN);
  mpfr_set_d(b, -nu, MPFR_RNDN);
  mpfr_gamma(ga, a, MPFR_RNDN);
  mpfr_gamma(gb, b, MPFR_RNDN);
  mpfr_div(ga, ga, gb, MPFR_RNDN);
  const double out = mpfr_get_d(ga, MPFR_RNDN);
  mpfr_clear(a);
  mpfr_clear(b);
  mpfr_clear(ga);
  mpfr_clear(gb);
  return out;
}

namespace {

// series sum into `acc`, all MPFR
void mp_kummer_m_raw(mpfr_t acc, double a, double b, double z) {
  mpfr_t term, fa, fb, fz, tmp;
  mpfr_inits2(kPrec, term, fa, fb, fz, tmp, (mpfr_ptr)nullptr);
  mpfr_set_d(fz, z, MPFR_RNDN);
  mpfr_set_ui(acc, 1, MPFR_RNDN);
  mpfr_set_ui(term, 1, MPFR_RNDN);
  for (int n = 0; n < 4000; ++n) {
    mpfr_set_d(fa, a + n, MPFR_RNDN);
    mpfr_set_d(fb, (b + n) * (n + 1.0), MPFR_RNDN);
    mpfr_mul(term, term, fa, MPFR_RNDN);
    mpfr_mul(term, term, fz, MPFR_RNDN);
    mpfr_div(term, term, fb, MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
    mpfr_abs(tmp, term, MPFR_RNDN);
    if (n > std::fabs(z) && n > std::fabs(a) &&
        mpfr_cmp_d(tmp, 1e-70) < 0)
      break;
  }
  mpfr_clears(term, fa, fb, fz, tmp, (mpfr_ptr)nullptr);
}

}  // namespace

double mp_kummer_m(double a, double b, double z) {
  mpfr_t acc;
  mpfr_init2(acc, kPrec);
  mp_kummer_m_raw(acc, a, b, z);
  const double out = mpfr_get_d(acc, MPFR_RNDN);
  mpfr_clear(acc);
  return out;
}

double mp_kummer_u(double a, double b, double z) {
  mpfr_t m1, m2, g, tmp, acc, zz;
  mpfr_inits2(kPrec, m1, m2, g, tmp, acc, zz, (mpfr_ptr)nullptr);
  mp_kummer_m_raw(m1, a, b, z);
  mp_kummer_m_raw(m2, a - b + 1.0, 2.0 - b, z);
  // branch 1: Gamma(1-b)/Gamma(a+1-b) * m1
  mpfr_set_d(tmp, 1.0 - b, MPFR_RNDN);
  mpfr_gamma(g, tmp, MPFR_RNDN);
  mpfr_mul(m1, m1, g, MPFR_RNDN);
  mpfr_set_d(tmp, a + 1.0 - b, MPFR_RNDN);
  mpfr_gamma(g, tmp, MPFR_RNDN);
  mpfr_div(m1, m1, g, MPFR_RNDN);
  // branch 2: Gamma(b-1)/Gamma(a) * z^{1-b} * m2
  mpfr_set_d(tmp, b - 1.0, MPFR_RNDN);
  mpfr_gamma(g, tmp, MPFR_RNDN);
  mpfr_mul(m2, m2, g, MPFR_RNDN);
  mpfr_set_d(tmp, a, MPFR_RNDN);
  mpfr_gamma(g, tmp, MPFR_RNDN);
  mpfr_div(m2, m2, g, MPFR_RNDN);
  mpfr_set_d(zz, z, MPFR_RNDN);
  mpfr_set_d(tmp, 1.0 - b, MPFR_RNDN);
  mpfr_pow(zz, zz, tmp, MPFR_RNDN);
  mpfr_mul(m2, m2, zz, MPFR_RNDN);
  mpfr_add(acc, m1, m2, MPFR_RNDN);
  const double out = mpfr_get_d(acc, MPFR_RNDN);
  mpfr_clears(m1, m2, g, tmp, acc, zz, (mpfr_ptr)nullptr);
  return out;
}

double ode_kummer_u(double a, double b, double z, double z0, int steps) {
  if (z0 <= z) throw std::invalid_argument("ode_kummer_u: need z0 > z");
  // asymptotic seed at z0 for U and U' = -a U(a+1, b+1, z0)
  auto asym = [](double aa, double bb, double zz) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 60; ++n) {
      const double next = term * (aa + n) * (aa - bb + 1.0 + n) / (-(n + 1.0) * zz);
      if (std::fabs(next) >= std::fabs(term)) break;
      term = next;
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return std::pow(zz, -aa) * sum;
  };
  double u = asym(a, b, z0);
  double up = -a * asym(a + 1.0, b + 1.0, z0);
  // RK4 inward on z u'' + (b - z) u' - a u = 0
  auto rhs = [&](double x, double uu, double vv) {
    return (a * uu - (b - x) * vv) / x;
  };
  const double h = (z - z0) / steps;  // negative
  double x = z0;
  for (int i = 0; i < steps; ++i) {
    const double k1u = up, k1v = rhs(x, u, up);
    const double k2u = up + 0.5 * h * k1v, k2v = rhs(x + 0.5 * h, u + 0.5 * h * k1u, up + 0.5 * h * k1v);
    const double k3u = up + 0.5 * h * k2v, k3v = rhs(x + 0.5 * h, u + 0.5 * h * k2u, up + 0.5 * h * k2v);
    const double k4u = up + h * k3v, k4v = rhs(x + h, u + h * k3u, up + h * k3v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    up += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    x += h;
  }
  return u;
}

double cos_matrix_element(int l, int lp) {
  // int Y_l'0* cos(theta) Y_l0 dOmega reduced to a 1D Legendre integral,
  // Simpson rule on a fine theta grid.
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double th = M_PI * i / n;
    const double x = std::cos(th);
    const double y1 = gsl_sf_legendre_sphPlm(lp, 0, x);
    const double y2 = gsl_sf_legendre_sphPlm(l, 0, x);
    const double f = 2.0 * M_PI * y1 * x * y2 * std::sin(th);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * (M_PI / n) / 3.0;
}

}  // namespace oracles
