#pragma once

#include <cstdint>

namespace dshell::specfun {

// Value plus an absolute error estimate (same units as the value). The
// estimate is cancellation-aware: it tracks the largest intermediate scale
// times machine epsilon plus series truncation.
struct EvalResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

struct SignedLog {
  double log_abs;  // +inf at a pole
  int sign;        // -1, 0 (pole), +1
};

// log|Gamma(x)| with exact sign bookkeeping through the reflection formula.
SignedLog signed_log_gamma(double x);

// 1/Gamma(x); entire, exactly zero at nonpositive integers.
double rgamma(double x);

// Gamma(-nu-offset)/Gamma(-nu) for half-integer offset >= 1/2.
// Exactly zero when nu is a nonnegative integer (denominator pole); signed
// infinity at isolated numerator poles (the limit from nu just above).
double gamma_ratio(double nu, double offset);

// n!! with (-1)!! = 0!! = 1.
double double_factorial(int n);

// Generalized Laguerre polynomial L_n^{(alpha)}(x) by three-term recurrence.
double laguerre(int n, double alpha, double x);

// Spherical Bessel j_l, n_l and their derivatives w.r.t. x. Requires x > 0.
// Relative accuracy ~1e-12 over l <= 6, 1e-4 <= x <= 50.
struct SphBessel {
  double j, n, jp, np;
};
SphBessel sph_bessel(int l, double x);

// Modified spherical Bessel i_l, k_l with derivatives; x > 0.
struct ModSphBessel {
  double i, k, ip, kp;
};
ModSphBessel mod_sph_bessel(int l, double x);

// Kummer's confluent hypergeometric M(a,b,z). Direct Taylor series for
// z >= 0 (terms eventually single-signed); for z < 0 evaluated through the
// Kummer transformation M(a,b,z) = e^z M(b-a,b,-z), the stable direction.
// Throws SolverError if 500 terms fail to converge, std::domain_error for
// nonpositive-integer b.
EvalResult kummer_m(double a, double b, double z);

// dM/dz = (a/b) M(a+1, b+1, z).
EvalResult kummer_m_deriv(double a, double b, double z);

// Kummer U(a,b,z) for half-integer b, z > 0. Uses the M/M connection formula
// at moderate z and the divergent asymptotic series where it wins; the error
// estimate reports branch cancellation honestly.
EvalResult kummer_u(double a, double b, double z);

// dU/dz = -a U(a+1, b+1, z).
EvalResult kummer_u_deriv(double a, double b, double z);

// As kummer_u, but throws PrecisionLossError when the estimate exceeds
// max(abs_budget, rel_budget*|value|).
double kummer_u_checked(double a, double b, double z, double rel_budget = 1e-6,
                        double abs_budget = 0.0);

// log(|U(a,b,z)|) and sign, stable for parameter ranges where U itself
// over/underflows (deep bound-state windows).
SignedLog kummer_u_scaled(double a, double b, double z);

}  // namespace dshell::specfun
