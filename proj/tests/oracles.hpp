#pragma once

// Test-only high-precision oracles (MPFR) and independent reference
// implementations. Never linked into the shipped library.

namespace oracles {

// Gamma(x) at 256-bit precision, rounded to double.
double mp_gamma(double x);

// Gamma(-nu-offset)/Gamma(-nu) at 256-bit precision.
double mp_gamma_ratio(double nu, double offset);

// Kummer M(a,b,z) by direct series at 256-bit precision.
double mp_kummer_m(double a, double b, double z);

// Kummer U(a,b,z) through the connection formula at 256-bit precision
// (half-integer b only).
double mp_kummer_u(double a, double b, double z);

// U(a,b,z) by asymptotic seeding at z0 >> z and inward RK4 integration of
// Kummer's ODE (independent of the connection formula).
double ode_kummer_u(double a, double b, double z, double z0 = 60.0,
                    int steps = 400000);

// <l',0|cos(theta)|l,0> by direct numerical quadrature over the sphere.
double cos_matrix_element(int l, int lp);

}  // namespace oracles
