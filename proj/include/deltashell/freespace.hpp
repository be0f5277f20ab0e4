#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dshell::freespace {

// Attractive spherical step potential: V(r) = -V0 for r < R0, 0 outside.
// Units throughout: hbar = mu = omega = 1, lengths in z0, energies in
// hbar*omega, so k = sqrt(2E) and the interior wavenumber is sqrt(2(E+V0)).
struct SquareWell {
  double V0 = 0.0;
  double R0 = 0.0;
};

// Throws std::invalid_argument for nonpositive parameters; returns a warning
// string (possibly empty) for legal-but-questionable wells (R0 >= 1).
std::string validate(const SquareWell& well);

// tan(delta_l(k)) from log-derivative matching at R0, principal object.
double tan_delta(const SquareWell& well, int l, double E);

// Phase shift unwrapped by continuation from threshold (no pi jumps on
// pole-free intervals). E > 0.
double phase_shift(const SquareWell& well, int l, double E);

// beta_l(E) = -tan(delta_l)/k^(2l+1). E > 0; throws PoleError (with an energy
// bracket) where delta_l crosses pi/2.
double scattering_length(const SquareWell& well, int l, double E);

// Analytic continuation of beta_l(E) below threshold, real for -V0 < E;
// coincides with scattering_length for E > 0 and with the Wigner constant at
// E = 0. This is the value the generalized trap eigenvalue problem needs on
// molecular branches.
double beta_continued(const SquareWell& well, int l, double E);

// All bound-state energies in [E_min, E_max] (both < 0), bisection to 1e-10.
std::vector<double> bound_states(const SquareWell& well, int l, double E_min,
                                 double E_max, int scan_points = 400);

// Independent Numerov verification oracle: integrates the reduced radial
// equation from r ~ 0 through the well and fits the asymptotic free form.
// Returns the principal branch of delta_l in (-pi/2, pi/2]. Step refinement
// until halving moves the result by < 1e-8; SolverError on failure.
double ode_oracle_phase_shift(const SquareWell& well, int l, double E);

// Sampled scattering-length function with pole exclusion intervals.
struct ScatteringLengthFn {
  int l = 0;
  SquareWell well;
  std::vector<std::pair<double, double>> samples;      // (E, beta), E ascending
  std::vector<std::pair<double, double>> exclusions;   // pole brackets
  std::string interpolation_rule = "linear";
  bool analytic_backend = true;  // evaluate from the well, not the samples

  // Evaluate beta_l(E); PoleError inside an exclusion bracket.
  double operator()(double E) const;

  // CSV per the shared schema: "# l=<l> V0=<v> R0=<r>" then "E,beta" rows.
  std::string to_csv() const;
};

ScatteringLengthFn sample_scattering_length(const SquareWell& well, int l,
                                            const std::vector<double>& energies);

}  // namespace dshell::freespace
