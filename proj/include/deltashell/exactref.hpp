#pragma once

#include <string>
#include <vector>

#include "deltashell/freespace.hpp"

namespace dshell::exactref {

// Eigenstate of the exact problem: harmonic trap everywhere plus the true
// square well (potential r^2/2 - V0 inside R0). Inside and outside are both
// Kummer-function solutions, matched at R0. Hermitian, so P = F.
struct ExactTrapState {
  enum class Kind { well, oscillator };
  Kind kind = Kind::oscillator;
  int l = 0;
  double E = 0.0;
  double nu_in = 0.0;   // (E + V0 - l - 3/2)/2
  double nu_out = 0.0;  // (E - l - 3/2)/2
  double match_radius = 0.0;
  double B_in = 0.0;  // inside amplitude against the outside U-normalization
  double norm = 1.0;
  double osc_norm = 0.0;  // oscillator branch

  double F(double r) const;
  double Fprime(double r) const;
};

// All eigenenergies in the window from the log-derivative matching at R0,
// bisection to 1e-10. Windows may extend to -V0 (evaluation is log-scaled).
std::vector<double> exact_trap_energies(const freespace::SquareWell& well,
                                        int l, double E_lo, double E_hi,
                                        int density_per_unit = 60);

// Construct (unnormalized) the state at an eigenenergy.
ExactTrapState exact_trap_state(const freespace::SquareWell& well, int l,
                                double E);

struct ExactBasis {
  freespace::SquareWell well;
  int l_max = 4;
  int interacting_l_max = 1;
  double E_floor = -3.5;
  double E_cut = 16.0;
  double r_max = 0.0;
  std::vector<ExactTrapState> states;  // normalized, sorted by (E, l)
  std::vector<std::string> warnings;
};

// Orthonormal reference basis: well-coupled channels for l <= interacting_l_max,
// unperturbed oscillator states above (the paper's truncation).
ExactBasis exact_basis(const freespace::SquareWell& well, int l_max,
                       int interacting_l_max, double E_floor, double E_cut);

// Two particles in an infinite 1D box with V = u delta(r - r_s) d/dr.
// F is continuous with derivative jump F'(r_s-) = (1+u) F'(r_s+);
// the adjoint P has a continuous derivative and jumps by P(r_s+) = (1+u) P(r_s-).
struct BoxToyState {
  double u = 0.0, r_s = 0.0, L = 0.0;
  double k = 0.0, E = 0.0;
  double B = 0.0;   // F< = B sin(k r); F> = sin(k (L - r))
  double Bp = 0.0;  // P< = Bp sin(k r); P> = sin(k (L - r))
  double norm = 1.0;

  double F(double r) const;
  double P(double r) const;
};

std::vector<BoxToyState> box_toy(double u, double r_s, double L, int n_states);

}  // namespace dshell::exactref
