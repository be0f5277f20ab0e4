#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dshell::trapbasis {

// Regular (f) and irregular (g) radial solutions of the isotropic-trap
// Schroedinger equation at energy E, in the normalization where
// f ~ r^l and g ~ -[(2l+1)!!]^2/((2l+1) r^{l+1}) as r -> 0:
//   f = r^l e^{-r^2/2} M(-nu, l+3/2, r^2)
//   g = -r^{-(l+1)} e^{-r^2/2} [(2l+1)!!]^2/(2l+1) M(-nu-l-1/2, -l+1/2, r^2)
// with nu = (E - l - 3/2)/2. E need not be a trap eigenvalue.
struct TrapSolutionValues {
  double f, g, fp, gp;  // values and d/dr
};

struct TrapSolutionPair {
  int l = 0;
  double E = 0.0;
  double nu = 0.0;
  TrapSolutionValues at(double r) const;
  // r-independent Wronskian r^2 (f g' - f' g) = [(2l+1)!!]^2
  double wronskian_constant() const;
};

TrapSolutionPair trap_solutions(int l, double E);

// Which solution pair parameterizes the delta shell: harmonic-trap Kummer
// functions, or free-space spherical Bessel (j_l, n_l) for the Eq.-(23)
// limits and Fig. 2 style curves.
enum class Mode { trap, free_space };

TrapSolutionValues solution_values(Mode mode, int l, double E, double r);

// One energy-dependent delta-shell pseudopotential instance,
//   V = s * delta(r - r_s) [c2 + d/dr],   s = c1*beta0/2,
// with c1 = -g0(r_s)/f0(r_s), c2 = -g0'(r_s)/g0(r_s) evaluated at E0.
struct PseudopotentialSpec {
  Mode mode = Mode::trap;
  int l = 0;
  double r_s = 0.0;
  double E0 = 0.0;
  double beta0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  TrapSolutionValues v0{};  // solution pair at (E0, r_s), cached

  double strength() const { return 0.5 * c1 * beta0; }
};

PseudopotentialSpec make_pseudopotential(int l, double r_s, double E0,
                                         const std::function<double(double)>& beta_fn,
                                         Mode mode = Mode::trap);

// Dressed scattering length beta~_l(E, E0): the scattering-length function
// the fixed-E0 shell imposes at energy E. Signed infinity at its poles;
// InvariantError only at an indeterminate 0/0 point. num/den exposes the
// pole-free homogeneous pair (the bracketing certificate).
double dressed_beta(const PseudopotentialSpec& spec, double E);
void dressed_beta_ratio(const PseudopotentialSpec& spec, double E, double* num,
                        double* den);

// Small-r_s p-wave limit of the dressed length in the trap,
// 3 b0 / (3 + (6/r_s)(E - E0) b0); the Eq.-(22) machinery converges to this
// linearly in r_s.
double dressed_beta_p_wave_limit(double r_s, double E0, double beta0, double E);

struct BuschResult {
  std::vector<double> nu;  // ascending
  std::vector<std::string> diagnostics;
};

// All nu in [nu_lo, nu_hi] solving the generalized Busch equation
//   beta~_l(E, E0) = (-1)^l (2/pi) [Gamma(l+3/2)/(2l+1)!!]^2
//                    Gamma(-nu-l-1/2)/Gamma(-nu),  E = 2 nu + l + 3/2,
// by dense scan of a pole-cleared residual, bracketing, and bisection to
// |d nu| < 1e-10.
BuschResult busch_eigenvalues(const PseudopotentialSpec& spec, double nu_lo,
                              double nu_hi, int density = 2000);

// Same transcendental equation with a constant beta (the textbook case;
// l = 0 gives a = Gamma(-nu-1/2)/(2 Gamma(-nu))).
BuschResult busch_constant_beta(int l, double beta, double nu_lo, double nu_hi,
                                int density = 2000);

// Busch right-hand side (-1)^l/(2 4^l) * Gamma(-nu-l-1/2)/Gamma(-nu).
double busch_rhs(int l, double nu);

// One self-consistent trap eigenstate. F is continuous at r_s with the
// delta-shell derivative jump; P is the adjoint partner, discontinuous at
// r_s by the factor 1/(1-2s) and identical to F outside.
struct TrapEigenpair {
  enum class Kind { pseudo, oscillator };
  Kind kind = Kind::oscillator;
  int l = 0;
  double nu = 0.0;  // oscillator: the integer n
  double E = 0.0;
  // pseudo-state data
  double r_s = 0.0;
  double beta_tilde = 0.0;
  double strength = 0.0;
  double A = 0.0;   // coefficient of f in F> = A (f + beta~ g)
  double B = 0.0;   // inside amplitude, F< = B f
  double Cp = 0.0;  // adjoint inside amplitude, P< = Cp f = B/(1-2s) f
  double norm = 1.0;  // biorthonormalization scale applied to F and P
  // oscillator normalization constant
  double osc_norm = 0.0;

  double F(double r) const;
  double P(double r) const;
  double Fprime(double r) const;
  double Pprime(double r) const;
};

// Construct the (unnormalized) eigenpair at a Busch root. Verifies that nu
// satisfies the transcendental equation to 1e-8 and that the constructed F
// honors the shell jump condition; throws InvariantError otherwise (a
// spurious root).
TrapEigenpair eigenpair(const PseudopotentialSpec& spec, double nu);

// Unperturbed oscillator state (also used for non-interacting partial waves).
TrapEigenpair oscillator_state(int l, int n);

struct BasisParams {
  int l_max = 4;
  int interacting_l_max = 1;
  double r_s = 0.05;
  double E0 = 0.0;
  double E_floor = -3.5;
  double E_cut = 16.0;
  int scan_density = 2000;
  double overlap_tolerance = 1e-8;
};

struct BiorthogonalBasis {
  BasisParams params;
  double r_max = 0.0;
  std::vector<TrapEigenpair> states;  // sorted by E, ties by l ascending
  std::vector<std::string> warnings;
};

// beta_fn(l, E) supplies the bare scattering-length function per partial wave
// (queried only for l <= interacting_l_max).
BiorthogonalBasis build_basis(const BasisParams& params,
                              const std::function<double(int, double)>& beta_fn);

// Radial overlap <Pa | r^pw | Fb> with measure r^2 dr, split at the shell.
double radial_overlap(const TrapEigenpair& a, const TrapEigenpair& b,
                      double r_max, int r_power = 0, double abs_tol = 1e-12);

}  // namespace dshell::trapbasis
