#pragma once

#include <functional>
#include <string>
#include <vector>

#include "deltashell/exactref.hpp"
#include "deltashell/freespace.hpp"
#include "deltashell/linalg.hpp"
#include "deltashell/quadrature.hpp"
#include "deltashell/trapbasis.hpp"

namespace dshell::trapres {

// <l',m|cos(theta)|l,m>: zero unless |l-l'|=1; axial symmetry keeps m fixed.
double angular_coupling(int l, int l_prime, int m = 0);

// Basis functions sampled once on a fixed composite quadrature grid split at
// the shell/well radius; everything downstream contracts against the cache.
struct SampledBasis {
  int n = 0;
  double delta_r = 0.0;                // the split radius (r_s or R0)
  std::vector<int> l;
  std::vector<double> E;
  std::vector<int> label;              // (l, index within l), stable across E0
  quad::FixedGrid grid;
  std::vector<std::vector<double>> F;  // [state][node]
  std::vector<std::vector<double>> P;
  std::vector<std::string> warnings;
};

SampledBasis sample_basis(const trapbasis::BiorthogonalBasis& basis);
SampledBasis sample_basis(const exactref::ExactBasis& basis);

// H_mn = (E_n + dz^2/2) d_mn - dz <l_m 0|cos|l_n 0> Int P_m r F_n r^2 dr.
struct SeparationHamiltonian {
  double delta_z = 0.0;
  int n = 0;
  std::vector<double> H;  // row-major
  std::vector<double> R;  // radial matrix elements (dipole), row-major
  std::vector<int> l;
  std::vector<double> E;
  std::vector<std::string> warnings;
};

SeparationHamiltonian build_h_matrix(const SampledBasis& basis, double delta_z);

// Diagonalize with reality checks: warning above warn_tol (relative),
// InvariantError above fail_tol.
linalg::EigResult diagonalize(const SeparationHamiltonian& h, bool want_vectors,
                              std::vector<std::string>* warnings,
                              double warn_tol = 1e-8, double fail_tol = 1e-6);

struct ScanParams {
  double E0_lo = -3.2;
  double E0_hi = 12.0;
  int coarse_points = 24;
  double residual_tol = 1e-8;
};

// One self-consistent state: E = E0 + dz^2/2 with E the tracked eigenvalue of
// H(dz) in the E0-parameterized biorthogonal basis.
struct TrackSolution {
  double E0 = 0.0;
  double E = 0.0;
  bool multi_root = false;
  std::vector<double> all_E0;          // every root found for this track
  int dominant_l = -1;
  std::vector<int> label;              // basis labels at the solution
  std::vector<double> right, left;     // eigenvector in basis coords
};

using BasisFactory = std::function<SampledBasis(double E0)>;

std::vector<TrackSolution> self_consistent_spectrum(
    const BasisFactory& factory, double delta_z, int n_states,
    const ScanParams& scan, const std::vector<double>* predictions = nullptr,
    std::vector<std::string>* warnings = nullptr);

struct SweepConfig {
  freespace::SquareWell well;
  trapbasis::BasisParams basis;  // basis.E0 is ignored (self-consistency sets it)
  double dz_min = 0.0;
  double dz_max = 3.0;
  double dz_step = 0.05;
  double refine_step = 0.02;
  std::vector<std::pair<double, double>> refine_windows;
  int n_states = 8;
  enum class Solver { pseudo, exact } solver = Solver::pseudo;
  ScanParams scan;
  int threads = 0;  // 0: hardware/DELTASHELL_THREADS
};

struct SpectrumCurve {
  std::vector<double> dz;
  std::vector<std::vector<double>> E;        // [point][sorted index]
  std::vector<std::vector<double>> E0;       // collision energies (pseudo)
  std::vector<std::vector<int>> l_char;      // dominant l per state
  std::vector<std::vector<double>> overlap;  // continuation overlap to prev point
  std::vector<std::vector<int>> track_of;    // adiabatic track id per sorted index
  std::vector<std::vector<bool>> multi_root;
  std::vector<std::string> warnings;
  int n_tracks = 0;

  // energy of adiabatic track t at grid point i (NaN when unmatched)
  double track_energy(int i, int t) const;
};

SpectrumCurve sweep_separation(const SweepConfig& config);

struct ResonanceReport {
  enum class Kind { crossing, avoided };
  Kind kind = Kind::crossing;
  double delta_z = 0.0;
  double gap = 0.0;  // minimal gap for avoided, 0 for crossing
  int track_a = 0;
  int track_b = 0;
};

std::vector<ResonanceReport> find_resonances(const SpectrumCurve& curve,
                                             double gap_threshold = 0.2,
                                             double crossing_tol = 2e-3);

// Default pseudopotential basis factory for a square well: bare scattering
// lengths from the analytic continuation, basis rebuilt per E0.
BasisFactory make_pseudo_factory(const freespace::SquareWell& well,
                                 const trapbasis::BasisParams& params);

}  // namespace dshell::trapres
