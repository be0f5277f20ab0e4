#pragma once

#include <string>

#include "deltashell/exactref.hpp"
#include "deltashell/trapbasis.hpp"
#include "deltashell/trapres.hpp"

namespace dshell::serialize {

// Basis export: radial functions are re-derivable from the parameters, so
// only quantum numbers and amplitudes are stored.
// {E0, l_max, r_s, states: [{l, nu, E, A, B, norm}]}
std::string basis_json(const trapbasis::BiorthogonalBasis& basis);

// Spectrum CSV: delta_z, track_id, E, E0, l_character, dominant_overlap
std::string spectrum_csv(const trapres::SpectrumCurve& curve);

// Resonance report JSON: [{kind, delta_z, gap, track_a, track_b}]
std::string resonances_json(const std::vector<trapres::ResonanceReport>& reports);

// Box-toy wavefunction samples: r, then F_i, P_i per state.
std::string box_toy_csv(const std::vector<exactref::BoxToyState>& states,
                        int n_samples);

// Deterministic double formatting used by every writer.
std::string fmt(double v);

}  // namespace dshell::serialize
