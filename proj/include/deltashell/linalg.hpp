#pragma once

#include <vector>

namespace dshell::linalg {

// Dense real non-symmetric eigendecomposition via LAPACK dgeevx with
// balancing. Eigenvalues are returned sorted by real part ascending; the
// right/left eigenvector columns follow the same order and are rescaled so
// that vl^T * vr = I (the dual pairing used by biorthogonal expansions).
struct EigResult {
  int n = 0;
  std::vector<double> re;        // real parts, ascending
  std::vector<double> im;        // matching imaginary parts
  std::vector<double> vr;        // column-major n*n (if vectors requested)
  std::vector<double> vl;        // column-major n*n, dual-normalized
  double max_abs_imag = 0.0;
};

EigResult eig_general(const std::vector<double>& a_rowmajor, int n,
                      bool want_vectors);

}  // namespace dshell::linalg
