#include "deltashell/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deltashell/errors.hpp"

extern "C" {
void dgeevx_(const char* balanc, const char* jobvl, const char* jobvr,
             const char* sense, const int* n, double* a, const int* lda,
             double* wr, double* wi, double* vl, const int* ldvl, double* vr,
             const int* ldvr, int* ilo, int* ihi, double* scale, double* abnrm,
             double* rconde, double* rcondv, double* work, const int* lwork,
             int* iwork, int* info);
}

namespace dshell::linalg {

EigResult eig_general(const std::vector<double>& a_rowmajor, int n,
                      bool want_vectors) {
  if (n <= 0 || (int)a_rowmajor.size() != n * n)
    throw std::invalid_argument("eig_general: bad dimensions");

  // LAPACK wants column-major.
  std::vector<double> a(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[j * n + i] = a_rowmajor[i * n + j];

  std::vector<double> wr(n), wi(n);
  std::vector<double> vl(want_vectors ? n * n : 1),
      vr(want_vectors ? n * n : 1);
  std::vector<double> scale(n), rconde(1), rcondv(1);
  std::vector<int> iwork(2 * n);
  int ilo = 0, ihi = 0, info = 0;
  double abnrm = 0.0;
  const char balanc = 'B';
  const char jobv = want_vectors ? 'V' : 'N';
  const char sense = 'N';

  int lwork = -1;
  double wkopt = 0.0;
  dgeevx_(&balanc, &jobv, &jobv, &sense, &n, a.data(), &n, wr.data(),
          wi.data(), vl.data(), &n, vr.data(), &n, &ilo, &ihi, scale.data(),
          &abnrm, rconde.data(), rcondv.data(), &wkopt, &lwork, iwork.data(),
          &info);
  lwork = (int)wkopt;
  std::vector<double> work(std::max(lwork, 4 * n));
  lwork = (int)work.size();
  dgeevx_(&balanc, &jobv, &jobv, &sense, &n, a.data(), &n, wr.data(),
          wi.data(), vl.data(), &n, vr.data(), &n, &ilo, &ihi, scale.data(),
          &abnrm, rconde.data(), rcondv.data(), work.data(), &lwork,
          iwork.data(), &info);
  if (info != 0) throw SolverError("dgeevx failed, info=" + std::to_string(info));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return wr[i] < wr[j]; });

  EigResult out;
  out.n = n;
  out.re.resize(n);
  out.im.resize(n);
  for (int k = 0; k < n; ++k) {
    out.re[k] = wr[order[k]];
    out.im[k] = wi[order[k]];
    out.max_abs_imag = std::max(out.max_abs_imag, std::fabs(wi[order[k]]));
  }
  if (want_vectors) {
    out.vr.resize(n * n);
    out.vl.resize(n * n);
    for (int k = 0; k < n; ++k) {
      const int src = order[k];
      // Dual-normalize: scale left column so vl_k . vr_k = 1. Valid for real
      // eigenpairs; complex pairs are rejected by callers via max_abs_imag.
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += vl[src * n + i] * vr[src * n + i];
      if (dot == 0.0) throw SolverError("eig_general: defective dual pairing");
      for (int i = 0; i < n; ++i) {
        out.vr[k * n + i] = vr[src * n + i];
        out.vl[k * n + i] = vl[src * n + i] / dot;
      }
    }
  }
  return out;
}

}  // namespace dshell::linalg
