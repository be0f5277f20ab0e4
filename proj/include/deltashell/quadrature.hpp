#pragma once

#include <functional>
#include <vector>

namespace dshell::quad {

struct GKResult {
  double value;
  double abs_error;  // |GK15 - G7| based estimate, summed over panels
};

// Single Gauss-Kronrod 15(7) panel on [a, b].
GKResult gk15(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection on GK15 panels until the summed error estimate meets
// abs_tol + rel_tol*|integral|.
GKResult adaptive(const std::function<double(double)>& f, double a, double b,
                  double abs_tol = 1e-12, double rel_tol = 1e-11,
                  int max_panels = 2000);

// Adaptive integral over [a, b] with interior breakpoints the integrand is
// allowed to be discontinuous across (each subinterval integrated separately).
GKResult adaptive_split(const std::function<double(double)>& f, double a,
                        double b, const std::vector<double>& breaks,
                        double abs_tol = 1e-12, double rel_tol = 1e-11);

// Fixed composite Gauss-Legendre 16 grid. Panels never straddle a breakpoint,
// so sampled integrands may jump there. Intended for sampling caches: evaluate
// each function once on `x`, then contract products against `w`.
struct FixedGrid {
  std::vector<double> x;
  std::vector<double> w;
};
FixedGrid fixed_grid(double a, double b, const std::vector<double>& breaks,
                     double max_panel);

}  // namespace dshell::quad
