#pragma once

#include <functional>
#include <vector>

namespace dshell::roots {

struct Bracket {
  double lo;
  double hi;
};

// Sample f on a uniform grid of n+1 points and return every sign-change cell.
// Grid points where f is exactly zero are returned as degenerate brackets.
std::vector<Bracket> scan_sign_changes(const std::function<double(double)>& f,
                                       double lo, double hi, int n);

// Brent's method on a bracketing interval. Requires f(lo)*f(hi) <= 0.
double brent(const std::function<double(double)>& f, double lo, double hi,
             double xtol, int max_iter = 200);

// Plain bisection, for callers that want guaranteed monotone shrinkage.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 200);

}  // namespace dshell::roots
