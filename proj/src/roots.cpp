#include "deltashell/roots.hpp"

#include <cmath>
#include <stdexcept>

#include "deltashell/errors.hpp"

namespace dshell::roots {

std::vector<Bracket> scan_sign_changes(const std::function<double(double)>& f,
                                       double lo, double hi, int n) {
  if (!(hi > lo) || n < 1) throw std::invalid_argument("scan_sign_changes: bad window");
  std::vector<Bracket> out;
  const double h = (hi - lo) / n;
  double x0 = lo;
  double f0 = f(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + i * h;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      out.push_back({x0, x0});
    } else if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 < 0.0) {
      out.push_back({x0, x1});
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) out.push_back({x0, x0});
  return out;
}

double brent(const std::function<double(double)>& f, double lo, double hi,
             double xtol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw SolverError("brent: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (fb * fc > 0.0) {
      c = a; fc = fa; d = b - a; e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::fabs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < (min1 < min2 ? min1 : min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::fabs(d) > tol1)
      b += d;
    else
      b += (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw SolverError("brent: max iterations exceeded");
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double fa = f(lo), fb = f(hi);
  if (fa == 0.0) return lo;
  if (fb == 0.0) return hi;
  if (fa * fb > 0.0) throw SolverError("bisect: root not bracketed");
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fa * fm < 0.0) {
      hi = mid;
      fb = fm;
    } else {
      lo = mid;
      fa = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dshell::roots
