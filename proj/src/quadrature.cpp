#include "deltashell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace dshell::quad {

namespace {

// QUADPACK 15-point Kronrod nodes (positive half) and weights, with the
// embedded 7-point Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kGl16X[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGl16W[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

}  // namespace

GKResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resg = 0.0, resk = 0.0;
  const double fc = f(c);
  resk = kWgk[7] * fc;
  resg = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  const double value = resk * h;
  const double err = std::fabs((resk - resg) * h);
  return {value, err};
}

GKResult adaptive(const std::function<double(double)>& f, double a, double b,
                  double abs_tol, double rel_tol, int max_panels) {
  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  GKResult whole = gk15(f, a, b);
  std::priority_queue<Panel> q;
  q.push({a, b, whole.value, whole.abs_error});
  double total = whole.value, total_err = whole.abs_error;
  int n = 1;
  while (n < max_panels &&
         total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    Panel p = q.top();
    q.pop();
    const double mid = 0.5 * (p.a + p.b);
    GKResult left = gk15(f, p.a, mid);
    GKResult right = gk15(f, mid, p.b);
    total += left.value + right.value - p.value;
    total_err += left.abs_error + right.abs_error - p.err;
    q.push({p.a, mid, left.value, left.abs_error});
    q.push({mid, p.b, right.value, right.abs_error});
    ++n;
  }
  return {total, total_err};
}

GKResult adaptive_split(const std::function<double(double)>& f, double a,
                        double b, const std::vector<double>& breaks,
                        double abs_tol, double rel_tol) {
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  GKResult out{0.0, 0.0};
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    GKResult piece = adaptive(f, pts[i], pts[i + 1], abs_tol, rel_tol);
    out.value += piece.value;
    out.abs_error += piece.abs_error;
  }
  return out;
}

FixedGrid fixed_grid(double a, double b, const std::vector<double>& breaks,
                     double max_panel) {
  if (!(b > a) || !(max_panel > 0)) throw std::invalid_argument("fixed_grid: bad window");
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  FixedGrid g;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    const int npan = std::max(1, (int)std::ceil((hi - lo) / max_panel));
    const double h = (hi - lo) / npan;
    for (int p = 0; p < npan; ++p) {
      const double c = lo + (p + 0.5) * h;
      for (int k = 7; k >= 0; --k) {
        g.x.push_back(c - 0.5 * h * kGl16X[k]);
        g.w.push_back(0.5 * h * kGl16W[k]);
      }
      for (int k = 0; k < 8; ++k) {
        g.x.push_back(c + 0.5 * h * kGl16X[k]);
        g.w.push_back(0.5 * h * kGl16W[k]);
      }
    }
  }
  return g;
}

}  // namespace dshell::quad
