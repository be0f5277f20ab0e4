#include "deltashell/freespace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "deltashell/errors.hpp"
#include "deltashell/roots.hpp"
#include "deltashell/specfun.hpp"

namespace dshell::freespace {

namespace sf = dshell::specfun;

std::string validate(const SquareWell& well) {
  if (!(well.V0 > 0.0)) throw std::invalid_argument("SquareWell: V0 must be > 0");
  if (!(well.R0 > 0.0)) throw std::invalid_argument("SquareWell: R0 must be > 0");
  if (well.R0 >= 1.0)
    return "SquareWell: R0 >= 1 trap unit; the pseudopotential replacement is "
           "not meaningful at this radius";
  return {};
}

namespace {

// Interior regular solution j_l(k' r) and its d/dr at R0.
struct Interior {
  double F, Fp;
};
Interior interior_at_R0(const SquareWell& well, int l, double E) {
  if (!(E > -well.V0))
    throw std::domain_error("square well: E must exceed -V0");
  const double kp = std::sqrt(2.0 * (E + well.V0));
  const sf::SphBessel in = sf::sph_bessel(l, kp * well.R0);
  return {in.j, kp * in.jp};
}

}  // namespace

double tan_delta(const SquareWell& well, int l, double E) {
  if (!(E > 0.0)) throw std::domain_error("tan_delta: requires E > 0");
  if (l < 0) throw std::domain_error("tan_delta: requires l >= 0");
  if (well.V0 == 0.0) return 0.0;
  const double k = std::sqrt(2.0 * E);
  const Interior in = interior_at_R0(well, l, E);
  const sf::SphBessel out = sf::sph_bessel(l, k * well.R0);
  // Product form avoids interior nodes blowing up the log derivative.
  const double num = k * out.jp * in.F - out.j * in.Fp;
  const double den = k * out.np * in.F - out.n * in.Fp;
  return num / den;
}

double phase_shift(const SquareWell& well, int l, double E) {
  if (!(E > 0.0)) throw std::domain_error("phase_shift: requires E > 0");
  if (well.V0 == 0.0) return 0.0;
  // Continuation from threshold; refine the ladder until no step exceeds
  // pi/2 (which would make the branch assignment ambiguous).
  const double E0 = std::min(1e-9, 0.5 * E);
  for (int n = 256; n <= 65536; n *= 2) {
    double delta = std::atan(tan_delta(well, l, E0));
    bool ok = true;
    for (int i = 1; i <= n; ++i) {
      const double Ei = E0 + (E - E0) * i / n;
      const double p = std::atan(tan_delta(well, l, Ei));
      const double d = p + M_PI * std::round((delta - p) / M_PI);
      if (std::fabs(d - delta) > 0.45 * M_PI) {
        ok = false;
        break;
      }
      delta = d;
    }
    if (ok) return delta;
  }
  throw SolverError("phase_shift: branch continuation failed");
}

double scattering_length(const SquareWell& well, int l, double E) {
  if (!(E > 0.0)) throw std::domain_error("scattering_length: requires E > 0");
  const double k = std::sqrt(2.0 * E);
  const double t = tan_delta(well, l, E);
  if (std::fabs(t) > 1e12 || !std::isfinite(t)) {
    // locate the pole for the caller's exclusion bracket
    double lo = E * 0.999, hi = E * 1.001;
    auto invt = [&](double x) { return 1.0 / tan_delta(well, l, x); };
    for (int i = 0; i < 40 && invt(lo) * invt(hi) > 0.0; ++i) {
      lo *= 0.999;
      hi *= 1.001;
    }
    throw PoleError("scattering_length: delta crosses pi/2 near E=" +
                        std::to_string(E),
                    lo, hi);
  }
  return -t / std::pow(k, 2 * l + 1);
}

double beta_continued(const SquareWell& well, int l, double E) {
  if (!(E > -well.V0))
    throw std::domain_error("beta_continued: requires E > -V0");
  const double R = well.R0;
  const Interior in = interior_at_R0(well, l, E);
  const double dfac = sf::double_factorial(2 * l + 1);

  // Energy-analytic regular/irregular exterior pair, normalized so that
  // fh ~ r^l and gh ~ -[(2l+1)!!]^2/((2l+1) r^{l+1}) as r -> 0. In this
  // basis the matching coefficient is exactly beta_l(E) for every sign of E.
  double fh, fhp, gh, ghp;
  if (E > 1e-10) {
    const double k = std::sqrt(2.0 * E);
    const sf::SphBessel out = sf::sph_bessel(l, k * R);
    const double cf = dfac / std::pow(k, l);
    const double cg = dfac * std::pow(k, l + 1);
    fh = cf * out.j;
    fhp = cf * k * out.jp;
    gh = cg * out.n;
    ghp = cg * k * out.np;
  } else if (E < -1e-10) {
    const double kap = std::sqrt(-2.0 * E);
    const sf::ModSphBessel out = sf::mod_sph_bessel(l, kap * R);
    const double cf = dfac / std::pow(kap, l);
    const double cg = dfac * std::pow(kap, l + 1);
    const double si = (l % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l+1}
    fh = cf * out.i;
    fhp = cf * kap * out.ip;
    gh = cg * (si * out.i - (2.0 / M_PI) * out.k);
    ghp = cg * kap * (si * out.ip - (2.0 / M_PI) * out.kp);
  } else {
    // zero-energy limits of the pair
    const double c = dfac * sf::double_factorial(2 * l - 1);
    fh = std::pow(R, l);
    fhp = l * std::pow(R, l - 1);
    gh = -c / std::pow(R, l + 1);
    ghp = (l + 1) * c / std::pow(R, l + 2);
  }
  const double num = fhp * in.F - fh * in.Fp;
  const double den = ghp * in.F - gh * in.Fp;
  return -num / den;
}

std::vector<double> bound_states(const SquareWell& well, int l, double E_min,
                                 double E_max, int scan_points) {
  if (!(E_min < E_max) || !(E_max < 0.0))
    throw std::domain_error("bound_states: need E_min < E_max < 0");
  E_min = std::max(E_min, -well.V0 + 1e-12);
  auto mismatch = [&](double E) {
    const double kap = std::sqrt(-2.0 * E);
    const Interior in = interior_at_R0(well, l, E);
    const sf::ModSphBessel out = sf::mod_sph_bessel(l, kap * well.R0);
    return in.Fp * out.k - in.F * kap * out.kp;
  };
  std::vector<double> found;
  for (const auto& br :
       roots::scan_sign_changes(mismatch, E_min, E_max, scan_points)) {
    if (br.lo == br.hi) {
      found.push_back(br.lo);
    } else {
      found.push_back(roots::bisect(mismatch, br.lo, br.hi, 1e-10));
    }
  }
  return found;
}

double ode_oracle_phase_shift(const SquareWell& well, int l, double E) {
  if (!(E > 0.0)) throw std::domain_error("ode_oracle: requires E > 0");
  const double k = std::sqrt(2.0 * E);
  const double R0 = well.R0;
  const double r_match = std::max(10.0 * R0, R0 + 1.0);

  auto delta_at_step = [&](int n_inside) {
    // grid r_i = i h with R0 exactly a node
    const double h = R0 / n_inside;
    const int n1 = (int)std::llround(r_match / h);
    const int nfit = 8;  // least-squares fit points, lambda/16 apart
    const int dfit = std::max(1, (int)std::llround(M_PI / (8.0 * k) / h));
    const int n2 = n1 + (nfit - 1) * dfit;
    auto Q = [&](int i) {
      const double r = i * h;
      const double v =
          (i < n_inside) ? -well.V0 : (i == n_inside ? -0.5 * well.V0 : 0.0);
      return l * (l + 1) / (r * r) + 2.0 * v - 2.0 * E;
    };
    // regular-solution seed with two series corrections, u ~ r^{l+1}(1+c1r^2+c2r^4)
    const double c1 = -(E + well.V0) / (2.0 * l + 3.0);
    const double c2 = -(E + well.V0) * c1 / (4.0 * l + 10.0);
    auto seed = [&](double r) {
      return std::pow(r, l + 1) * (1.0 + c1 * r * r + c2 * r * r * r * r);
    };
    double um = seed(h), u0 = seed(2.0 * h);
    double qm = Q(1), q0 = Q(2);
    double u1 = u0;
    std::vector<double> ufit(nfit, 0.0);
    for (int i = 2; i < n2; ++i) {
      const double q1 = Q(i + 1);
      u1 = (2.0 * u0 * (1.0 + 5.0 * h * h * q0 / 12.0) -
            um * (1.0 - h * h * qm / 12.0)) /
           (1.0 - h * h * q1 / 12.0);
      if (std::fabs(u1) > 1e200) {  // rescale freely; overall norm is irrelevant
        u1 *= 1e-200;
        u0 *= 1e-200;
        for (double& uf : ufit) uf *= 1e-200;
      }
      um = u0;
      u0 = u1;
      qm = q0;
      q0 = q1;
      const int j = i + 1 - n1;
      if (j >= 0 && j % dfit == 0 && j / dfit < nfit) ufit[j / dfit] = u1;
    }
    // u(r) = r (A j_l - B n_l); least squares for (A, B), tan(d) = B/A
    double sjj = 0, sjn = 0, snn = 0, sju = 0, snu = 0;
    for (int m = 0; m < nfit; ++m) {
      const double r = (n1 + m * dfit) * h;
      const sf::SphBessel sb = sf::sph_bessel(l, k * r);
      const double cj = r * sb.j, cn = -r * sb.n;
      sjj += cj * cj;
      sjn += cj * cn;
      snn += cn * cn;
      sju += cj * ufit[m];
      snu += cn * ufit[m];
    }
    const double det = sjj * snn - sjn * sjn;
    const double A = (snn * sju - sjn * snu) / det;
    const double B = (sjj * snu - sjn * sju) / det;
    return std::atan2(B, A) - M_PI * std::round(std::atan2(B, A) / M_PI);
  };

  // Step-halving ladder. The junction at R0 limits raw Numerov to O(h^2), so
  // the halving sequence is Richardson-extrapolated; refinement stops when
  // one more halving moves the extrapolated value by < 1e-8.
  auto wrap = [](double d) {
    while (d > M_PI / 2) d -= M_PI;
    while (d <= -M_PI / 2) d += M_PI;
    return d;
  };
  double prev = delta_at_step(200);
  double prev_extrap = prev;
  bool have_extrap = false;
  for (int n = 400; n <= 200 * 64; n *= 2) {
    const double cur = delta_at_step(n);
    const double diff = wrap(cur - prev);
    const double extrap = cur + diff / 3.0;  // h^2 leading error
    if (std::fabs(diff) < 1e-8) return cur;
    if (have_extrap && std::fabs(wrap(extrap - prev_extrap)) < 1e-8)
      return extrap;
    prev = cur;
    prev_extrap = extrap;
    have_extrap = true;
  }
  throw SolverError("ode_oracle_phase_shift: step refinement did not converge");
}

double ScatteringLengthFn::operator()(double E) const {
  for (const auto& ex : exclusions) {
    if (E >= ex.first && E <= ex.second)
      throw PoleError("ScatteringLengthFn: E inside pole exclusion", ex.first,
                      ex.second);
  }
  if (analytic_backend) return beta_continued(well, l, E);
  if (samples.size() < 2)
    throw std::runtime_error("ScatteringLengthFn: not enough samples");
  // linear interpolation on the sample table
  auto it = std::lower_bound(
      samples.begin(), samples.end(), E,
      [](const std::pair<double, double>& s, double e) { return s.first < e; });
  if (it == samples.begin()) ++it;
  if (it == samples.end()) --it;
  const auto hi = *it;
  const auto lo = *(it - 1);
  const double t = (E - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

std::string ScatteringLengthFn::to_csv() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# l=%d V0=%.12g R0=%.12g\n", l, well.V0,
                well.R0);
  std::string out = buf;
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", s.first, s.second);
    out += buf;
  }
  return out;
}

ScatteringLengthFn sample_scattering_length(const SquareWell& well, int l,
                                            const std::vector<double>& energies) {
  ScatteringLengthFn fn;
  fn.l = l;
  fn.well = well;
  fn.analytic_backend = true;
  double prev_inv = 0.0;
  bool have_prev = false;
  double prev_E = 0.0;
  for (double E : energies) {
    const double t = (E > 0) ? tan_delta(well, l, E) : 0.0;
    const double inv = (E > 0 && t != 0.0) ? 1.0 / t : 1.0;
    if (have_prev && E > 0 && prev_E > 0 && inv * prev_inv < 0.0) {
      // Sign change of 1/tan: either a pole of beta or a zero crossing of
      // tan. Refine, then keep only genuine poles.
      const double p = roots::bisect(
          [&](double x) { return 1.0 / tan_delta(well, l, x); }, prev_E, E,
          1e-12);
      if (std::fabs(tan_delta(well, l, p)) > 1e3) {
        const double w = (E - prev_E) / 100.0;
        fn.exclusions.push_back({p - w, p + w});
      }
    }
    bool excluded = false;
    for (const auto& ex : fn.exclusions)
      if (E >= ex.first && E <= ex.second) excluded = true;
    if (!excluded) fn.samples.push_back({E, beta_continued(well, l, E)});
    prev_inv = inv;
    prev_E = E;
    have_prev = true;
  }
  return fn;
}

}  // namespace dshell::freespace
