#include "deltashell/exactref.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deltashell/errors.hpp"
#include "deltashell/quadrature.hpp"
#include "deltashell/roots.hpp"
#include "deltashell/specfun.hpp"
#include "deltashell/trapbasis.hpp"

namespace dshell::exactref {

namespace sf = dshell::specfun;

namespace {

struct PieceValues {
  double F, Fp;
};

// Inside solution r^l e^{-z/2} M(-nu_in, l+3/2, z) and d/dr at r.
PieceValues inside_values(int l, double nu_in, double r) {
  const double z = r * r;
  const double b = l + 1.5;
  const double m = sf::kummer_m(-nu_in, b, z).value;
  const double mp = (-nu_in / b) * sf::kummer_m(-nu_in + 1.0, b + 1.0, z).value;
  const double ex = std::exp(-0.5 * z);
  PieceValues v;
  v.F = std::pow(r, l) * ex * m;
  v.Fp = ex * ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * m) -
               std::pow(r, l + 1) * m + 2.0 * std::pow(r, l + 1) * mp);
  return v;
}

// Outside decaying solution r^l e^{-z/2} U(-nu_out, l+3/2, z) and d/dr.
PieceValues outside_values(int l, double nu_out, double r) {
  const double z = r * r;
  const double b = l + 1.5;
  const double u = sf::kummer_u(-nu_out, b, z).value;
  const double up = sf::kummer_u_deriv(-nu_out, b, z).value;
  const double ex = std::exp(-0.5 * z);
  PieceValues v;
  v.F = std::pow(r, l) * ex * u;
  v.Fp = ex * ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * u) -
               std::pow(r, l + 1) * u + 2.0 * std::pow(r, l + 1) * up);
  return v;
}

// Log-scaled matching mismatch; zeros are eigenenergies, finite for windows
// as deep as -V0 where the plain U overflows.
double match_mismatch(const freespace::SquareWell& well, int l, double E) {
  const double R = well.R0;
  const double z = R * R;
  const double b = l + 1.5;
  const double nu_in = 0.5 * (E + well.V0 - l - 1.5);
  const double nu_out = 0.5 * (E - l - 1.5);
  const PieceValues in = inside_values(l, nu_in, R);
  const sf::SignedLog u0 = sf::kummer_u_scaled(-nu_out, b, z);
  const sf::SignedLog u1 = sf::kummer_u_scaled(-nu_out + 1.0, b + 1.0, z);
  if (u0.sign == 0 && u1.sign == 0) return 0.0;
  const double lmax = std::max(u0.log_abs, u1.log_abs);
  const double su0 = (u0.sign == 0) ? 0.0 : u0.sign * std::exp(u0.log_abs - lmax);
  const double su1 = (u1.sign == 0) ? 0.0 : u1.sign * std::exp(u1.log_abs - lmax);
  const double ex = std::exp(-0.5 * z);
  const double K = std::pow(R, l) * ex * su0;
  const double Kup = nu_out * su1;  // scaled dU/dz = -a U(a+1,b+1,z), a=-nu
  const double Kp = ex * ((l == 0 ? 0.0 : l * std::pow(R, l - 1) * su0) -
                          std::pow(R, l + 1) * su0 +
                          2.0 * std::pow(R, l + 1) * Kup);
  return in.Fp * K - in.F * Kp;
}

}  // namespace

std::vector<double> exact_trap_energies(const freespace::SquareWell& well,
                                        int l, double E_lo, double E_hi,
                                        int density_per_unit) {
  if (!(E_hi > E_lo)) throw std::invalid_argument("exact_trap_energies: bad window");
  E_lo = std::max(E_lo, -well.V0 + 1e-9);
  auto f = [&](double E) { return match_mismatch(well, l, E); };
  const int n = std::max(16, (int)std::llround(density_per_unit * (E_hi - E_lo)));
  std::vector<double> out;
  for (const auto& br : roots::scan_sign_changes(f, E_lo, E_hi, n)) {
    const double root =
        (br.lo == br.hi) ? br.lo : roots::bisect(f, br.lo, br.hi, 1e-10);
    if (out.empty() || std::fabs(root - out.back()) > 1e-9) out.push_back(root);
  }
  return out;
}

ExactTrapState exact_trap_state(const freespace::SquareWell& well, int l,
                                double E) {
  ExactTrapState st;
  st.kind = ExactTrapState::Kind::well;
  st.l = l;
  st.E = E;
  st.nu_in = 0.5 * (E + well.V0 - l - 1.5);
  st.nu_out = 0.5 * (E - l - 1.5);
  st.match_radius = well.R0;
  const PieceValues in = inside_values(l, st.nu_in, well.R0);
  const PieceValues out = outside_values(l, st.nu_out, well.R0);
  if (in.F == 0.0)
    throw NodeError("exact_trap_state: interior node at the match radius");
  st.B_in = out.F / in.F;
  // matching must hold if E is an eigenvalue
  const double mm = in.Fp * out.F - in.F * out.Fp;
  const double scale =
      std::fabs(in.Fp * out.F) + std::fabs(in.F * out.Fp) + 1e-300;
  if (std::fabs(mm) > 1e-7 * scale)
    throw InvariantError("exact_trap_state: E is not an eigenenergy");
  return st;
}

double ExactTrapState::F(double r) const {
  if (kind == Kind::oscillator) {
    const double z = r * r;
    return norm * osc_norm * std::pow(r, l) * std::exp(-0.5 * z) *
           sf::laguerre((int)std::llround(nu_out), l + 0.5, z);
  }
  if (r < match_radius) return norm * B_in * inside_values(l, nu_in, r).F;
  return norm * outside_values(l, nu_out, r).F;
}

double ExactTrapState::Fprime(double r) const {
  if (kind == Kind::oscillator) {
    const double z = r * r;
    const int n = (int)std::llround(nu_out);
    const double lag = sf::laguerre(n, l + 0.5, z);
    const double lagp = (n == 0) ? 0.0 : -sf::laguerre(n - 1, l + 1.5, z);
    return norm * osc_norm * std::exp(-0.5 * z) *
           ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * lag) -
            std::pow(r, l + 1) * lag + 2.0 * std::pow(r, l + 1) * lagp);
  }
  if (r < match_radius) return norm * B_in * inside_values(l, nu_in, r).Fp;
  return norm * outside_values(l, nu_out, r).Fp;
}

ExactBasis exact_basis(const freespace::SquareWell& well, int l_max,
                       int interacting_l_max, double E_floor, double E_cut) {
  ExactBasis basis;
  basis.well = well;
  basis.l_max = l_max;
  basis.interacting_l_max = interacting_l_max;
  basis.E_floor = E_floor;
  basis.E_cut = E_cut;
  basis.r_max = std::sqrt(2.0 * std::max(E_cut, 1.0)) + 6.0;

  for (int l = 0; l <= l_max; ++l) {
    if (l <= interacting_l_max) {
      for (double E : exact_trap_energies(well, l, E_floor, E_cut)) {
        basis.states.push_back(exact_trap_state(well, l, E));
      }
    } else {
      for (int n = 0; 2.0 * n + l + 1.5 <= E_cut; ++n) {
        ExactTrapState st;
        st.kind = ExactTrapState::Kind::oscillator;
        st.l = l;
        st.nu_out = n;
        st.E = 2.0 * n + l + 1.5;
        st.osc_norm = std::exp(0.5 * (std::log(2.0) + std::lgamma(n + 1.0) -
                                      std::lgamma(n + l + 1.5)));
        basis.states.push_back(st);
      }
    }
  }
  std::sort(basis.states.begin(), basis.states.end(),
            [](const ExactTrapState& a, const ExactTrapState& b) {
              if (a.E != b.E) return a.E < b.E;
              return a.l < b.l;
            });
  for (size_t i = 0; i + 1 < basis.states.size(); ++i) {
    if (basis.states[i].l == basis.states[i + 1].l &&
        std::fabs(basis.states[i].E - basis.states[i + 1].E) < 1e-9)
      basis.warnings.push_back("near-degenerate exact eigenvalues at E=" +
                               std::to_string(basis.states[i].E));
  }
  for (ExactTrapState& st : basis.states) {
    if (st.kind == ExactTrapState::Kind::oscillator) continue;
    auto integrand = [&](double r) {
      const double v = st.F(r);
      return v * v * r * r;
    };
    const double c =
        quad::adaptive_split(integrand, 0.0, basis.r_max, {st.match_radius})
            .value;
    st.norm = 1.0 / std::sqrt(c);
  }
  return basis;
}

std::vector<BoxToyState> box_toy(double u, double r_s, double L, int n_states) {
  if (!(u > -1.0))
    throw std::invalid_argument("box_toy: u must exceed -1 (nondegenerate jump)");
  if (!(r_s > 0.0 && r_s < L))
    throw std::invalid_argument("box_toy: need 0 < r_s < L");
  if (n_states < 1) throw std::invalid_argument("box_toy: n_states >= 1");

  auto T = [&](double k) {
    return std::sin(k * (L - r_s)) * std::cos(k * r_s) +
           (1.0 + u) * std::cos(k * (L - r_s)) * std::sin(k * r_s);
  };
  std::vector<BoxToyState> out;
  const double k_hi = (n_states + 3) * M_PI / L;
  const int n = 80 * (n_states + 3);
  for (const auto& br : roots::scan_sign_changes(T, 1e-9, k_hi, n)) {
    if ((int)out.size() >= n_states) break;
    const double k = (br.lo == br.hi) ? br.lo : roots::bisect(T, br.lo, br.hi, 1e-12);
    if (!out.empty() && std::fabs(k - out.back().k) < 1e-9) continue;
    BoxToyState st;
    st.u = u;
    st.r_s = r_s;
    st.L = L;
    st.k = k;
    st.E = 0.5 * k * k;
    const double sin_in = std::sin(k * r_s), cos_in = std::cos(k * r_s);
    const double sin_out = std::sin(k * (L - r_s)), cos_out = std::cos(k * (L - r_s));
    if (std::fabs(sin_in) < 1e-12 || std::fabs(cos_in) < 1e-12)
      throw NodeError("box_toy: node of the bulk solution at r_s; perturb r_s");
    st.B = sin_out / sin_in;
    st.Bp = -cos_out / cos_in;
    // construction checks: F'(r_s-) = (1+u) F'(r_s+); P(r_s+) = (1+u) P(r_s-)
    const double jf = st.B * k * cos_in - (1.0 + u) * (-k * cos_out);
    const double jp = sin_out - (1.0 + u) * st.Bp * sin_in;
    if (std::fabs(jf) > 1e-9 * k * (std::fabs(st.B) + 1.0) ||
        std::fabs(jp) > 1e-9 * (std::fabs(st.Bp) + 1.0))
      throw InvariantError("box_toy: jump conditions violated at a root");
    out.push_back(st);
  }
  if ((int)out.size() < n_states)
    throw SolverError("box_toy: found fewer roots than requested");
  // biorthonormalize with the 1D measure
  for (BoxToyState& st : out) {
    auto integrand = [&](double r) { return st.P(r) * st.F(r); };
    const double c = quad::adaptive_split(integrand, 0.0, L, {r_s}).value;
    st.norm = 1.0 / std::sqrt(std::fabs(c));
    if (c < 0.0)
      throw InvariantError("box_toy: negative dual pairing");
  }
  return out;
}

double BoxToyState::F(double r) const {
  if (r < r_s) return norm * B * std::sin(k * r);
  return norm * std::sin(k * (L - r));
}

double BoxToyState::P(double r) const {
  if (r < r_s) return norm * Bp * std::sin(k * r);
  return norm * std::sin(k * (L - r));
}

}  // namespace dshell::exactref
