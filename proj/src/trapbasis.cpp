#include "deltashell/trapbasis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "deltashell/errors.hpp"
#include "deltashell/quadrature.hpp"
#include "deltashell/roots.hpp"
#include "deltashell/specfun.hpp"

namespace dshell::trapbasis {

namespace sf = dshell::specfun;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double busch_prefactor(int l) {
  // (-1)^l (2/pi) [Gamma(l+3/2)/(2l+1)!!]^2 = (-1)^l / (2 * 4^l)
  double c = 0.5;
  for (int k = 0; k < l; ++k) c *= -0.25;
  return c;
}

double irregular_prefactor(int l) {
  const double d = sf::double_factorial(2 * l + 1);
  return d * d / (2 * l + 1);
}
}  // namespace

TrapSolutionValues TrapSolutionPair::at(double r) const {
  if (!(r > 0.0)) throw std::domain_error("trap solutions: r must be > 0");
  const double z = r * r;
  const double b1 = l + 1.5;
  const double b2 = 0.5 - l;
  const double a1 = -nu;
  const double a2 = -nu - l - 0.5;
  const double m1 = sf::kummer_m(a1, b1, z).value;
  const double m1p = (a1 / b1) * sf::kummer_m(a1 + 1.0, b1 + 1.0, z).value;
  const double m2 = sf::kummer_m(a2, b2, z).value;
  const double m2p = (a2 / b2) * sf::kummer_m(a2 + 1.0, b2 + 1.0, z).value;

  const double ex = std::exp(-0.5 * z);
  const double rl = std::pow(r, l);
  const double rmi = std::pow(r, -(l + 1));
  const double cg = irregular_prefactor(l);

  TrapSolutionValues v;
  v.f = rl * ex * m1;
  v.fp = ex * ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * m1) -
               std::pow(r, l + 1) * m1 + 2.0 * std::pow(r, l + 1) * m1p);
  v.g = -cg * rmi * ex * m2;
  v.gp = -cg * ex * (-(l + 1.0) * std::pow(r, -(l + 2)) * m2 -
                     std::pow(r, -l) * m2 + 2.0 * std::pow(r, -l) * m2p);
  return v;
}

double TrapSolutionPair::wronskian_constant() const {
  const double d = sf::double_factorial(2 * l + 1);
  return d * d;
}

TrapSolutionPair trap_solutions(int l, double E) {
  if (l < 0) throw std::domain_error("trap_solutions: l >= 0 required");
  // -l + 1/2 can never be a nonpositive integer for integer l
  assert(0.5 - l != std::floor(0.5 - l));
  TrapSolutionPair p;
  p.l = l;
  p.E = E;
  p.nu = 0.5 * (E - l - 1.5);
  return p;
}

TrapSolutionValues solution_values(Mode mode, int l, double E, double r) {
  if (mode == Mode::trap) return trap_solutions(l, E).at(r);
  if (!(E > 0.0))
    throw std::domain_error("solution_values: free-space mode requires E > 0");
  const double k = std::sqrt(2.0 * E);
  const sf::SphBessel b = sf::sph_bessel(l, k * r);
  return {b.j, b.n, k * b.jp, k * b.np};
}

PseudopotentialSpec make_pseudopotential(int l, double r_s, double E0,
                                         const std::function<double(double)>& beta_fn,
                                         Mode mode) {
  if (!(r_s > 0.0))
    throw std::invalid_argument(
        "make_pseudopotential: r_s must be positive (no zero-radius shell "
        "exists for l > 0)");
  if (l < 0) throw std::invalid_argument("make_pseudopotential: l >= 0");
  PseudopotentialSpec spec;
  spec.mode = mode;
  spec.l = l;
  spec.r_s = r_s;
  spec.E0 = E0;
  spec.beta0 = beta_fn(E0);
  spec.v0 = solution_values(mode, l, E0, r_s);
  const double fscale = std::max(std::fabs(spec.v0.f), std::fabs(spec.v0.fp) * r_s);
  const double gscale = std::max(std::fabs(spec.v0.g), std::fabs(spec.v0.gp) * r_s);
  if (std::fabs(spec.v0.f) < 1e-12 * fscale)
    throw NodeError("make_pseudopotential: f(E0) has a node at r_s; perturb r_s");
  if (std::fabs(spec.v0.g) < 1e-12 * gscale)
    throw NodeError("make_pseudopotential: g(E0) has a node at r_s; perturb r_s");
  spec.c1 = -spec.v0.g / spec.v0.f;
  spec.c2 = -spec.v0.gp / spec.v0.g;
  return spec;
}

void dressed_beta_ratio(const PseudopotentialSpec& spec, double E, double* num,
                        double* den) {
  const TrapSolutionValues v = solution_values(spec.mode, spec.l, E, spec.r_s);
  const TrapSolutionValues& v0 = spec.v0;
  // Eq. with both sides multiplied by f(E): entire in E, no f-node poles.
  *num = v.f * (v.f * v0.gp - v.fp * v0.g) * spec.beta0;
  *den = v0.f * (v.f * v.gp - v.fp * v.g) +
         v.f * (v0.g * v.gp - v.g * v0.gp) * spec.beta0;
}

double dressed_beta(const PseudopotentialSpec& spec, double E) {
  double num = 0.0, den = 0.0;
  dressed_beta_ratio(spec, E, &num, &den);
  if (den == 0.0) {
    if (num == 0.0)
      throw InvariantError("dressed_beta: indeterminate 0/0 at a pole");
    return num > 0.0 ? kInf : -kInf;
  }
  return num / den;
}

double dressed_beta_p_wave_limit(double r_s, double E0, double beta0, double E) {
  return 3.0 * beta0 / (3.0 + (6.0 / r_s) * (E - E0) * beta0);
}

double busch_rhs(int l, double nu) {
  return busch_prefactor(l) * sf::gamma_ratio(nu, l + 0.5);
}

namespace {

BuschResult busch_solve(const std::function<void(double, double*, double*)>& lhs_ratio,
                        int l, double nu_lo, double nu_hi, int density) {
  if (!(nu_hi > nu_lo)) throw std::invalid_argument("busch: bad nu window");
  const double c = busch_prefactor(l);
  // Pole-cleared residual: N(nu) rg(-nu-l-1/2) - c D(nu) rg(-nu), entire.
  auto residual = [&](double nu) {
    double num = 0.0, den = 0.0;
    lhs_ratio(nu, &num, &den);
    return num * sf::rgamma(-nu - l - 0.5) - c * den * sf::rgamma(-nu);
  };
  const int n = std::max(8, (int)std::llround(density * (nu_hi - nu_lo)));
  BuschResult out;
  for (const auto& br : roots::scan_sign_changes(residual, nu_lo, nu_hi, n)) {
    double root;
    if (br.lo == br.hi) {
      root = br.lo;
    } else {
      // contract demands 1e-10; steep roots near dressed-beta poles want
      // machine-level refinement for clean downstream boundary conditions
      root = roots::bisect(residual, br.lo, br.hi, 1e-15, 300);
      // diagnostics: brackets straddling a pole of either side of the raw
      // equation (RHS poles at half-integer nu+l, LHS poles where D flips)
      double nlo, dlo, nhi, dhi;
      lhs_ratio(br.lo, &nlo, &dlo);
      lhs_ratio(br.hi, &nhi, &dhi);
      if (dlo * dhi < 0.0)
        out.diagnostics.push_back("bracket [" + std::to_string(br.lo) + "," +
                                  std::to_string(br.hi) +
                                  "] straddles a dressed-beta pole");
      const double plo = std::ceil(br.lo + l + 0.5 - 1e-12);
      if (plo + 1e-12 < br.hi + l + 0.5 && std::floor(plo) == plo &&
          -(plo - l - 0.5) <= nu_hi)
        out.diagnostics.push_back("bracket [" + std::to_string(br.lo) + "," +
                                  std::to_string(br.hi) +
                                  "] straddles a Busch RHS pole");
    }
    if (out.nu.empty() || std::fabs(root - out.nu.back()) > 1e-9)
      out.nu.push_back(root);
  }
  return out;
}

}  // namespace

BuschResult busch_eigenvalues(const PseudopotentialSpec& spec, double nu_lo,
                              double nu_hi, int density) {
  auto ratio = [&spec](double nu, double* num, double* den) {
    const double E = 2.0 * nu + spec.l + 1.5;
    dressed_beta_ratio(spec, E, num, den);
  };
  return busch_solve(ratio, spec.l, nu_lo, nu_hi, density);
}

BuschResult busch_constant_beta(int l, double beta, double nu_lo, double nu_hi,
                                int density) {
  auto ratio = [beta](double, double* num, double* den) {
    *num = beta;
    *den = 1.0;
  };
  return busch_solve(ratio, l, nu_lo, nu_hi, density);
}

namespace {

// F> and its d/dr through the decaying Kummer-U route (normalization uA = 1).
struct OutsideValues {
  double K, Kp;
};
OutsideValues outside_values(int l, double nu, double r) {
  const double z = r * r;
  const double b = l + 1.5;
  const sf::EvalResult u = sf::kummer_u(-nu, b, z);
  const sf::EvalResult up = sf::kummer_u_deriv(-nu, b, z);
  const double ex = std::exp(-0.5 * z);
  const double rl = std::pow(r, l);
  OutsideValues v;
  v.K = rl * ex * u.value;
  v.Kp = ex * ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * u.value) -
               std::pow(r, l + 1) * u.value + 2.0 * std::pow(r, l + 1) * up.value);
  return v;
}

}  // namespace

TrapEigenpair eigenpair(const PseudopotentialSpec& spec, double nu) {
  if (spec.mode != Mode::trap)
    throw std::invalid_argument("eigenpair: trap mode only");
  const int l = spec.l;
  const double E = 2.0 * nu + l + 1.5;

  // nu must solve the transcendental equation to 1e-8. Near dressed-beta
  // poles the residual is ill-conditioned, so accept either a small relative
  // residual or a sign change bracketing nu within +-1e-9.
  {
    const double c = busch_prefactor(l);
    auto resid = [&](double x) {
      double num = 0.0, den = 0.0;
      dressed_beta_ratio(spec, 2.0 * x + l + 1.5, &num, &den);
      return num * sf::rgamma(-x - l - 0.5) - c * den * sf::rgamma(-x);
    };
    double num = 0.0, den = 0.0;
    dressed_beta_ratio(spec, E, &num, &den);
    const double t1 = num * sf::rgamma(-nu - l - 0.5);
    const double t2 = c * den * sf::rgamma(-nu);
    const double scale = std::fabs(t1) + std::fabs(t2) + 1e-300;
    const bool small_resid = std::fabs(t1 - t2) <= 1e-8 * scale;
    const bool bracketed = resid(nu - 1e-9) * resid(nu + 1e-9) <= 0.0;
    if (!small_resid && !bracketed)
      throw InvariantError("eigenpair: nu does not solve the Busch equation");
  }

  TrapEigenpair ep;
  ep.kind = TrapEigenpair::Kind::pseudo;
  ep.l = l;
  ep.nu = nu;
  ep.E = E;
  ep.r_s = spec.r_s;
  ep.strength = spec.strength();
  ep.beta_tilde = busch_rhs(l, nu);

  const TrapSolutionValues v = solution_values(Mode::trap, l, E, spec.r_s);
  const OutsideValues K = outside_values(l, nu, spec.r_s);
  if (v.f == 0.0)
    throw NodeError("eigenpair: regular solution vanishes at r_s");
  ep.B = K.K / v.f;

  // Shell jump condition -(1/2)(F>' - F<') + s (c2 F> + F>') = 0; a violation
  // here flags a spurious root of the cleared residual.
  {
    const double s = ep.strength;
    const double jump = -0.5 * (K.Kp - ep.B * v.fp) + s * (spec.c2 * K.K + K.Kp);
    const double scale = std::fabs(K.Kp) + std::fabs(ep.B * v.fp) +
                         std::fabs(s * spec.c2 * K.K) + std::fabs(s * K.Kp) +
                         1e-300;
    if (std::fabs(jump) > 1e-8 * scale)
      throw InvariantError("eigenpair: shell jump condition violated (spurious root?)");
  }

  const double denom = 1.0 - 2.0 * ep.strength;
  if (std::fabs(denom) < 1e-12)
    throw NodeError("eigenpair: adjoint amplitude singular (1 - 2s ~ 0); perturb r_s or E0");
  ep.Cp = ep.B / denom;

  // Coefficient of f in the canonical outside form A (f + beta~ g); may
  // under/overflow near RHS poles, diagnostic only.
  const sf::SignedLog g1 = sf::signed_log_gamma(-(double)l - 0.5);
  const sf::SignedLog g2 = sf::signed_log_gamma(-nu - l - 0.5);
  ep.A = (g2.sign == 0) ? kInf
                        : g1.sign * g2.sign * std::exp(g1.log_abs - g2.log_abs);
  return ep;
}

TrapEigenpair oscillator_state(int l, int n) {
  if (l < 0 || n < 0) throw std::domain_error("oscillator_state: bad quantum numbers");
  TrapEigenpair ep;
  ep.kind = TrapEigenpair::Kind::oscillator;
  ep.l = l;
  ep.nu = n;
  ep.E = 2.0 * n + l + 1.5;
  ep.osc_norm = std::exp(
      0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(n + l + 1.5)));
  return ep;
}

double TrapEigenpair::F(double r) const {
  if (kind == Kind::oscillator) {
    const double z = r * r;
    return norm * osc_norm * std::pow(r, l) * std::exp(-0.5 * z) *
           sf::laguerre((int)nu, l + 0.5, z);
  }
  if (r < r_s) {
    return norm * B * trap_solutions(l, E).at(r).f;
  }
  return norm * outside_values(l, nu, r).K;
}

double TrapEigenpair::P(double r) const {
  if (kind == Kind::oscillator) return F(r);
  if (r < r_s) {
    return norm * Cp * trap_solutions(l, E).at(r).f;
  }
  return norm * outside_values(l, nu, r).K;
}

double TrapEigenpair::Fprime(double r) const {
  if (kind == Kind::oscillator) {
    const double z = r * r;
    const int n = (int)nu;
    const double lag = sf::laguerre(n, l + 0.5, z);
    const double lagp = (n == 0) ? 0.0 : -sf::laguerre(n - 1, l + 1.5, z);
    return norm * osc_norm * std::exp(-0.5 * z) *
           ((l == 0 ? 0.0 : l * std::pow(r, l - 1) * lag) -
            std::pow(r, l + 1) * lag + 2.0 * std::pow(r, l + 1) * lagp);
  }
  if (r < r_s) return norm * B * trap_solutions(l, E).at(r).fp;
  return norm * outside_values(l, nu, r).Kp;
}

double TrapEigenpair::Pprime(double r) const {
  if (kind == Kind::oscillator) return Fprime(r);
  if (r < r_s) return norm * Cp * trap_solutions(l, E).at(r).fp;
  return norm * outside_values(l, nu, r).Kp;
}

double radial_overlap(const TrapEigenpair& a, const TrapEigenpair& b,
                      double r_max, int r_power, double abs_tol) {
  auto integrand = [&](double r) {
    double w = a.P(r) * b.F(r) * r * r;
    for (int p = 0; p < r_power; ++p) w *= r;
    return w;
  };
  std::vector<double> breaks;
  if (a.kind == TrapEigenpair::Kind::pseudo) breaks.push_back(a.r_s);
  if (b.kind == TrapEigenpair::Kind::pseudo) breaks.push_back(b.r_s);
  return quad::adaptive_split(integrand, 0.0, r_max, breaks, abs_tol, 1e-11)
      .value;
}

BiorthogonalBasis build_basis(const BasisParams& params,
                              const std::function<double(int, double)>& beta_fn) {
  if (params.l_max < 0 || params.E_cut <= params.E_floor)
    throw std::invalid_argument("build_basis: bad parameters");
  BiorthogonalBasis basis;
  basis.params = params;
  basis.r_max = std::sqrt(2.0 * std::max(params.E_cut, 1.0)) + 6.0;

  for (int l = 0; l <= params.l_max; ++l) {
    if (l <= params.interacting_l_max) {
      auto bl = [&](double E) { return beta_fn(l, E); };
      const PseudopotentialSpec spec =
          make_pseudopotential(l, params.r_s, params.E0, bl);
      const double nu_lo = 0.5 * (params.E_floor - l - 1.5);
      const double nu_hi = 0.5 * (params.E_cut - l - 1.5);
      const BuschResult roots =
          busch_eigenvalues(spec, nu_lo, nu_hi, params.scan_density);
      for (const std::string& d : roots.diagnostics)
        basis.warnings.push_back("l=" + std::to_string(l) + ": " + d);
      for (double nu : roots.nu) {
        TrapEigenpair ep = eigenpair(spec, nu);
        if (ep.E >= params.E_floor && ep.E <= params.E_cut)
          basis.states.push_back(ep);
      }
    } else {
      for (int n = 0; 2.0 * n + l + 1.5 <= params.E_cut; ++n)
        basis.states.push_back(oscillator_state(l, n));
    }
  }

  std::sort(basis.states.begin(), basis.states.end(),
            [](const TrapEigenpair& x, const TrapEigenpair& y) {
              if (x.E != y.E) return x.E < y.E;
              return x.l < y.l;
            });

  for (size_t i = 0; i + 1 < basis.states.size(); ++i) {
    if (std::fabs(basis.states[i].E - basis.states[i + 1].E) < 1e-9 &&
        basis.states[i].l == basis.states[i + 1].l)
      basis.warnings.push_back(
          "near-degenerate eigenvalues at E=" + std::to_string(basis.states[i].E) +
          "; normalization may be ill-conditioned");
  }

  // Biorthonormalize: <P_n|F_n> = 1. Keeping P identical to F outside the
  // shell requires the same scale on both, hence positive pairing.
  for (TrapEigenpair& ep : basis.states) {
    if (ep.kind == TrapEigenpair::Kind::oscillator) continue;  // exact
    const double c = radial_overlap(ep, ep, basis.r_max);
    if (!(std::fabs(c) > 0.0))
      throw SolverError("build_basis: vanishing dual pairing");
    if (c < 0.0)
      basis.warnings.push_back(
          "negative dual pairing at E=" + std::to_string(ep.E) +
          "; P = F outside the shell is broken by normalization");
    ep.norm = 1.0 / std::sqrt(std::fabs(c));
  }
  return basis;
}

}  // namespace dshell::trapbasis
