#include "deltashell/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltashell/errors.hpp"

namespace dshell::specfun {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxTerms = 500;
constexpr double kSeriesTarget = 1e-13;

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}
}  // namespace

SignedLog signed_log_gamma(double x) {
  if (x > 0.0) return {std::lgamma(x), 1};
  if (x == std::floor(x)) return {kInf, 0};  // pole
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1-x)), 1-x > 1 so positive.
  const double r = x - std::round(x);  // in (-1/2, 1/2), nonzero
  const double sin_abs = std::fabs(std::sin(M_PI * r));
  const double log_abs = std::log(M_PI) - std::log(sin_abs) - std::lgamma(1.0 - x);
  // sign(sin(pi x)) on (m, m+1) alternates with floor parity.
  const long long m = (long long)std::floor(x);
  const int sign = (m % 2 == 0) ? 1 : -1;
  return {log_abs, sign};
}

double rgamma(double x) {
  const SignedLog g = signed_log_gamma(x);
  if (g.sign == 0) return 0.0;
  return g.sign * std::exp(-g.log_abs);
}

double gamma_ratio(double nu, double offset) {
  const double num_arg = -nu - offset;
  const double den_arg = -nu;
  const bool num_pole = is_nonpositive_integer(num_arg);
  const bool den_pole = is_nonpositive_integer(den_arg);
  if (num_pole && den_pole)
    throw std::domain_error("gamma_ratio: numerator and denominator both at poles");
  if (den_pole) return 0.0;
  const SignedLog den = signed_log_gamma(den_arg);
  if (num_pole) {
    // Signed infinity: sign of the limit approaching the pole from above in
    // the numerator argument, Gamma(-m + eps) ~ (-1)^m / (m! eps).
    const long long m = (long long)std::llround(-num_arg);
    const int sres = (m % 2 == 0) ? 1 : -1;
    return (sres * den.sign) * kInf;
  }
  const SignedLog num = signed_log_gamma(num_arg);
  return (num.sign * den.sign) * std::exp(num.log_abs - den.log_abs);
}

double double_factorial(int n) {
  if (n < -1) throw std::domain_error("double_factorial: n < -1");
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw std::domain_error("laguerre: n < 0");
  if (n == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double lp1 = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) /
                       (k + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

namespace {

// Regular series j_l(x) = x^l/(2l+1)!! * sum_m (-x^2/2)^m / (m! (2l+3)...(2l+2m+1))
// and the modified version with +x^2/2. Accurate for small x.
double sph_jl_series(int l, double x, bool modified) {
  const double z = (modified ? 0.5 : -0.5) * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= z / (m * (2.0 * l + 2.0 * m + 1.0));
    sum += term;
    if (std::fabs(term) < kEps * std::fabs(sum)) break;
  }
  return std::pow(x, l) / double_factorial(2 * l + 1) * sum;
}

}  // namespace

SphBessel sph_bessel(int l, double x) {
  if (!(x > 0.0)) throw std::domain_error("sph_bessel: requires x > 0");
  if (l < 0) throw std::domain_error("sph_bessel: requires l >= 0");

  const double sx = std::sin(x), cx = std::cos(x);
  // Neumann part: upward recurrence is stable.
  std::vector<double> nn(l + 2);
  nn[0] = -cx / x;
  nn[1] = -cx / (x * x) - sx / x;
  for (int k = 1; k <= l; ++k) nn[k + 1] = (2.0 * k + 1.0) / x * nn[k] - nn[k - 1];

  // Regular part.
  std::vector<double> jj(l + 2);
  if (x < 0.2) {
    for (int k = 0; k <= l + 1; ++k) jj[k] = sph_jl_series(k, x, false);
  } else if (x >= l + 1.0) {
    std::vector<double> tmp(std::max(l + 2, 2));
    tmp[0] = sx / x;
    tmp[1] = sx / (x * x) - cx / x;
    for (int k = 1; k <= l; ++k)
      tmp[k + 1] = (2.0 * k + 1.0) / x * tmp[k] - tmp[k - 1];
    jj = tmp;
  } else {
    // Miller downward recurrence, normalized by j_0.
    const int lstart = l + 24;
    double fp = 0.0, fc = 1e-280;
    std::vector<double> f(lstart + 1, 0.0);
    f[lstart] = fc;
    for (int k = lstart; k >= 1; --k) {
      const double fm = (2.0 * k + 1.0) / x * fc - fp;
      fp = fc;
      fc = fm;
      if (k - 1 <= l + 1) f[k - 1] = fc;
      if (std::fabs(fc) > 1e250) {  // rescale to avoid overflow
        const double s = 1e-250;
        fc *= s;
        fp *= s;
        for (int m = k - 1; m <= lstart && m >= 0; ++m) f[m] *= s;
      }
    }
    const double scale = (sx / x) / fc;
    for (int k = 0; k <= l + 1; ++k) jj[k] = f[k] * scale;
  }

  SphBessel out;
  out.j = jj[l];
  out.n = nn[l];
  out.jp = (l == 0) ? -jj[1] : jj[l - 1] - (l + 1.0) / x * jj[l];
  out.np = (l == 0) ? -nn[1] : nn[l - 1] - (l + 1.0) / x * nn[l];
  return out;
}

ModSphBessel mod_sph_bessel(int l, double x) {
  if (!(x > 0.0)) throw std::domain_error("mod_sph_bessel: requires x > 0");
  if (l < 0) throw std::domain_error("mod_sph_bessel: requires l >= 0");

  // i_l by series (converges for all x of interest), k_l by upward recurrence.
  std::vector<double> ii(l + 2), kk(l + 2);
  for (int k = 0; k <= l + 1; ++k) ii[k] = sph_jl_series(k, x, true);
  const double e = std::exp(-x) * M_PI / 2.0;
  kk[0] = e / x;
  kk[1] = e * (1.0 / x + 1.0 / (x * x));
  for (int k = 1; k <= l; ++k) kk[k + 1] = kk[k - 1] + (2.0 * k + 1.0) / x * kk[k];

  ModSphBessel out;
  out.i = ii[l];
  out.k = kk[l];
  out.ip = ii[l + 1] + l / x * ii[l];
  out.kp = (l == 0) ? -kk[1] : -kk[l - 1] - (l + 1.0) / x * kk[l];
  return out;
}

EvalResult kummer_m(double a, double b, double z) {
  if (is_nonpositive_integer(b))
    throw std::domain_error("kummer_m: b is a nonpositive integer");
  if (z < 0.0) {
    // Kummer transformation: the -z series is the alternating-sign direction.
    const EvalResult t = kummer_m(b - a, b, -z);
    const double ez = std::exp(z);
    return {ez * t.value, ez * t.abs_error_estimate + std::fabs(ez * t.value) * kEps};
  }
  double term = 1.0, sum = 1.0, abs_sum = 1.0;
  const bool poly = is_nonpositive_integer(a);
  for (int n = 0; n < kMaxTerms; ++n) {
    if (poly && a + n == 0.0) {
      // Polynomial case terminated exactly.
      return {sum, abs_sum * kEps * (n + 1.0)};
    }
    term *= (a + n) * z / ((b + n) * (n + 1.0));
    sum += term;
    abs_sum += std::fabs(term);
    const bool past_growth = (n + 1.0) > std::fabs(z) && (n + 1.0) > std::fabs(a);
    if (past_growth && std::fabs(term) < kSeriesTarget &&
        std::fabs(term) < kEps * std::fabs(sum) + kSeriesTarget) {
      return {sum, std::fabs(term) + abs_sum * kEps * std::sqrt(n + 1.0)};
    }
  }
  throw SolverError("kummer_m: series failed to converge (a=" +
                    std::to_string(a) + ", b=" + std::to_string(b) +
                    ", z=" + std::to_string(z) + ")");
}

EvalResult kummer_m_deriv(double a, double b, double z) {
  const EvalResult m = kummer_m(a + 1.0, b + 1.0, z);
  const double f = a / b;
  return {f * m.value, std::fabs(f) * m.abs_error_estimate};
}

namespace {

// Asymptotic series U(a,b,z) ~ z^{-a} sum_n (a)_n (a-b+1)_n / (n! (-z)^n),
// truncated at the smallest term (best-effort, honest estimate). Returns
// false only when no truncation point was found.
bool kummer_u_asymptotic(double a, double b, double z, EvalResult* out) {
  double term = 1.0, sum = 1.0;
  double min_term = 1.0;
  bool terminated = false;
  for (int n = 0; n < 300; ++n) {
    const double next = term * (a + n) * (a - b + 1.0 + n) / (-(n + 1.0) * z);
    if (std::fabs(next) >= std::fabs(term)) {
      // divergence point; truncation error ~ first omitted term
      min_term = std::fabs(next);
      terminated = true;
      break;
    }
    term = next;
    sum += term;
    if (std::fabs(term) < kEps * std::fabs(sum)) {
      min_term = std::fabs(term);
      terminated = true;
      break;
    }
  }
  if (!terminated) return false;
  const double pref = std::exp(-a * std::log(z));
  out->value = pref * sum;
  out->abs_error_estimate = pref * (min_term + std::fabs(sum) * kEps * 4.0);
  return true;
}

// Connection-formula evaluation with honest cancellation tracking.
EvalResult kummer_u_connection(double a, double b, double z) {
  // U = G1 * M(a,b,z) + G2 * z^{1-b} * M(a-b+1, 2-b, z)
  // G1 = Gamma(1-b)/Gamma(a+1-b), G2 = Gamma(b-1)/Gamma(a).
  const EvalResult m1 = kummer_m(a, b, z);
  const EvalResult m2 = kummer_m(a - b + 1.0, 2.0 - b, z);
  const SignedLog lg1n = signed_log_gamma(1.0 - b);
  const SignedLog lg2n = signed_log_gamma(b - 1.0);
  const double rg1 = rgamma(a + 1.0 - b);
  const double rg2 = rgamma(a);
  const double g1 = (rg1 == 0.0) ? 0.0 : lg1n.sign * std::exp(lg1n.log_abs) * rg1;
  const double zp = std::exp((1.0 - b) * std::log(z));
  const double g2 = (rg2 == 0.0) ? 0.0 : lg2n.sign * std::exp(lg2n.log_abs) * rg2;
  const double br1 = g1 * m1.value;
  const double br2 = g2 * zp * m2.value;
  const double value = br1 + br2;
  const double err = (std::fabs(br1) + std::fabs(br2)) * 4.0 * kEps +
                     std::fabs(g1) * m1.abs_error_estimate +
                     std::fabs(g2) * zp * m2.abs_error_estimate;
  return {value, err};
}

}  // namespace

EvalResult kummer_u(double a, double b, double z) {
  if (!(z > 0.0)) throw std::domain_error("kummer_u: requires z > 0");
  if (b == std::floor(b))
    throw std::domain_error("kummer_u: integer b not supported (need half-integer)");
  EvalResult asym{0.0, kInf};
  bool have_asym = false;
  if (z >= 12.0) {
    have_asym = kummer_u_asymptotic(a, b, z, &asym);
    if (have_asym && asym.abs_error_estimate <= 1e-13 * std::fabs(asym.value))
      return asym;
  }
  const EvalResult conn = kummer_u_connection(a, b, z);
  if (have_asym && asym.abs_error_estimate < conn.abs_error_estimate)
    return asym;
  return conn;
}

EvalResult kummer_u_deriv(double a, double b, double z) {
  const EvalResult u = kummer_u(a + 1.0, b + 1.0, z);
  return {-a * u.value, std::fabs(a) * u.abs_error_estimate};
}

double kummer_u_checked(double a, double b, double z, double rel_budget,
                        double abs_budget) {
  const EvalResult u = kummer_u(a, b, z);
  const double budget = std::max(abs_budget, rel_budget * std::fabs(u.value));
  if (u.abs_error_estimate > budget)
    throw PrecisionLossError(
        "kummer_u: cancellation exceeds error budget (a=" + std::to_string(a) +
            ", b=" + std::to_string(b) + ", z=" + std::to_string(z) +
            ", est=" + std::to_string(u.abs_error_estimate) + ")",
        u.abs_error_estimate);
  return u.value;
}

SignedLog kummer_u_scaled(double a, double b, double z) {
  if (!(z > 0.0)) throw std::domain_error("kummer_u_scaled: requires z > 0");
  EvalResult asym{0.0, kInf};
  bool have_asym = false;
  if (z >= 12.0) {
    have_asym = kummer_u_asymptotic(a, b, z, &asym) && asym.value != 0.0 &&
                std::isfinite(asym.value);
    if (have_asym && asym.abs_error_estimate <= 1e-11 * std::fabs(asym.value))
      return {std::log(std::fabs(asym.value)), asym.value > 0 ? 1 : -1};
  }
  // log-sum of the two connection branches, factored to avoid overflow
  const EvalResult m1 = kummer_m(a, b, z);
  const EvalResult m2 = kummer_m(a - b + 1.0, 2.0 - b, z);
  const SignedLog lg1n = signed_log_gamma(1.0 - b);
  const SignedLog lg1d = signed_log_gamma(a + 1.0 - b);
  const SignedLog lg2n = signed_log_gamma(b - 1.0);
  const SignedLog lg2d = signed_log_gamma(a);
  double l1 = -kInf, l2 = -kInf;
  int s1 = 0, s2 = 0;
  if (lg1d.sign != 0 && m1.value != 0.0) {
    l1 = lg1n.log_abs - lg1d.log_abs + std::log(std::fabs(m1.value));
    s1 = lg1n.sign * lg1d.sign * (m1.value > 0 ? 1 : -1);
  }
  if (lg2d.sign != 0 && m2.value != 0.0) {
    l2 = lg2n.log_abs - lg2d.log_abs + (1.0 - b) * std::log(z) +
         std::log(std::fabs(m2.value));
    s2 = lg2n.sign * lg2d.sign * (m2.value > 0 ? 1 : -1);
  }
  if (s1 == 0 && s2 == 0) return {-kInf, 0};
  const double lmax = std::max(l1, l2);
  const double comb = (s1 == 0 ? 0.0 : s1 * std::exp(l1 - lmax)) +
                      (s2 == 0 ? 0.0 : s2 * std::exp(l2 - lmax));
  // severe branch cancellation: fall back to the asymptotic value if any
  if (std::fabs(comb) < 64.0 * kEps && have_asym)
    return {std::log(std::fabs(asym.value)), asym.value > 0 ? 1 : -1};
  if (comb == 0.0) return {-kInf, 0};
  return {lmax + std::log(std::fabs(comb)), comb > 0 ? 1 : -1};
}

}  // namespace dshell::specfun
