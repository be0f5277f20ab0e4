#include "deltashell/trapres.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "deltashell/errors.hpp"
#include "deltashell/roots.hpp"

namespace dshell::trapres {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int thread_count(int requested, int njobs) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("DELTASHELL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = (int)std::thread::hardware_concurrency();
  if (n <= 0) n = 1;
  return std::max(1, std::min(n, njobs));
}

void parallel_for(int njobs, int threads, const std::function<void(int)>& body) {
  if (threads <= 1) {
    for (int i = 0; i < njobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < njobs; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

quad::FixedGrid basis_grid(double split, double r_max) {
  return quad::fixed_grid(1e-9, r_max, {split}, 0.5);
}

}  // namespace

double angular_coupling(int l, int l_prime, int m) {
  if (l < 0 || l_prime < 0) throw std::domain_error("angular_coupling: l >= 0");
  if (std::abs(m) > std::min(l, l_prime)) return 0.0;
  if (l_prime == l + 1) {
    const double num = (l + 1.0) * (l + 1.0) - (double)m * m;
    return std::sqrt(num / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
  }
  if (l == l_prime + 1) return angular_coupling(l_prime, l, m);
  return 0.0;
}

SampledBasis sample_basis(const trapbasis::BiorthogonalBasis& basis) {
  SampledBasis sb;
  sb.n = (int)basis.states.size();
  sb.delta_r = basis.params.r_s;
  sb.grid = basis_grid(basis.params.r_s, basis.r_max);
  sb.warnings = basis.warnings;
  const size_t ng = sb.grid.x.size();
  std::map<int, int> per_l_count;
  for (const auto& st : basis.states) {
    sb.l.push_back(st.l);
    sb.E.push_back(st.E);
    sb.label.push_back(st.l * 4096 + per_l_count[st.l]++);
    std::vector<double> f(ng), p(ng);
    for (size_t i = 0; i < ng; ++i) {
      const double r = sb.grid.x[i];
      f[i] = st.F(r);
      // P differs from F only inside the shell
      p[i] = (st.kind == trapbasis::TrapEigenpair::Kind::pseudo && r < st.r_s)
                 ? st.P(r)
                 : f[i];
    }
    sb.F.push_back(std::move(f));
    sb.P.push_back(std::move(p));
  }
  return sb;
}

SampledBasis sample_basis(const exactref::ExactBasis& basis) {
  SampledBasis sb;
  sb.n = (int)basis.states.size();
  sb.delta_r = basis.well.R0;
  sb.grid = basis_grid(basis.well.R0, basis.r_max);
  sb.warnings = basis.warnings;
  const size_t ng = sb.grid.x.size();
  std::map<int, int> per_l_count;
  for (const auto& st : basis.states) {
    sb.l.push_back(st.l);
    sb.E.push_back(st.E);
    sb.label.push_back(st.l * 4096 + per_l_count[st.l]++);
    std::vector<double> f(ng);
    for (size_t i = 0; i < ng; ++i) f[i] = st.F(sb.grid.x[i]);
    sb.P.push_back(f);
    sb.F.push_back(std::move(f));
  }
  return sb;
}

SeparationHamiltonian build_h_matrix(const SampledBasis& basis, double delta_z) {
  if (delta_z < 0.0) throw std::invalid_argument("build_h_matrix: delta_z >= 0");
  const int n = basis.n;
  SeparationHamiltonian h;
  h.delta_z = delta_z;
  h.n = n;
  h.l = basis.l;
  h.E = basis.E;
  h.warnings = basis.warnings;
  h.H.assign((size_t)n * n, 0.0);
  h.R.assign((size_t)n * n, 0.0);
  const size_t ng = basis.grid.x.size();
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(basis.l[m] - basis.l[k]) != 1) continue;
      double acc = 0.0;
      const auto& pm = basis.P[m];
      const auto& fk = basis.F[k];
      for (size_t i = 0; i < ng; ++i) {
        const double r = basis.grid.x[i];
        acc += basis.grid.w[i] * pm[i] * fk[i] * r * r * r;
      }
      h.R[(size_t)m * n + k] = acc;
    }
  }
  for (int m = 0; m < n; ++m) {
    h.H[(size_t)m * n + m] = basis.E[m] + 0.5 * delta_z * delta_z;
    for (int k = 0; k < n; ++k) {
      if (m == k) continue;
      const double cl = angular_coupling(basis.l[m], basis.l[k]);
      if (cl != 0.0)
        h.H[(size_t)m * n + k] -= delta_z * cl * h.R[(size_t)m * n + k];
    }
  }
  return h;
}

linalg::EigResult diagonalize(const SeparationHamiltonian& h, bool want_vectors,
                              std::vector<std::string>* warnings,
                              double warn_tol, double fail_tol) {
  linalg::EigResult eig = linalg::eig_general(h.H, h.n, want_vectors);
  double scale = 1.0;
  for (double v : eig.re) scale = std::max(scale, std::fabs(v));
  if (eig.max_abs_imag > fail_tol * scale)
    throw InvariantError("diagonalize: spectrum not real (max |Im| = " +
                         std::to_string(eig.max_abs_imag) + ")");
  if (warnings && eig.max_abs_imag > warn_tol * scale)
    warnings->push_back("diagonalize: imaginary residue " +
                        std::to_string(eig.max_abs_imag) + " at dz=" +
                        std::to_string(h.delta_z));
  return eig;
}

namespace {

int dominant_l(const SampledBasis& basis, const double* vr, int n) {
  std::map<int, double> weight;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    weight[basis.l[i]] += vr[i] * vr[i];
    total += vr[i] * vr[i];
  }
  int best_l = -1;
  double best = -1.0;
  for (const auto& [l, w] : weight) {
    if (w > best) {
      best = w;
      best_l = l;
    }
  }
  (void)total;
  return best_l;
}

void truncation_warning(const SampledBasis& basis, const linalg::EigResult& eig,
                        int n_states, std::vector<std::string>* warnings) {
  if (!warnings) return;
  double e_top = -1e300;
  for (double e : basis.E) e_top = std::max(e_top, e);
  for (int j = 0; j < std::min(n_states, eig.n); ++j) {
    double w_top = 0.0, w_all = 0.0;
    for (int i = 0; i < eig.n; ++i) {
      const double c2 = eig.vr[(size_t)j * eig.n + i] * eig.vr[(size_t)j * eig.n + i];
      w_all += c2;
      if (basis.E[i] > e_top - 2.0) w_top += c2;
    }
    if (w_all > 0 && w_top / w_all > 0.01) {
      warnings->push_back("truncation: top manifold carries " +
                          std::to_string(w_top / w_all) +
                          " of tracked state " + std::to_string(j));
      return;
    }
  }
}

}  // namespace

std::vector<TrackSolution> self_consistent_spectrum(
    const BasisFactory& factory, double delta_z, int n_states,
    const ScanParams& scan, const std::vector<double>* predictions,
    std::vector<std::string>* warnings) {
  if (n_states < 1) throw std::invalid_argument("self_consistent_spectrum: n_states >= 1");
  const double shift = 0.5 * delta_z * delta_z;

  struct Cached {
    SampledBasis basis;
    linalg::EigResult eig;
  };
  std::map<double, Cached> cache;
  auto solve_at = [&](double E0) -> const Cached& {
    auto it = cache.find(E0);
    if (it != cache.end()) return it->second;
    Cached c;
    c.basis = factory(E0);
    SeparationHamiltonian h = build_h_matrix(c.basis, delta_z);
    c.eig = diagonalize(h, true, warnings);
    auto [pos, ok] = cache.emplace(E0, std::move(c));
    (void)ok;
    return pos->second;
  };
  auto phi = [&](double E0, int j) {
    const Cached& c = solve_at(E0);
    if (j >= c.eig.n)
      throw SolverError("self_consistent_spectrum: basis smaller than track index");
    return c.eig.re[j] - shift - E0;
  };

  // Coarse scan shared by all tracks.
  std::vector<double> grid(scan.coarse_points + 1);
  for (int i = 0; i <= scan.coarse_points; ++i)
    grid[i] = scan.E0_lo + (scan.E0_hi - scan.E0_lo) * i / scan.coarse_points;
  std::vector<std::vector<double>> phis(grid.size(),
                                        std::vector<double>(n_states));
  for (size_t i = 0; i < grid.size(); ++i)
    for (int j = 0; j < n_states; ++j) phis[i][j] = phi(grid[i], j);

  std::vector<TrackSolution> out(n_states);
  for (int j = 0; j < n_states; ++j) {
    std::vector<double> roots;
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
      if (phis[i][j] == 0.0) {
        roots.push_back(grid[i]);
        continue;
      }
      if (phis[i][j] * phis[i + 1][j] < 0.0) {
        const double r = roots::brent([&](double e0) { return phi(e0, j); },
                                      grid[i], grid[i + 1], 1e-11);
        roots.push_back(r);
      }
    }
    if (roots.empty())
      throw SolverError("self_consistent_spectrum: no fixed point for track " +
                        std::to_string(j) + " at dz=" + std::to_string(delta_z));
    TrackSolution& ts = out[j];
    ts.all_E0 = roots;
    ts.multi_root = roots.size() > 1;
    double pick = roots.front();
    if (predictions && j < (int)predictions->size() &&
        std::isfinite((*predictions)[j])) {
      double best = 1e300;
      for (double r : roots) {
        const double d = std::fabs(r - (*predictions)[j]);
        if (d < best) {
          best = d;
          pick = r;
        }
      }
    }
    ts.E0 = pick;
    const Cached& c = solve_at(pick);
    ts.E = c.eig.re[j];
    if (std::fabs(ts.E - shift - ts.E0) > scan.residual_tol)
      throw SolverError("self_consistent_spectrum: residual above tolerance");
    ts.dominant_l = dominant_l(c.basis, &c.eig.vr[(size_t)j * c.eig.n], c.eig.n);
    ts.label = c.basis.label;
    ts.right.assign(c.eig.vr.begin() + (size_t)j * c.eig.n,
                    c.eig.vr.begin() + (size_t)(j + 1) * c.eig.n);
    ts.left.assign(c.eig.vl.begin() + (size_t)j * c.eig.n,
                   c.eig.vl.begin() + (size_t)(j + 1) * c.eig.n);
    truncation_warning(c.basis, c.eig, n_states, warnings);
    if (ts.multi_root && warnings)
      warnings->push_back("multi-root fixed point for track " + std::to_string(j) +
                          " at dz=" + std::to_string(delta_z));
  }
  return out;
}

BasisFactory make_pseudo_factory(const freespace::SquareWell& well,
                                 const trapbasis::BasisParams& params) {
  return [well, params](double E0) {
    trapbasis::BasisParams p = params;
    p.E0 = E0;
    auto beta = [well](int l, double E) {
      return freespace::beta_continued(well, l, E);
    };
    return sample_basis(trapbasis::build_basis(p, beta));
  };
}

double SpectrumCurve::track_energy(int i, int t) const {
  for (size_t j = 0; j < track_of[i].size(); ++j)
    if (track_of[i][j] == t) return E[i][j];
  return kNaN;
}

namespace {

// Dual-pairing overlap between eigenvectors from neighboring grid points,
// evaluated through the shared basis labels (<P_m|F_n> ~ delta_mn for the
// nearby parameterizations the continuation compares).
double coef_overlap(const TrackSolution& prev, const TrackSolution& cur) {
  std::map<int, double> left;
  for (size_t i = 0; i < prev.label.size(); ++i) left[prev.label[i]] = prev.left[i];
  double acc = 0.0;
  for (size_t i = 0; i < cur.label.size(); ++i) {
    auto it = left.find(cur.label[i]);
    if (it != left.end()) acc += it->second * cur.right[i];
  }
  return std::fabs(acc);
}

}  // namespace

SpectrumCurve sweep_separation(const SweepConfig& config) {
  // Build the grid: base step, refined inside declared windows.
  std::vector<double> dz;
  for (double z = config.dz_min; z <= config.dz_max + 1e-12;) {
    dz.push_back(z);
    double step = config.dz_step;
    for (const auto& w : config.refine_windows)
      if (z + 1e-12 >= w.first - config.dz_step && z <= w.second)
        step = config.refine_step;
    z += step;
  }
  const int npts = (int)dz.size();
  const int n_states = config.n_states;

  SpectrumCurve curve;
  curve.dz = dz;
  curve.n_tracks = n_states;
  curve.E.resize(npts);
  curve.E0.resize(npts);
  curve.l_char.resize(npts);
  curve.overlap.resize(npts);
  curve.track_of.resize(npts);
  curve.multi_root.resize(npts);

  std::vector<std::vector<TrackSolution>> sols(npts);
  std::vector<std::vector<std::string>> warn(npts);

  if (config.solver == SweepConfig::Solver::exact) {
    const exactref::ExactBasis basis = exactref::exact_basis(
        config.well, config.basis.l_max, config.basis.interacting_l_max,
        config.basis.E_floor, config.basis.E_cut);
    const SampledBasis sb = sample_basis(basis);
    const int nthreads = thread_count(config.threads, npts);
    parallel_for(npts, nthreads, [&](int i) {
      SeparationHamiltonian h = build_h_matrix(sb, dz[i]);
      linalg::EigResult eig = diagonalize(h, true, &warn[i]);
      sols[i].resize(n_states);
      for (int j = 0; j < n_states && j < eig.n; ++j) {
        TrackSolution& ts = sols[i][j];
        ts.E = eig.re[j];
        ts.E0 = eig.re[j] - 0.5 * dz[i] * dz[i];
        ts.label = sb.label;
        ts.dominant_l = dominant_l(sb, &eig.vr[(size_t)j * eig.n], eig.n);
        ts.right.assign(eig.vr.begin() + (size_t)j * eig.n,
                        eig.vr.begin() + (size_t)(j + 1) * eig.n);
        ts.left.assign(eig.vl.begin() + (size_t)j * eig.n,
                       eig.vl.begin() + (size_t)(j + 1) * eig.n);
      }
    });
  } else {
    const BasisFactory factory = make_pseudo_factory(config.well, config.basis);
    const int nthreads = thread_count(config.threads, npts);
    // Seed predictions serially on a coarse subsample, then solve all points.
    parallel_for(npts, nthreads, [&](int i) {
      sols[i] = self_consistent_spectrum(factory, dz[i], n_states, config.scan,
                                         nullptr, &warn[i]);
    });
  }

  // Adiabatic labeling by dual-pairing continuation.
  for (int i = 0; i < npts; ++i) {
    const int nst = (int)sols[i].size();
    curve.E[i].resize(nst);
    curve.E0[i].resize(nst);
    curve.l_char[i].resize(nst);
    curve.overlap[i].assign(nst, 1.0);
    curve.track_of[i].resize(nst);
    curve.multi_root[i].resize(nst);
    for (int j = 0; j < nst; ++j) {
      curve.E[i][j] = sols[i][j].E;
      curve.E0[i][j] = sols[i][j].E0;
      curve.l_char[i][j] = sols[i][j].dominant_l;
      curve.multi_root[i][j] = sols[i][j].multi_root;
      curve.track_of[i][j] = j;
    }
    if (i == 0) continue;
    // greedy best-overlap matching against the previous point
    const int nprev = (int)sols[i - 1].size();
    std::vector<std::vector<double>> ov(nst, std::vector<double>(nprev));
    for (int b = 0; b < nst; ++b)
      for (int a = 0; a < nprev; ++a)
        ov[b][a] = coef_overlap(sols[i - 1][a], sols[i][b]);
    std::vector<bool> taken(nprev, false);
    std::vector<std::pair<double, std::pair<int, int>>> cand;
    for (int b = 0; b < nst; ++b)
      for (int a = 0; a < nprev; ++a) cand.push_back({ov[b][a], {b, a}});
    std::sort(cand.rbegin(), cand.rend());
    std::vector<int> match(nst, -1);
    for (const auto& c : cand) {
      const int b = c.second.first, a = c.second.second;
      if (match[b] >= 0 || taken[a]) continue;
      match[b] = a;
      taken[a] = true;
      curve.overlap[i][b] = c.first;
    }
    for (int b = 0; b < nst; ++b) {
      if (match[b] >= 0) {
        curve.track_of[i][b] = curve.track_of[i - 1][match[b]];
        if (curve.overlap[i][b] < 0.6)
          warn[i].push_back("track continuation ambiguous (overlap " +
                            std::to_string(curve.overlap[i][b]) + ") at dz=" +
                            std::to_string(dz[i]));
      } else {
        curve.track_of[i][b] = b;
      }
    }
  }
  for (auto& w : warn)
    for (auto& s : w) curve.warnings.push_back(std::move(s));
  return curve;
}

std::vector<ResonanceReport> find_resonances(const SpectrumCurve& curve,
                                             double gap_threshold,
                                             double crossing_tol) {
  const int npts = (int)curve.dz.size();
  if (npts < 3 || curve.n_tracks < 3)
    throw std::invalid_argument("find_resonances: need >= 3 tracks and points");
  std::vector<ResonanceReport> out;
  for (int t1 = 0; t1 < curve.n_tracks; ++t1) {
    for (int t2 = t1 + 1; t2 < curve.n_tracks; ++t2) {
      // signed separation along adiabatic tracks
      std::vector<double> s(npts, kNaN);
      for (int i = 0; i < npts; ++i) {
        const double a = curve.track_energy(i, t1);
        const double b = curve.track_energy(i, t2);
        if (std::isfinite(a) && std::isfinite(b)) s[i] = a - b;
      }
      for (int i = 0; i + 1 < npts; ++i) {
        if (!std::isfinite(s[i]) || !std::isfinite(s[i + 1])) continue;
        if (s[i] == 0.0 || s[i] * s[i + 1] < 0.0) {
          const double z0 =
              (s[i] == 0.0)
                  ? curve.dz[i]
                  : curve.dz[i] + (curve.dz[i + 1] - curve.dz[i]) *
                                      (-s[i] / (s[i + 1] - s[i]));
          out.push_back({ResonanceReport::Kind::crossing, z0, 0.0, t1, t2});
        }
      }
      // avoided crossings: interior minima of |s| under the threshold
      for (int i = 1; i + 1 < npts; ++i) {
        if (!std::isfinite(s[i - 1]) || !std::isfinite(s[i]) ||
            !std::isfinite(s[i + 1]))
          continue;
        const double g0 = std::fabs(s[i - 1]), g1 = std::fabs(s[i]),
                     g2 = std::fabs(s[i + 1]);
        if (g1 <= g0 && g1 <= g2 && g1 < gap_threshold && g1 > crossing_tol) {
          // hyperbolic model: gap^2 quadratic in dz
          const double x0 = curve.dz[i - 1], x1 = curve.dz[i], x2 = curve.dz[i + 1];
          const double y0 = g0 * g0, y1 = g1 * g1, y2 = g2 * g2;
          const double d0 = (y1 - y0) / (x1 - x0), d1 = (y2 - y1) / (x2 - x1);
          const double a = (d1 - d0) / (x2 - x0);
          double zmin = x1, gmin = g1;
          if (a > 0.0) {
            const double b = d1 - a * (x1 + x2);
            zmin = -b / (2.0 * a);
            const double c = y1 - a * x1 * x1 - b * x1;
            const double val = c - b * b / (4.0 * a);
            gmin = val > 0.0 ? std::sqrt(val) : 0.0;
            if (zmin < x0 || zmin > x2) {
              zmin = x1;
              gmin = g1;
            }
          }
          out.push_back({ResonanceReport::Kind::avoided, zmin, gmin, t1, t2});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ResonanceReport& a, const ResonanceReport& b) {
              return a.delta_z < b.delta_z;
            });
  return out;
}

}  // namespace dshell::trapres
