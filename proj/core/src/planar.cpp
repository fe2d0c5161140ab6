#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hbm/solver.hpp"

namespace hbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Vec2 = Eigen::Vector2d;

// Right-hand side of the first-order system for h'' = h^(p-1) - h. Returns
// false when the state leaves the domain of the field (h <= 0 or overflow),
// so the caller can reject the step and retry shorter instead of propagating
// NaN through the error estimator.
bool arc_rhs(double p, const Vec2& y, Vec2& dy) {
  if (!(y[0] > 0) || !y.allFinite()) return false;
  double acc = std::pow(y[0], p - 1.0) - y[0];
  if (!std::isfinite(acc)) return false;
  dy << y[1], acc;
  return true;
}

// One Dormand-Prince 5(4) step. Fills the fifth-order update and the error
// measured against the mixed tolerance profile (accept when err <= 1).
bool dopri_step(double p, const Vec2& y, double dt, double atol, double rtol, Vec2& out,
                double& err) {
  Vec2 k[7];
  if (!arc_rhs(p, y, k[0])) return false;
  auto stage = [&](std::initializer_list<double> w, Vec2& ki) {
    Vec2 z = y;
    int i = 0;
    for (double cw : w) z += (dt * cw) * k[i++];
    return arc_rhs(p, z, ki);
  };
  if (!stage({1.0 / 5}, k[1])) return false;
  if (!stage({3.0 / 40, 9.0 / 40}, k[2])) return false;
  if (!stage({44.0 / 45, -56.0 / 15, 32.0 / 9}, k[3])) return false;
  if (!stage({19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729}, k[4])) return false;
  if (!stage({9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656}, k[5]))
    return false;
  if (!stage({35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}, k[6]))
    return false;
  out = y + dt * (35.0 / 384 * k[0] + 500.0 / 1113 * k[2] + 125.0 / 192 * k[3] -
                  2187.0 / 6784 * k[4] + 11.0 / 84 * k[5]);
  if (!out.allFinite()) return false;
  Vec2 e = dt * ((35.0 / 384 - 5179.0 / 57600) * k[0] + (500.0 / 1113 - 7571.0 / 16695) * k[2] +
                 (125.0 / 192 - 393.0 / 640) * k[3] + (-2187.0 / 6784 + 92097.0 / 339200) * k[4] +
                 (11.0 / 84 - 187.0 / 2100) * k[5] - (1.0 / 40) * k[6]);
  err = 0;
  for (int i = 0; i < 2; ++i) {
    double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(out[i]));
    err = std::max(err, std::abs(e[i]) / scale);
  }
  return std::isfinite(err);
}

// Integrates from (a, 0) up to angle T, landing exactly on every angle of
// rec (sorted, inside [0, T]) and storing h there. Returns the final state.
Vec2 integrate_arc(double p, double a, double T, double atol, double rtol,
                   const std::vector<double>* rec = nullptr, std::vector<double>* out = nullptr) {
  Vec2 y;
  y << a, 0.0;
  Vec2 f0;
  if (!arc_rhs(p, y, f0))
    throw InvalidInputError("shooting seed is outside the domain of the planar equation");

  size_t next = 0;
  double t = 0;
  double dt = std::min(T / 20.0, 0.01 * (std::abs(a) + 1.0) / (f0.norm() + 1.0));
  long steps = 0;
  while (t < T) {
    if (rec)
      while (next < rec->size() && (*rec)[next] <= t) {
        out->push_back(y[0]);
        ++next;
      }
    double stop = (rec && next < rec->size()) ? std::min((*rec)[next], T) : T;
    double dt_used = std::min(dt, stop - t);
    bool landed = dt_used >= stop - t;

    Vec2 ynew;
    double err = 0;
    bool ok = dopri_step(p, y, dt_used, atol, rtol, ynew, err);
    if (++steps > 2000000) throw MaxIterError("planar integrator exceeded its step budget");
    if (!ok || err > 1.0) {
      dt = dt_used * (ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25);
      if (!(dt > 1e-18 * std::max(1.0, T)))
        throw SolverError("planar integrator step size underflow");
      continue;
    }
    y = ynew;
    t = landed ? stop : t + dt_used;
    dt = dt_used * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
  }
  if (rec)
    while (next < rec->size() && (*rec)[next] <= T) {
      out->push_back(y[0]);
      ++next;
    }
  return y;
}

double shoot_phi(double p, int k, double a, double atol, double rtol) {
  return integrate_arc(p, a, kPi / k, atol, rtol)[1];
}

// theta grid with exact endpoints, n+1 angles on [0, T]
std::vector<double> uniform_grid(double T, int n) {
  std::vector<double> g(n + 1);
  for (int j = 0; j <= n; ++j) g[j] = T * j / n;
  g[n] = T;
  return g;
}

// DCT-I: coefficients of f = sum c_m cos(pi m j / M) from samples at the
// M+1 uniform grid points.
Eigen::VectorXd dct1(const std::vector<double>& f) {
  const int M = static_cast<int>(f.size()) - 1;
  std::vector<double> tab(2 * M);
  for (int r = 0; r < 2 * M; ++r) tab[r] = std::cos(kPi * r / M);
  Eigen::VectorXd c(M + 1);
  for (int m = 0; m <= M; ++m) {
    double s = 0.5 * (f[0] + (m % 2 ? -1.0 : 1.0) * f[M]);
    for (int j = 1; j < M; ++j) s += f[j] * tab[(static_cast<long>(m) * j) % (2 * M)];
    c[m] = (2.0 / M) * s * ((m == 0 || m == M) ? 0.5 : 1.0);
  }
  return c;
}

// Newton on the collocated defect B c - (C c)^(p-1) with cosine modes
// c_0..c_{n-1} and n uniform nodes. Improves c in place.
void collocation_newton(double p, int k, Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd C(n, n), B(n, n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) {
      double km = static_cast<double>(k) * m;
      C(j, m) = std::cos(kPi * m * j / (n - 1.0));
      B(j, m) = (1.0 - km * km) * C(j, m);
    }

  Eigen::VectorXd best = c;
  double best_gn = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd h = C * c;
    if (h.minCoeff() <= 0) break;
    Eigen::VectorXd Bc = B * c;
    Eigen::VectorXd G = Bc - h.array().pow(p - 1.0).matrix();
    double gn = G.cwiseAbs().maxCoeff();
    if (gn < best_gn) {
      best_gn = gn;
      best = c;
    }
    double scale = std::max(1.0, Bc.cwiseAbs().maxCoeff());
    if (gn < 1e-13 * scale) break;

    Eigen::MatrixXd J =
        B - ((p - 1.0) * h.array().pow(p - 2.0)).matrix().asDiagonal() * C;
    Eigen::VectorXd d = J.partialPivLu().solve(-G);
    if (!d.allFinite()) break;
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
      Eigen::VectorXd trial = c + step * d;
      if ((C * trial).minCoeff() > 0) {
        c = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  c = best;
}

// Max defect of the cosine expansion at off-node angles; the quantity the
// reported residual promises to bound.
double offgrid_defect(double p, int k, const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  const int Q = 8 * (n - 1);
  const double T = kPi / k;
  double worst = 0;
  for (int q = 0; q < Q; ++q) {
    double th = T * (q + 0.5) / Q;
    double h = 0, d2 = 0;
    for (int m = 0; m < n; ++m) {
      double km = static_cast<double>(k) * m;
      double cc = std::cos(km * th);
      h += c[m] * cc;
      d2 += c[m] * (1.0 - km * km) * cc;
    }
    if (!(h > 0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(d2 - std::pow(h, p - 1.0)));
  }
  return worst;
}

// Builds the polished PlanarSolution of the orbit whose outer turning point
// is near h0_guess: integrate one arc, seed cosine modes by DCT, then Newton
// on the collocated equation with resolution escalation.
PlanarSolution polish_orbit(double p, int k, double h0_guess) {
  const double T = kPi / k;
  const int M = 1024;
  std::vector<double> samples;
  samples.reserve(M + 1);
  auto grid = uniform_grid(T, M);
  integrate_arc(p, h0_guess, T, 1e-14, 3e-14, &grid, &samples);
  Eigen::VectorXd full = dct1(samples);

  Eigen::VectorXd best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int nmodes = 65; nmodes <= M + 1; nmodes = std::min(2 * nmodes - 1, M + 1)) {
    Eigen::VectorXd c = full.head(nmodes);
    if (best.size() && best.size() < nmodes) {
      c.head(best.size()) = best;
      c.tail(nmodes - best.size()).setZero();
    }
    collocation_newton(p, k, c);
    double res = offgrid_defect(p, k, c);
    if (res < best_res) {
      best_res = res;
      best = c;
    }
    if (best_res < 1e-11 || nmodes == M + 1) break;
  }

  // drop the exactly-vanished tail so downstream spectral work stays small
  int nz = static_cast<int>(best.size());
  while (nz > 1 && best[nz - 1] == 0.0) --nz;
  best.conservativeResize(nz);

  PlanarSolution sol;
  sol.p = p;
  sol.k = k;
  sol.modes = best;
  sol.h0 = best.sum();
  sol.residual = best_res;
  int rows = std::max(800, 2 * (nz - 1)) + 1;
  sol.profile.resize(rows, 3);
  for (int i = 0; i < rows; ++i) {
    double th = (i == rows - 1) ? T : T * i / (rows - 1);
    double h = 0, hp = 0;
    for (int m = 0; m < nz; ++m) {
      double km = static_cast<double>(k) * m;
      h += best[m] * std::cos(km * th);
      hp -= best[m] * km * std::sin(km * th);
    }
    sol.profile(i, 0) = th;
    sol.profile(i, 1) = h;
    sol.profile(i, 2) = hp;
  }
  return sol;
}

}  // namespace

std::pair<double, double> planar_shoot(double p, int k, double a) {
  if (!(p < 0)) throw InvalidInputError("planar exponent must be negative");
  if (k < 1) throw InvalidInputError("fold symmetry must be at least 1");
  if (!(a > 0)) throw InvalidInputError("shooting seed must be positive");
  Vec2 y = integrate_arc(p, a, kPi / k, 1e-12, 1e-10);
  return {y[0], y[1]};
}

std::vector<PlanarSolution> solve_planar_branch(double p, int k, const SearchWindow& window) {
  if (!(p < 0)) throw InvalidInputError("planar exponent must be negative");
  if (k < 1) throw InvalidInputError("fold symmetry must be at least 1");
  if (!(window.lo > 0) || !(window.hi > window.lo) || window.seeds < 2)
    throw InvalidInputError("malformed search window");

  const double T = kPi / k;

  // Scan the window. Seeds near h0 = 1 are replaced by a tight pair around
  // the circle so its root is bracketed on purpose and discarded by name,
  // never merged into a neighbouring bracket.
  std::vector<double> seeds;
  seeds.reserve(window.seeds + 2);
  for (int i = 0; i < window.seeds; ++i) {
    double a = window.lo + (window.hi - window.lo) * i / (window.seeds - 1.0);
    if (std::abs(a - 1.0) > 1e-3) seeds.push_back(a);
  }
  if (window.lo < 1.0 - 1e-3 && window.hi > 1.0 + 1e-3) {
    seeds.push_back(1.0 - 1e-3);
    seeds.push_back(1.0 + 1e-3);
  }
  std::sort(seeds.begin(), seeds.end());

  std::vector<double> phi(seeds.size());
  for (size_t i = 0; i < seeds.size(); ++i) {
    try {
      phi[i] = shoot_phi(p, k, seeds[i], 1e-12, 1e-10);
    } catch (const SolverError&) {
      phi[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::vector<double> roots;
  for (size_t i = 0; i + 1 < seeds.size(); ++i) {
    if (!std::isfinite(phi[i]) || !std::isfinite(phi[i + 1])) continue;
    if (!(phi[i] * phi[i + 1] < 0)) continue;
    double lo = seeds[i], hi = seeds[i + 1];
    double flo = phi[i];
    for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = shoot_phi(p, k, mid, 1e-12, 1e-10);
      if (flo * fm < 0)
        hi = mid;
      else {
        lo = mid;
        flo = fm;
      }
    }
    // finish at tight tolerance so the root is pinned to rounding
    flo = shoot_phi(p, k, lo, 1e-14, 3e-14);
    for (int it = 0; it < 30 && hi - lo > 4e-16 * std::max(1.0, hi); ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = shoot_phi(p, k, mid, 1e-14, 3e-14);
      if (flo * fm < 0)
        hi = mid;
      else {
        lo = mid;
        flo = fm;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }

  // validate and filter the candidates
  std::vector<double> kept;
  for (double a : roots) {
    if (std::abs(a - 1.0) < 1e-3) continue;                          // the circle
    if (std::abs(shoot_phi(p, k, a, 1e-14, 3e-14)) > 1e-12) continue;  // noise bracket

    const int S = 256;
    std::vector<double> hs;
    hs.reserve(S + 1);
    auto grid = uniform_grid(T, S);
    integrate_arc(p, a, T, 1e-12, 1e-10, &grid, &hs);
    double mn = *std::min_element(hs.begin(), hs.end());
    double mx = *std::max_element(hs.begin(), hs.end());
    if (mx - mn < 1e-4 * (0.5 * (mx + mn))) continue;  // circle up to noise

    // fundamental arcs are monotone: both extrema sit at the endpoints.
    // Roots whose profile turns inside belong to a higher fold.
    double tol = 1e-8 * (mx - mn);
    double end_lo = std::min(hs.front(), hs.back());
    double end_hi = std::max(hs.front(), hs.back());
    bool interior_extremum = false;
    for (int j = 1; j < S; ++j)
      if (hs[j] > end_hi - tol || hs[j] < end_lo + tol) interior_extremum = true;
    if (interior_extremum) continue;
    kept.push_back(a);
  }

  // one orbit owns two turning points; group by the conserved energy and
  // represent each orbit by its outer point
  struct Orbit {
    double energy;
    double outer;
  };
  std::vector<Orbit> orbits;
  for (double a : kept) {
    double e = 0.5 * a * a - std::pow(a, p) / p;
    double mate = integrate_arc(p, a, T, 1e-14, 3e-14)[0];
    double outer = std::max(a, mate);
    bool fresh = true;
    for (const Orbit& o : orbits)
      if (std::abs(o.energy - e) < 1e-6 * std::max(1.0, std::abs(o.energy))) fresh = false;
    if (fresh) orbits.push_back({e, outer});
  }

  std::vector<PlanarSolution> out;
  out.reserve(orbits.size());
  for (const Orbit& o : orbits) out.push_back(polish_orbit(p, k, o.outer));
  std::sort(out.begin(), out.end(),
            [](const PlanarSolution& a, const PlanarSolution& b) { return a.h0 > b.h0; });
  return out;
}

PlanarClassification classify_planar(double p) {
  if (!(p < -2)) throw InvalidInputError("planar classification needs p < -2");
  PlanarClassification out;
  out.p = p;
  double edge = std::sqrt(2.0 - p);
  int ktop = static_cast<int>(std::ceil(edge)) + 1;
  for (int k = 3; k <= ktop; ++k) {
    if (k < edge) out.predicted.push_back(k);
    auto sols = solve_planar_branch(p, k);
    if (!sols.empty()) out.branches.emplace_back(k, static_cast<int>(sols.size()));
  }
  return out;
}

SupportField planar_support_field(const PlanarSolution& sol, int lmax) {
  if (sol.k < 1) throw InvalidInputError("fold symmetry must be at least 1");
  if (sol.modes.size() == 0)
    throw InvalidInputError("planar solution carries no spectral data");
  if (lmax < 0) throw InvalidInputError("resolution must be nonnegative");

  const int k = sol.k;
  const Eigen::VectorXd& c = sol.modes;
  if (lmax == 0) {
    // smallest cutoff whose dropped tail cannot disturb D^2 h beyond 1e-12
    int m_sig = 1;
    double tail = 0;
    for (int m = static_cast<int>(c.size()) - 1; m >= 1; --m) {
      double km = static_cast<double>(k) * m;
      tail += (1.0 + km * km) * std::abs(c[m]);
      if (tail > 1e-12) {
        m_sig = m;
        break;
      }
    }
    lmax = std::min(std::max({2 * k, 8, k * m_sig}), 1200);
  }

  auto dom = make_domain(2, lmax);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(dom->basis_count);
  coeffs[0] = c[0] * std::sqrt(2.0 * kPi);
  for (int m = 1; m < c.size() && k * m <= lmax; ++m)
    coeffs[dom->index_of(k * m, 0)] = c[m] * std::sqrt(kPi);

  // Assembled directly: steep arcs are nearly flat at the outer turning
  // point (D^2 h = h^(p-1) can sit at 1e-8), legitimately below the relative
  // convexity margin of the generic body factory.
  SupportField F;
  F.h = field_from_coeffs(dom, coeffs);
  F.jet = differentiate(F.h);
  F.det_d2h = F.jet.hess[0];
  F.min_h = F.h.values.minCoeff();
  F.min_eig_d2h = F.det_d2h.minCoeff();
  F.max_eig_d2h = F.det_d2h.maxCoeff();
  if (!(F.min_h > 0)) throw NotPositiveError("extended support function is not positive");
  if (!(F.min_eig_d2h > 0)) throw NotConvexError("extended support function is not convex");
  return F;
}

double planar_ode_residual(const TranslatedField& K, double p) {
  if (K.domain()->dim != 2) throw DimensionError("the normalized defect is planar only");
  if (!(K.min_h > 0)) throw NotPositiveError("the equation needs h > 0");
  return (K.jet.hess[0] - K.h.values.array().pow(p - 1.0).matrix()).cwiseAbs().maxCoeff();
}

}  // namespace hbm