#include "hbm/domain.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace hbm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

long double factorial(int n) {
  long double f = 1.0L;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

long double falling(int a, int m) {
  long double f = 1.0L;
  for (int r = 0; r < m; ++r) f *= (a - r);
  return f;
}

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 1; k < n; ++k) {
        double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

double SphereDomain::sphere_area() const { return dim == 2 ? 2.0 * kPi : 4.0 * kPi; }

void SphereDomain::build_circle(int L) {
  node_count = 2 * L + 2;
  basis_count = 2 * L + 1;
  nodes.resize(node_count, 2);
  weights = Eigen::VectorXd::Constant(node_count, 2.0 * kPi / node_count);
  frame[0].resize(node_count, 2);
  for (int q = 0; q < node_count; ++q) {
    double t = 2.0 * kPi * q / node_count;
    nodes(q, 0) = std::cos(t);
    nodes(q, 1) = std::sin(t);
    frame[0](q, 0) = -std::sin(t);
    frame[0](q, 1) = std::cos(t);
  }
  degree.assign(basis_count, 0);
  for (int k = 1; k <= L; ++k) degree[2 * k - 1] = degree[2 * k] = k;

  bval.resize(node_count, basis_count);
  bgrad[0].resize(node_count, basis_count);
  bhess[0].resize(node_count, basis_count);
  double c0 = 1.0 / std::sqrt(2.0 * kPi);
  double ck = 1.0 / std::sqrt(kPi);
  for (int q = 0; q < node_count; ++q) {
    double t = 2.0 * kPi * q / node_count;
    bval(q, 0) = c0;
    bgrad[0](q, 0) = 0.0;
    bhess[0](q, 0) = c0;  // D2 of a constant c is c itself
    for (int k = 1; k <= L; ++k) {
      double ckt = std::cos(k * t), skt = std::sin(k * t);
      bval(q, 2 * k - 1) = ck * ckt;
      bval(q, 2 * k) = ck * skt;
      bgrad[0](q, 2 * k - 1) = -ck * k * skt;
      bgrad[0](q, 2 * k) = ck * k * ckt;
      // D2 f = f'' + f on the circle
      bhess[0](q, 2 * k - 1) = ck * (1.0 - k * k) * ckt;
      bhess[0](q, 2 * k) = ck * (1.0 - k * k) * skt;
    }
  }
}

void SphereDomain::build_sphere(int L) {
  int nt = L + 2, nphi = 2 * L + 2;
  node_count = nt * nphi;
  basis_count = (L + 1) * (L + 1);
  Eigen::VectorXd glx, glw;
  gauss_legendre(nt, glx, glw);

  nodes.resize(node_count, 3);
  weights.resize(node_count);
  frame[0].resize(node_count, 3);
  frame[1].resize(node_count, 3);
  for (int i = 0; i < nt; ++i) {
    double t = glx[i], s = std::sqrt(1.0 - t * t);
    for (int j = 0; j < nphi; ++j) {
      int q = i * nphi + j;
      double phi = 2.0 * kPi * j / nphi;
      double cp = std::cos(phi), sp = std::sin(phi);
      nodes.row(q) << s * cp, s * sp, t;
      weights[q] = glw[i] * 2.0 * kPi / nphi;
      frame[0].row(q) << t * cp, t * sp, -s;  // increasing polar angle
      frame[1].row(q) << -sp, cp, 0.0;        // increasing azimuth
    }
  }

  // Solid harmonic polynomials. For degree l and order m >= 0,
  //   sum_j a_j (x + i y)^m z^(l - m - 2j) (x^2 + y^2 + z^2)^j,
  // a_j = 2^(-l) (-1)^j C(l,j) C(2l-2j,l) (l-2j)(l-2j-1)...(l-2j-m+1);
  // real part gives the cosine harmonic, imaginary part the sine one.
  degree.resize(basis_count);
  polys_.resize(basis_count);
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      int idx = l * l + (m + l);
      degree[idx] = l;
      int ma = std::abs(m);
      bool sine = m < 0;
      long double norm = std::sqrt((2.0L * l + 1.0L) * factorial(l - ma) /
                                   (4.0L * kPiL * factorial(l + ma)));
      if (ma > 0) norm *= std::sqrt(2.0L);

      std::map<std::array<int, 3>, long double> acc;
      long double twol = std::pow(2.0L, (long double)-l);
      for (int j = 0; 2 * j <= l - ma; ++j) {
        long double aj = twol * (j % 2 ? -1.0L : 1.0L) * binomial(l, j) *
                         binomial(2 * l - 2 * j, l) * falling(l - 2 * j, ma);
        if (aj == 0.0L) continue;
        int ez = l - ma - 2 * j;
        // (x + iy)^ma, real or imaginary part
        for (int i = sine ? 1 : 0; i <= ma; i += 2) {
          long double ci = binomial(ma, i) * (((sine ? i - 1 : i) / 2) % 2 ? -1.0L : 1.0L);
          // (x^2 + y^2 + z^2)^j by the trinomial expansion
          for (int p = 0; p <= j; ++p) {
            for (int r = 0; r <= j - p; ++r) {
              int s = j - p - r;
              long double ct = factorial(j) / (factorial(p) * factorial(r) * factorial(s));
              std::array<int, 3> e = {ma - i + 2 * p, i + 2 * r, ez + 2 * s};
              acc[e] += norm * aj * ci * ct;
            }
          }
        }
      }
      auto& poly = polys_[idx];
      for (const auto& [e, c] : acc)
        if (c != 0.0L) poly.push_back({e, (double)c});
    }
  }
  tabulate_jets();
}

// Jets of each basis function through its degree-1-homogeneous extension
// F = |x|^(1-l) P. At a surface node with tangent frame (e_a):
//   value   = P
//   grad_a  = e_a . grad P
//   hess_ab = e_a^T (Hess P) e_b + (1 - l) P delta_ab
// Accumulation runs in long double; high-degree solid harmonics have large
// alternating monomial coefficients and lose several digits to cancellation.
void SphereDomain::tabulate_jets() {
  bval.resize(node_count, basis_count);
  for (auto& g : bgrad) g.resize(node_count, basis_count);
  for (auto& h : bhess) h.resize(node_count, basis_count);

  int L = lmax;
  std::vector<long double> px(L + 1), py(L + 1), pz(L + 1);
  for (int q = 0; q < node_count; ++q) {
    px[0] = py[0] = pz[0] = 1.0L;
    for (int k = 1; k <= L; ++k) {
      px[k] = px[k - 1] * (long double)nodes(q, 0);
      py[k] = py[k - 1] * (long double)nodes(q, 1);
      pz[k] = pz[k - 1] * (long double)nodes(q, 2);
    }
    for (int i = 0; i < basis_count; ++i) {
      long double P = 0, G[3] = {0, 0, 0}, H[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      for (const auto& t : polys_[i]) {
        const auto& e = t.e;
        long double c = t.c;
        long double mono = px[e[0]] * py[e[1]] * pz[e[2]];
        P += c * mono;
        const std::array<long double, 3> pw = {px[e[0] > 0 ? e[0] - 1 : 0],
                                               py[e[1] > 0 ? e[1] - 1 : 0],
                                               pz[e[2] > 0 ? e[2] - 1 : 0]};
        std::array<long double, 3> d1;
        for (int a = 0; a < 3; ++a) {
          d1[a] = e[a] > 0 ? c * e[a] * pw[a] *
                                 (a == 0 ? py[e[1]] * pz[e[2]]
                                  : a == 1 ? px[e[0]] * pz[e[2]]
                                           : px[e[0]] * py[e[1]])
                           : 0.0L;
          G[a] += d1[a];
        }
        if (e[0] > 1) H[0][0] += c * e[0] * (e[0] - 1) * px[e[0] - 2] * py[e[1]] * pz[e[2]];
        if (e[1] > 1) H[1][1] += c * e[1] * (e[1] - 1) * px[e[0]] * py[e[1] - 2] * pz[e[2]];
        if (e[2] > 1) H[2][2] += c * e[2] * (e[2] - 1) * px[e[0]] * py[e[1]] * pz[e[2] - 2];
        if (e[0] > 0 && e[1] > 0)
          H[0][1] += c * e[0] * e[1] * px[e[0] - 1] * py[e[1] - 1] * pz[e[2]];
        if (e[0] > 0 && e[2] > 0)
          H[0][2] += c * e[0] * e[2] * px[e[0] - 1] * py[e[1]] * pz[e[2] - 1];
        if (e[1] > 0 && e[2] > 0)
          H[1][2] += c * e[1] * e[2] * px[e[0]] * py[e[1] - 1] * pz[e[2] - 1];
      }
      H[1][0] = H[0][1];
      H[2][0] = H[0][2];
      H[2][1] = H[1][2];

      bval(q, i) = (double)P;
      long double corr = (1.0L - degree[i]) * P;
      for (int a = 0; a < 2; ++a) {
        long double ga = 0;
        for (int c1 = 0; c1 < 3; ++c1) ga += (long double)frame[a](q, c1) * G[c1];
        bgrad[a](q, i) = (double)ga;
      }
      int slot = 0;
      for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) {
          long double hab = 0;
          for (int c1 = 0; c1 < 3; ++c1)
            for (int c2 = 0; c2 < 3; ++c2)
              hab += (long double)frame[a](q, c1) * H[c1][c2] * (long double)frame[b](q, c2);
          if (a == b) hab += corr;
          bhess[slot++](q, i) = (double)hab;
        }
      }
    }
  }
}

Eigen::VectorXd SphereDomain::synth(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != basis_count)
    throw DimensionError("coefficient vector has size " + std::to_string(coeffs.size()) +
                         ", basis has " + std::to_string(basis_count));
  return bval * coeffs;
}

Eigen::VectorXd SphereDomain::analyze(const Eigen::VectorXd& values) const {
  if (values.size() != node_count)
    throw DimensionError("nodal vector has size " + std::to_string(values.size()) +
                         ", grid has " + std::to_string(node_count));
  return bval.transpose() * weights.cwiseProduct(values);
}

double SphereDomain::integrate(const Eigen::VectorXd& values) const {
  if (values.size() != node_count)
    throw DimensionError("nodal vector has size " + std::to_string(values.size()) +
                         ", grid has " + std::to_string(node_count));
  return weights.dot(values);
}

Eigen::VectorXd SphereDomain::evaluate_basis(const Eigen::VectorXd& x) const {
  if (x.size() != dim) throw DimensionError("direction has wrong dimension");
  Eigen::VectorXd u = x.normalized();
  Eigen::VectorXd out(basis_count);
  if (dim == 2) {
    double t = std::atan2(u[1], u[0]);
    out[0] = 1.0 / std::sqrt(2.0 * kPi);
    for (int k = 1; k <= lmax; ++k) {
      out[2 * k - 1] = std::cos(k * t) / std::sqrt(kPi);
      out[2 * k] = std::sin(k * t) / std::sqrt(kPi);
    }
    return out;
  }
  std::vector<long double> px(lmax + 1), py(lmax + 1), pz(lmax + 1);
  px[0] = py[0] = pz[0] = 1.0L;
  for (int k = 1; k <= lmax; ++k) {
    px[k] = px[k - 1] * (long double)u[0];
    py[k] = py[k - 1] * (long double)u[1];
    pz[k] = pz[k - 1] * (long double)u[2];
  }
  for (int i = 0; i < basis_count; ++i) {
    long double P = 0;
    for (const auto& t : polys_[i]) P += (long double)t.c * px[t.e[0]] * py[t.e[1]] * pz[t.e[2]];
    out[i] = (double)P;
  }
  return out;
}

double SphereDomain::evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
  if (coeffs.size() != basis_count) throw DimensionError("coefficient vector has wrong size");
  return evaluate_basis(x).dot(coeffs);
}

int SphereDomain::index_of(int l, int m) const {
  if (dim == 3) {
    if (l < 0 || l > lmax || m < -l || m > l) throw DimensionError("harmonic index out of range");
    return l * l + (m + l);
  }
  if (l < 0 || l > lmax || (l == 0 && m != 0) || (m != 0 && m != 1))
    throw DimensionError("harmonic index out of range");
  if (l == 0) return 0;
  return m == 0 ? 2 * l - 1 : 2 * l;
}

DomainPtr make_domain(int dim, int lmax) {
  if (dim != 2 && dim != 3)
    throw DimensionError("ambient dimension must be 2 or 3, got " + std::to_string(dim));
  if (lmax < 2) throw DimensionError("cutoff degree must be at least 2, got " + std::to_string(lmax));

  static std::mutex mu;
  static std::map<std::pair<int, int>, DomainPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, lmax);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto dom = std::shared_ptr<SphereDomain>(new SphereDomain());
  dom->dim = dim;
  dom->lmax = lmax;
  if (dim == 2)
    dom->build_circle(lmax);
  else
    dom->build_sphere(lmax);
  cache[key] = dom;
  return dom;
}

ScalarField field_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs) {
  Eigen::VectorXd v = domain->synth(coeffs);
  return {std::move(domain), coeffs, std::move(v)};
}

ScalarField field_from_values(DomainPtr domain, const Eigen::VectorXd& values) {
  Eigen::VectorXd c = domain->analyze(values);
  Eigen::VectorXd v = domain->synth(c);
  return {std::move(domain), std::move(c), std::move(v)};
}

namespace {

TangentData empty_jet(const DomainPtr& domain) {
  TangentData out;
  out.domain = domain;
  int q = domain->node_count;
  out.value.setZero(q);
  for (int a = 0; a < domain->grad_size(); ++a) out.grad[a].setZero(q);
  for (int h = 0; h < domain->hess_size(); ++h) out.hess[h].setZero(q);
  return out;
}

// (a, b) tangent-frame pair for packed Hessian slot h
constexpr int kSlotA[3] = {0, 0, 1};
constexpr int kSlotB[3] = {0, 1, 1};

}  // namespace

TangentData differentiate(const ScalarField& f) {
  const auto& dom = f.domain;
  TangentData out;
  out.domain = dom;
  out.value = dom->bval * f.coeffs;
  for (int a = 0; a < dom->grad_size(); ++a) out.grad[a] = dom->bgrad[a] * f.coeffs;
  for (int h = 0; h < dom->hess_size(); ++h) out.hess[h] = dom->bhess[h] * f.coeffs;
  return out;
}

TangentData jet_constant(DomainPtr domain, double c) {
  TangentData out = empty_jet(domain);
  out.value.setConstant(c);
  for (int h = 0; h < domain->hess_size(); ++h)
    if (kSlotA[h] == kSlotB[h]) out.hess[h].setConstant(c);
  return out;
}

TangentData jet_linear(DomainPtr domain, const Eigen::VectorXd& v) {
  if (v.size() != domain->dim) throw DimensionError("direction has wrong dimension");
  TangentData out = empty_jet(domain);
  out.value = domain->nodes * v;
  for (int a = 0; a < domain->grad_size(); ++a) out.grad[a] = domain->frame[a] * v;
  return out;
}

TangentData jet_scale_add(double a, const TangentData& f, double b, const TangentData& g) {
  if (f.domain != g.domain) throw DimensionError("jets live on different domains");
  TangentData out;
  out.domain = f.domain;
  out.value = a * f.value + b * g.value;
  for (int i = 0; i < f.domain->grad_size(); ++i) out.grad[i] = a * f.grad[i] + b * g.grad[i];
  for (int h = 0; h < f.domain->hess_size(); ++h) out.hess[h] = a * f.hess[h] + b * g.hess[h];
  return out;
}

TangentData jet_product(const TangentData& f, const TangentData& g) {
  if (f.domain != g.domain) throw DimensionError("jets live on different domains");
  const auto& dom = f.domain;
  TangentData out;
  out.domain = dom;
  out.value = f.value.cwiseProduct(g.value);
  for (int a = 0; a < dom->grad_size(); ++a)
    out.grad[a] = f.value.cwiseProduct(g.grad[a]) + g.value.cwiseProduct(f.grad[a]);
  for (int h = 0; h < dom->hess_size(); ++h) {
    int a = kSlotA[h], b = kSlotB[h];
    out.hess[h] = f.value.cwiseProduct(g.hess[h]) + g.value.cwiseProduct(f.hess[h]) +
                  f.grad[a].cwiseProduct(g.grad[b]) + f.grad[b].cwiseProduct(g.grad[a]);
    if (a == b) out.hess[h] -= out.value;
  }
  return out;
}

TangentData jet_ratio(const TangentData& u, const TangentData& h) {
  if (u.domain != h.domain) throw DimensionError("jets live on different domains");
  const auto& dom = u.domain;
  Eigen::VectorXd ih = h.value.cwiseInverse();
  Eigen::VectorXd ih2 = ih.cwiseAbs2();
  TangentData out;
  out.domain = dom;
  out.value = u.value.cwiseProduct(ih);
  for (int a = 0; a < dom->grad_size(); ++a)
    out.grad[a] = (u.grad[a] - out.value.cwiseProduct(h.grad[a])).cwiseProduct(ih);
  for (int s = 0; s < dom->hess_size(); ++s) {
    int a = kSlotA[s], b = kSlotB[s];
    out.hess[s] = u.hess[s].cwiseProduct(ih) -
                  (u.grad[a].cwiseProduct(h.grad[b]) + u.grad[b].cwiseProduct(h.grad[a]))
                      .cwiseProduct(ih2) -
                  u.value.cwiseProduct(h.hess[s]).cwiseProduct(ih2) +
                  2.0 * u.value.cwiseProduct(h.grad[a]).cwiseProduct(h.grad[b])
                            .cwiseProduct(ih2.cwiseProduct(ih));
    if (a == b) out.hess[s] += out.value;
  }
  return out;
}

Eigen::MatrixXd ambient_gradient(const TangentData& f) {
  const auto& dom = f.domain;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dom->node_count, dom->dim);
  for (int a = 0; a < dom->grad_size(); ++a)
    out += f.grad[a].asDiagonal() * dom->frame[a];
  return out;
}

}  // namespace hbm
