#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "hbm/domain.hpp"

using hbm::DomainPtr;
using hbm::ScalarField;
using hbm::TangentData;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Random coefficient vector with harmonic-degree decay, so derivatives of
// the synthesized field stay O(1) and finite differences are well scaled.
VectorXd random_coeffs(const DomainPtr& dom, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd c(dom->basis_count);
  for (int i = 0; i < dom->basis_count; ++i) {
    double l = dom->degree[i];
    c[i] = gauss(rng) / (1.0 + l * l);
  }
  return c;
}

// First and second derivatives of f along the great circle through x with
// initial velocity e, by Richardson-extrapolated central differences.
// For a unit-speed geodesic these equal grad f . e and D2 f(e,e) - f.
std::array<double, 2> geodesic_fd(const std::function<double(const VectorXd&)>& f,
                                  const VectorXd& x, const VectorXd& e, double eps) {
  auto gamma = [&](double t) { return (std::cos(t) * x + std::sin(t) * e).eval(); };
  auto d1 = [&](double h) { return (f(gamma(h)) - f(gamma(-h))) / (2.0 * h); };
  auto d2 = [&](double h) {
    return (f(gamma(h)) - 2.0 * f(x) + f(gamma(-h))) / (h * h);
  };
  double g1 = (4.0 * d1(eps / 2) - d1(eps)) / 3.0;
  double g2 = (4.0 * d2(eps / 2) - d2(eps)) / 3.0;
  return {g1, g2};
}

double frame_quadratic(const TangentData& jet, int q, double a, double b) {
  if (jet.domain->dim == 2) return jet.hess[0][q] * a * a;
  return jet.hess[0][q] * a * a + 2.0 * jet.hess[1][q] * a * b + jet.hess[2][q] * b * b;
}

}  // namespace

TEST_CASE("quadrature integrates the round measure exactly") {
  auto d2 = hbm::make_domain(2, 16);
  auto d3 = hbm::make_domain(3, 16);
  CHECK(d2->weights.sum() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(d3->weights.sum() == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(d2->sphere_area() == doctest::Approx(2.0 * kPi));
  CHECK(d3->sphere_area() == doctest::Approx(4.0 * kPi));
}

TEST_CASE("harmonic basis is orthonormal under the quadrature") {
  for (auto [dim, lmax] : {std::pair{2, 32}, std::pair{3, 18}}) {
    auto dom = hbm::make_domain(dim, lmax);
    MatrixXd gram = dom->bval.transpose() * dom->weights.asDiagonal() * dom->bval;
    gram.diagonal().array() -= 1.0;
    CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("analysis inverts synthesis on bandlimited data") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 10);
    VectorXd c = random_coeffs(dom, 7u + dim);
    VectorXd c2 = dom->analyze(dom->synth(c));
    CHECK((c2 - c).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("node evaluation matches arbitrary-point evaluation") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 9);
    VectorXd c = random_coeffs(dom, 21u + dim);
    VectorXd vals = dom->synth(c);
    for (int q = 0; q < dom->node_count; q += 5) {
      CHECK(dom->evaluate(c, dom->nodes.row(q)) == doctest::Approx(vals[q]).epsilon(1e-11));
    }
  }
}

TEST_CASE("index bookkeeping matches harmonic degrees") {
  auto d3 = hbm::make_domain(3, 6);
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) CHECK(d3->degree[d3->index_of(l, m)] == l);
  auto d2 = hbm::make_domain(2, 6);
  CHECK(d2->index_of(0, 0) == 0);
  for (int k = 1; k <= 6; ++k) {
    CHECK(d2->degree[d2->index_of(k, 0)] == k);
    CHECK(d2->degree[d2->index_of(k, 1)] == k);
  }
}

// tr D2 phi over the tangent frame is (Laplace-Beltrami + (n-1)) phi, and a
// degree-l harmonic is an eigenfunction with eigenvalue -l(l+n-2) + (n-1).
TEST_CASE("tabulated jets satisfy the degree eigenrelation") {
  for (auto [dim, lmax] : {std::pair{2, 20}, std::pair{3, 14}}) {
    auto dom = hbm::make_domain(dim, lmax);
    for (int i = 0; i < dom->basis_count; ++i) {
      double l = dom->degree[i];
      double expected = -l * (l + dim - 2.0) + (dim - 1.0);
      VectorXd trace = dom->bhess[0].col(i);
      if (dim == 3) trace += dom->bhess[2].col(i);
      double err = (trace - expected * dom->bval.col(i)).cwiseAbs().maxCoeff();
      CHECK(err < 1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("tabulated jets match geodesic finite differences") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 8);
    VectorXd c = random_coeffs(dom, 40u + dim);
    ScalarField f = hbm::field_from_coeffs(dom, c);
    TangentData jet = hbm::differentiate(f);
    auto eval = [&](const VectorXd& x) { return dom->evaluate(c, x); };
    for (int q = 3; q < dom->node_count; q += dom->node_count / 7) {
      VectorXd x = dom->nodes.row(q);
      for (int a = 0; a < dom->grad_size(); ++a) {
        VectorXd e = dom->frame[a].row(q);
        auto [g1, g2] = geodesic_fd(eval, x, e, 1e-3);
        CHECK(jet.grad[a][q] == doctest::Approx(g1).epsilon(1e-6));
        double haa = (a == 0) ? jet.hess[0][q] : jet.hess[2][q];
        CHECK(haa - jet.value[q] == doctest::Approx(g2).epsilon(2e-5));
      }
      if (dim == 3) {
        VectorXd e = (dom->frame[0].row(q) + dom->frame[1].row(q)).normalized();
        auto [g1, g2] = geodesic_fd(eval, x, e, 1e-3);
        double quad = frame_quadratic(jet, q, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
        CHECK(quad - jet.value[q] == doctest::Approx(g2).epsilon(2e-5));
        CHECK((jet.grad[0][q] + jet.grad[1][q]) / std::sqrt(2.0) ==
              doctest::Approx(g1).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("closed-form jets: constants, linear forms, low harmonics") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 8);

    TangentData one = hbm::jet_constant(dom, 1.0);
    CHECK((one.value.array() - 1.0).abs().maxCoeff() == 0.0);
    CHECK(one.grad[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK((one.hess[0].array() - 1.0).abs().maxCoeff() == 0.0);
    if (dim == 3) {
      CHECK(one.hess[1].cwiseAbs().maxCoeff() == 0.0);
      CHECK((one.hess[2].array() - 1.0).abs().maxCoeff() == 0.0);
    }

    VectorXd v = VectorXd::Zero(dim);
    v[0] = 0.3;
    v[dim - 1] = -1.1;
    TangentData lin = hbm::jet_linear(dom, v);
    for (int q = 0; q < dom->node_count; ++q) {
      CHECK(lin.value[q] == doctest::Approx(dom->nodes.row(q).dot(v)).epsilon(1e-14));
      for (int a = 0; a < dom->grad_size(); ++a)
        CHECK(lin.grad[a][q] == doctest::Approx(dom->frame[a].row(q).dot(v)).epsilon(1e-14));
    }
    for (int h = 0; h < dom->hess_size(); ++h)
      CHECK(lin.hess[h].cwiseAbs().maxCoeff() < 1e-13);

    // The same linear form synthesized through the basis must carry the
    // same jet; this ties the degree-1 tables to the frame geometry.
    ScalarField lf = hbm::field_from_values(dom, lin.value);
    TangentData lj = hbm::differentiate(lf);
    CHECK((lj.value - lin.value).cwiseAbs().maxCoeff() < 1e-12);
    for (int a = 0; a < dom->grad_size(); ++a)
      CHECK((lj.grad[a] - lin.grad[a]).cwiseAbs().maxCoeff() < 1e-12);
    for (int h = 0; h < dom->hess_size(); ++h)
      CHECK(lj.hess[h].cwiseAbs().maxCoeff() < 1e-11);
  }

  // Planar check against trig calculus: for f = cos(2t), f'' + f = -3 cos(2t).
  auto d2 = hbm::make_domain(2, 8);
  VectorXd c = VectorXd::Zero(d2->basis_count);
  c[d2->index_of(2, 0)] = std::sqrt(kPi);
  TangentData jet = hbm::differentiate(hbm::field_from_coeffs(d2, c));
  for (int q = 0; q < d2->node_count; ++q) {
    double t = std::atan2(d2->nodes(q, 1), d2->nodes(q, 0));
    CHECK(jet.value[q] == doctest::Approx(std::cos(2 * t)).epsilon(1e-12));
    CHECK(jet.hess[0][q] == doctest::Approx(-3.0 * std::cos(2 * t)).epsilon(1e-11));
  }
}

TEST_CASE("frames are orthonormal and tangent") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 12);
    for (int q = 0; q < dom->node_count; ++q) {
      VectorXd x = dom->nodes.row(q);
      CHECK(std::abs(x.norm() - 1.0) < 1e-14);
      for (int a = 0; a < dom->grad_size(); ++a) {
        VectorXd e = dom->frame[a].row(q);
        CHECK(std::abs(e.norm() - 1.0) < 1e-13);
        CHECK(std::abs(e.dot(x)) < 1e-13);
      }
      if (dim == 3)
        CHECK(std::abs(dom->frame[0].row(q).dot(dom->frame[1].row(q))) < 1e-13);
    }
  }
}

TEST_CASE("second moments of coordinates integrate to known values") {
  auto d3 = hbm::make_domain(3, 10);
  VectorXd x1sq = d3->nodes.col(0).cwiseAbs2();
  CHECK(d3->integrate(x1sq) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
  auto d2 = hbm::make_domain(2, 10);
  VectorXd c1sq = d2->nodes.col(0).cwiseAbs2();
  CHECK(d2->integrate(c1sq) == doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("jet algebra reproduces products of linear forms") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 6);
    VectorXd v = VectorXd::LinSpaced(dim, 0.4, 1.2);
    VectorXd w = VectorXd::LinSpaced(dim, -0.8, 0.5);
    TangentData prod = hbm::jet_product(hbm::jet_linear(dom, v), hbm::jet_linear(dom, w));
    // <x,v><x,w> has harmonic degree 2, so its synthesized jet is exact.
    ScalarField pf = hbm::field_from_values(dom, prod.value);
    TangentData ref = hbm::differentiate(pf);
    for (int a = 0; a < dom->grad_size(); ++a)
      CHECK((prod.grad[a] - ref.grad[a]).cwiseAbs().maxCoeff() < 1e-11);
    for (int h = 0; h < dom->hess_size(); ++h)
      CHECK((prod.hess[h] - ref.hess[h]).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("ratio jets satisfy the quotient rule against finite differences") {
  for (int dim : {2, 3}) {
    auto dom = hbm::make_domain(dim, 6);
    VectorXd cu = random_coeffs(dom, 60u + dim);
    VectorXd ch = 0.25 * random_coeffs(dom, 61u + dim);
    ch[0] += 2.0 * std::sqrt(dom->sphere_area());  // keep h near 2, bounded away from 0
    ScalarField u = hbm::field_from_coeffs(dom, cu);
    ScalarField h = hbm::field_from_coeffs(dom, ch);
    TangentData z = hbm::jet_ratio(hbm::differentiate(u), hbm::differentiate(h));
    auto eval = [&](const VectorXd& x) { return dom->evaluate(cu, x) / dom->evaluate(ch, x); };
    for (int q = 1; q < dom->node_count; q += dom->node_count / 5) {
      VectorXd x = dom->nodes.row(q);
      CHECK(z.value[q] == doctest::Approx(eval(x)).epsilon(1e-13));
      for (int a = 0; a < dom->grad_size(); ++a) {
        auto [g1, g2] = geodesic_fd(eval, x, dom->frame[a].row(q), 1e-3);
        CHECK(z.grad[a][q] == doctest::Approx(g1).epsilon(1e-6));
        double haa = (a == 0) ? z.hess[0][q] : z.hess[2][q];
        CHECK(haa - z.value[q] == doctest::Approx(g2).epsilon(2e-5));
      }
    }
  }
}

TEST_CASE("ratio of a field with itself is the unit constant") {
  auto dom = hbm::make_domain(3, 5);
  VectorXd ch = 0.2 * random_coeffs(dom, 99);
  ch[0] += std::sqrt(dom->sphere_area());
  TangentData hj = hbm::differentiate(hbm::field_from_coeffs(dom, ch));
  TangentData z = hbm::jet_ratio(hj, hj);
  CHECK((z.value.array() - 1.0).abs().maxCoeff() < 1e-13);
  CHECK(z.grad[0].cwiseAbs().maxCoeff() < 1e-12);
  CHECK(z.grad[1].cwiseAbs().maxCoeff() < 1e-12);
  CHECK((z.hess[0].array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(z.hess[1].cwiseAbs().maxCoeff() < 1e-12);
  CHECK((z.hess[2].array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("scale-add acts linearly on jets") {
  auto dom = hbm::make_domain(2, 6);
  TangentData f = hbm::differentiate(hbm::field_from_coeffs(dom, random_coeffs(dom, 5)));
  TangentData g = hbm::differentiate(hbm::field_from_coeffs(dom, random_coeffs(dom, 6)));
  TangentData s = hbm::jet_scale_add(2.0, f, -0.5, g);
  CHECK((s.value - (2.0 * f.value - 0.5 * g.value)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s.grad[0] - (2.0 * f.grad[0] - 0.5 * g.grad[0])).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s.hess[0] - (2.0 * f.hess[0] - 0.5 * g.hess[0])).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("domain cache returns shared instances") {
  auto a = hbm::make_domain(3, 7);
  auto b = hbm::make_domain(3, 7);
  CHECK(a.get() == b.get());
  CHECK(a.get() != hbm::make_domain(3, 8).get());
}

TEST_CASE("invalid domain parameters are rejected") {
  CHECK_THROWS_AS((void)hbm::make_domain(4, 8), hbm::DimensionError);
  CHECK_THROWS_AS((void)hbm::make_domain(1, 8), hbm::DimensionError);
  CHECK_THROWS_AS((void)hbm::make_domain(2, 1), hbm::DimensionError);
}
