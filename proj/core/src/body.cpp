#include "hbm/body.hpp"

#include <cmath>

namespace hbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_ball_volume(int dim) { return dim == 2 ? kPi : 4.0 * kPi / 3.0; }

// Fills the curvature fields shared by both body types.
void finish_field(TranslatedField& K) {
  const auto& dom = K.h.domain;
  K.jet = differentiate(K.h);
  if (dom->dim == 2) {
    K.det_d2h = K.jet.hess[0];
    K.min_eig_d2h = K.det_d2h.minCoeff();
    K.max_eig_d2h = K.det_d2h.maxCoeff();
  } else {
    const Eigen::VectorXd& a = K.jet.hess[0];
    const Eigen::VectorXd& b = K.jet.hess[1];
    const Eigen::VectorXd& c = K.jet.hess[2];
    K.det_d2h = a.cwiseProduct(c) - b.cwiseAbs2();
    Eigen::VectorXd mid = 0.5 * (a + c);
    Eigen::VectorXd rad = (0.25 * (a - c).cwiseAbs2() + b.cwiseAbs2()).cwiseSqrt();
    K.min_eig_d2h = (mid - rad).minCoeff();
    K.max_eig_d2h = (mid + rad).maxCoeff();
  }
  K.min_h = K.h.values.minCoeff();
}

double validity_floor(const TranslatedField& K) {
  double mean = K.h.domain->integrate(K.h.values) / K.h.domain->sphere_area();
  return 1e-8 * std::abs(mean);
}

}  // namespace

TranslatedField translated_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs) {
  TranslatedField K;
  K.h = field_from_coeffs(std::move(domain), coeffs);
  finish_field(K);
  if (K.min_eig_d2h <= validity_floor(K))
    throw NotConvexError("tangential Hessian not positive definite: min eigenvalue " +
                         std::to_string(K.min_eig_d2h));
  return K;
}

SupportField body_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs) {
  SupportField K;
  K.h = field_from_coeffs(std::move(domain), coeffs);
  finish_field(K);
  double floor = validity_floor(K);
  if (K.min_h <= floor)
    throw NotPositiveError("support function not positive: min " + std::to_string(K.min_h));
  if (K.min_eig_d2h <= floor)
    throw NotConvexError("tangential Hessian not positive definite: min eigenvalue " +
                         std::to_string(K.min_eig_d2h));
  return K;
}

Eigen::VectorXd linear_coeffs(const DomainPtr& domain, const Eigen::VectorXd& v) {
  if (v.size() != domain->dim) throw DimensionError("direction has wrong dimension");
  return domain->analyze(domain->nodes * v);
}

SupportField make_ball(const DomainPtr& domain, double radius) {
  if (radius <= 0.0) throw NotPositiveError("ball radius must be positive");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(domain->basis_count);
  c[0] = radius * std::sqrt(domain->sphere_area());
  return body_from_coeffs(domain, c);
}

SupportField make_ellipsoid(const DomainPtr& domain, const Eigen::VectorXd& semiaxes) {
  if (semiaxes.size() != domain->dim) throw DimensionError("semiaxis count must match dimension");
  if (semiaxes.minCoeff() <= 0.0) throw NotPositiveError("semiaxes must be positive");
  Eigen::VectorXd vals(domain->node_count);
  for (int q = 0; q < domain->node_count; ++q)
    vals[q] = semiaxes.cwiseProduct(domain->nodes.row(q).transpose()).norm();
  return body_from_coeffs(domain, domain->analyze(vals));
}

SupportField make_perturbed_ball(const DomainPtr& domain,
                                 const std::vector<std::tuple<int, int, double>>& modes) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(domain->basis_count);
  c[0] = std::sqrt(domain->sphere_area());
  for (const auto& [l, m, amp] : modes) c[domain->index_of(l, m)] += amp;
  return body_from_coeffs(domain, c);
}

SupportField translate_body(const SupportField& K, const Eigen::VectorXd& v) {
  return body_from_coeffs(K.h.domain, K.h.coeffs + linear_coeffs(K.h.domain, v));
}

SupportField scale_body(const SupportField& K, double c) {
  if (c <= 0.0) throw NotPositiveError("scale factor must be positive");
  return body_from_coeffs(K.h.domain, c * K.h.coeffs);
}

SupportField minkowski_sum(const SupportField& K, double a, const SupportField& L, double b) {
  if (K.h.domain != L.h.domain) throw DimensionError("bodies live on different domains");
  if (a < 0.0 || b < 0.0) throw NotPositiveError("Minkowski coefficients must be nonnegative");
  return body_from_coeffs(K.h.domain, a * K.h.coeffs + b * L.h.coeffs);
}

Eigen::MatrixXd gauss_map_inverse(const TranslatedField& K) {
  return K.h.values.asDiagonal() * K.h.domain->nodes + ambient_gradient(K.jet);
}

DensityField measure(const TranslatedField& K, MeasureLabel label, double p) {
  const auto& dom = K.h.domain;
  DensityField m;
  m.domain = dom;
  m.label = label;
  m.exponent = p;
  switch (label) {
    case MeasureLabel::Lebesgue:
      m.values = Eigen::VectorXd::Ones(dom->node_count);
      break;
    case MeasureLabel::ConeVolume:
    case MeasureLabel::MixedCone:
      m.values = K.h.values.cwiseProduct(K.det_d2h) / dom->dim;
      break;
    case MeasureLabel::LpSurface:
      m.values = K.h.values.array().pow(1.0 - p) * K.det_d2h.array();
      break;
    case MeasureLabel::Hilbert:
      m.values = K.det_d2h.cwiseQuotient(K.h.values) / dom->dim;
      break;
  }
  m.total = dom->integrate(m.values);
  return m;
}

DensityField mixed_cone_measure(const std::vector<const TranslatedField*>& tuple) {
  if (tuple.empty()) throw DimensionError("body tuple is empty");
  int dim = tuple.front()->domain()->dim;
  // below ambient dimension 4 the tuple carries a single body
  if ((int)tuple.size() != std::max(dim - 2, 1))
    throw DimensionError("body tuple must have length " + std::to_string(std::max(dim - 2, 1)));
  return measure(*tuple.front(), MeasureLabel::MixedCone);
}

double mixed_volume(const std::vector<const TangentData*>& jets) {
  if (jets.empty()) throw DimensionError("mixed volume requires jets");
  const auto& dom = jets.front()->domain;
  for (const auto* j : jets)
    if (j->domain != dom) throw DimensionError("jets live on different domains");
  if ((int)jets.size() != dom->dim)
    throw DimensionError("mixed volume requires exactly " + std::to_string(dom->dim) + " entries");
  if (dom->dim == 2)
    return dom->integrate(jets[0]->value.cwiseProduct(jets[1]->hess[0])) / 2.0;
  const auto& A = *jets[1];
  const auto& B = *jets[2];
  Eigen::VectorXd q = 0.5 * (A.hess[0].cwiseProduct(B.hess[2]) + A.hess[2].cwiseProduct(B.hess[0]) -
                             2.0 * A.hess[1].cwiseProduct(B.hess[1]));
  return dom->integrate(jets[0]->value.cwiseProduct(q)) / 3.0;
}

double mixed_volume(const std::vector<const TranslatedField*>& bodies) {
  std::vector<const TangentData*> jets;
  jets.reserve(bodies.size());
  for (const auto* b : bodies) jets.push_back(&b->jet);
  return mixed_volume(jets);
}

double mixed_volume(const TranslatedField& a, const TranslatedField& b) {
  return mixed_volume(std::vector<const TranslatedField*>{&a, &b});
}

double mixed_volume(const TranslatedField& a, const TranslatedField& b, const TranslatedField& c) {
  return mixed_volume(std::vector<const TranslatedField*>{&a, &b, &c});
}

double volume(const TranslatedField& K) {
  std::vector<const TranslatedField*> reps(K.domain()->dim, &K);
  return mixed_volume(reps);
}

std::array<Eigen::VectorXd, 3> mixed_discriminant_partial(
    const DomainPtr& domain, const std::vector<const TangentData*>& tuple) {
  std::array<Eigen::VectorXd, 3> q;
  if (domain->dim == 2) {
    if (!tuple.empty()) throw DimensionError("partial discriminant takes no matrices in the plane");
    q[0] = Eigen::VectorXd::Ones(domain->node_count);
    return q;
  }
  if (tuple.size() != 1) throw DimensionError("partial discriminant needs one matrix argument");
  const auto& A = *tuple.front();
  if (A.domain != domain) throw DimensionError("jet lives on a different domain");
  q[0] = 0.5 * A.hess[2];
  q[1] = -0.5 * A.hess[1];
  q[2] = 0.5 * A.hess[0];
  return q;
}

double quermassintegral(const SupportField& K, int m) {
  int n = K.domain()->dim;
  if (m < 0 || m > n) throw DimensionError("quermassintegral order out of range");
  SupportField B = make_ball(K.h.domain);
  std::vector<const TranslatedField*> args;
  for (int i = 0; i < n - m; ++i) args.push_back(&K);
  for (int i = 0; i < m; ++i) args.push_back(&B);
  return mixed_volume(args);
}

Eigen::VectorXd centroid(const TranslatedField& K) {
  const auto& dom = K.h.domain;
  int n = dom->dim;
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  Eigen::MatrixXd X = gauss_map_inverse(K);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = dom->integrate(X.col(i).cwiseProduct(cone.values));
  return c * (n / ((n + 1.0) * cone.total));
}

Eigen::VectorXd steiner_point(const TranslatedField& L) {
  const auto& dom = L.h.domain;
  Eigen::VectorXd s(dom->dim);
  for (int i = 0; i < dom->dim; ++i)
    s[i] = dom->integrate(L.h.values.cwiseProduct(dom->nodes.col(i)));
  return s / unit_ball_volume(dom->dim);
}

double mean_width(const TranslatedField& L) {
  const auto& dom = L.h.domain;
  return 2.0 * dom->integrate(L.h.values) / (dom->dim * unit_ball_volume(dom->dim));
}

TransformResult linear_transform(const SupportField& K, const Eigen::MatrixXd& T) {
  const auto& dom = K.h.domain;
  if (T.rows() != dom->dim || T.cols() != dom->dim)
    throw DimensionError("transform must be a square matrix of the ambient dimension");
  if (std::abs(T.determinant()) < 1e-14) throw InvalidInputError("transform is singular");

  Eigen::VectorXd exact(dom->node_count);
  for (int q = 0; q < dom->node_count; ++q) {
    Eigen::VectorXd y = T.transpose() * dom->nodes.row(q).transpose();
    exact[q] = y.norm() * dom->evaluate(K.h.coeffs, y);
  }
  Eigen::VectorXd coeffs = dom->analyze(exact);
  Eigen::VectorXd kept = dom->synth(coeffs);
  double tail = std::sqrt(std::max(0.0, dom->integrate((exact - kept).cwiseAbs2())));
  double norm = std::sqrt(dom->integrate(exact.cwiseAbs2()));
  TransformResult out{body_from_coeffs(dom, coeffs), tail / norm};
  return out;
}

Eigen::MatrixXd s2_moment(const TranslatedField& K) {
  const auto& dom = K.h.domain;
  Eigen::VectorXd density = K.det_d2h.cwiseQuotient(K.h.values);  // L2 surface measure
  Eigen::MatrixXd sigma(dom->dim, dom->dim);
  for (int i = 0; i < dom->dim; ++i)
    for (int j = i; j < dom->dim; ++j) {
      sigma(i, j) = dom->integrate(dom->nodes.col(i).cwiseProduct(dom->nodes.col(j)).cwiseProduct(density));
      sigma(j, i) = sigma(i, j);
    }
  return sigma;
}

IsotropizeResult s2_isotropize(const SupportField& K, double tol, int max_iter) {
  const auto& dom = K.h.domain;
  int n = dom->dim;
  IsotropizeResult out;
  out.body = K;
  out.transform = Eigen::MatrixXd::Identity(n, n);
  out.iters = 0;
  for (;;) {
    Eigen::MatrixXd sigma = s2_moment(out.body);
    out.defect = (n * sigma / sigma.trace() - Eigen::MatrixXd::Identity(n, n)).norm();
    if (out.defect < tol) return out;
    if (out.iters >= max_iter)
      throw MaxIterError("isotropization stalled at defect " + std::to_string(out.defect));

    // volume-normalized square root of the moment matrix; the moments of a
    // linear image scale inversely, so this contracts toward isotropy
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(1e-14).cwiseSqrt();
    double geo = std::pow(roots.prod(), 1.0 / n);
    Eigen::MatrixXd U =
        es.eigenvectors() * (roots / geo).asDiagonal() * es.eigenvectors().transpose();
    out.body = linear_transform(out.body, U).body;
    out.transform = U * out.transform;
    ++out.iters;
  }
}

double l2_distance(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const DensityField& m) {
  if (g1.size() != m.domain->node_count || g2.size() != m.domain->node_count)
    throw DimensionError("nodal vectors do not match the measure's grid");
  double sq = m.domain->integrate((g1 - g2).cwiseAbs2().cwiseProduct(m.values));
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace hbm
