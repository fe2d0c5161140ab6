#include "hbm/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "hbm/errors.hpp"

namespace hbm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Enforce exact symmetry on a raw Galerkin matrix and report the defect.
double symmetrize(MatrixXd& A) {
  double res = (A - A.transpose()).cwiseAbs().maxCoeff();
  A = (0.5 * (A + A.transpose())).eval();
  return res;
}

MatrixXd weighted_product(const MatrixXd& left, const VectorXd& w, const MatrixXd& right) {
  return left.transpose() * w.asDiagonal() * right;
}

// Coefficient-space functionals c -> integral of synth(c) * g dV_K, one
// column per constraint function g.
MatrixXd low_mode_constraints(const SupportField& K, bool with_linears) {
  const auto& dom = K.domain();
  VectorXd wV = dom->weights.cwiseProduct(measure(K, MeasureLabel::ConeVolume).values);
  MatrixXd C(dom->basis_count, with_linears ? dom->dim + 1 : 1);
  C.col(0) = dom->bval.transpose() * wV;
  if (with_linears)
    for (int l = 0; l < dom->dim; ++l) {
      VectorXd lw = dom->nodes.col(l).cwiseQuotient(K.h.values);
      C.col(1 + l) = dom->bval.transpose() * wV.cwiseProduct(lw);
    }
  return C;
}

// Minimum of the constrained Rayleigh quotient c^t A c / c^t M c over
// C^t c = 0, via a dense basis of the constraint null space.
double deflated_minimum(const MatrixXd& A, const MatrixXd& M, const MatrixXd& C) {
  const int N = A.rows();
  Eigen::HouseholderQR<MatrixXd> qr(C);
  MatrixXd Z = MatrixXd(qr.householderQ()).rightCols(N - C.cols());
  MatrixXd Ar = Z.transpose() * A * Z;
  MatrixXd Mr = Z.transpose() * M * Z;
  symmetrize(Ar);
  symmetrize(Mr);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(Ar, Mr, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolverError("deflated eigenvalue solve failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace

OperatorPencil assemble(const SupportField& K, const std::vector<const SupportField*>& extras) {
  if (!extras.empty())
    throw DimensionError("operator tuples carry extra bodies only in ambient dimension >= 4");
  const auto& dom = K.domain();
  OperatorPencil P;
  P.domain = dom;
  P.kind = OperatorPencil::Kind::Dirichlet;

  VectorXd wM = dom->weights.cwiseProduct(measure(K, MeasureLabel::ConeVolume).values);
  P.M = weighted_product(dom->bval, wM, dom->bval);

  const VectorXd h2 = K.h.values.cwiseAbs2();
  if (dom->dim == 2) {
    P.A = weighted_product(dom->bgrad[0], 0.5 * dom->weights.cwiseProduct(h2), dom->bgrad[0]);
  } else {
    // (D^2 h)^{-1} det = adjugate: swapped diagonal, negated off-diagonal
    VectorXd base = dom->weights.cwiseProduct(h2) / 6.0;
    P.A = weighted_product(dom->bgrad[0], base.cwiseProduct(K.jet.hess[2]), dom->bgrad[0]) +
          weighted_product(dom->bgrad[1], base.cwiseProduct(K.jet.hess[0]), dom->bgrad[1]) -
          weighted_product(dom->bgrad[0], base.cwiseProduct(K.jet.hess[1]), dom->bgrad[1]) -
          weighted_product(dom->bgrad[1], base.cwiseProduct(K.jet.hess[1]), dom->bgrad[0]);
  }
  P.assembly_residual = symmetrize(P.A);
  return P;
}

OperatorPencil hilbert_pencil(const SupportField& K) {
  const auto& dom = K.domain();
  OperatorPencil P;
  P.domain = dom;
  P.kind = OperatorPencil::Kind::Hilbert;

  VectorXd wM = dom->weights.cwiseProduct(measure(K, MeasureLabel::Hilbert).values);
  P.M = weighted_product(dom->bval, wM, dom->bval);

  if (dom->dim == 2) {
    P.A = weighted_product(dom->bval, 0.5 * dom->weights, dom->bhess[0]);
  } else {
    auto q = mixed_discriminant_partial(dom, {&K.jet});
    VectorXd w = dom->weights / 3.0;
    P.A = weighted_product(dom->bval, w.cwiseProduct(q[0]), dom->bhess[0]) +
          2.0 * weighted_product(dom->bval, w.cwiseProduct(q[1]), dom->bhess[1]) +
          weighted_product(dom->bval, w.cwiseProduct(q[2]), dom->bhess[2]);
  }
  P.assembly_residual = symmetrize(P.A);
  return P;
}

SpectralResult spectrum(const OperatorPencil& P, int k, double cluster_tol) {
  const int N = static_cast<int>(P.A.rows());
  if (k < 1 || k > N) throw InvalidInputError("requested eigenpair count is out of range");

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(P.A, P.M);
  if (es.info() != Eigen::Success) throw SolverError("dense pencil eigensolve failed");

  SpectralResult S;
  S.eigenvalues = es.eigenvalues().head(k);
  S.eigenvectors = es.eigenvectors().leftCols(k);
  S.residuals.resize(k);
  for (int i = 0; i < k; ++i) {
    VectorXd mv = P.M * S.eigenvectors.col(i);
    S.residuals[i] = (P.A * S.eigenvectors.col(i) - S.eigenvalues[i] * mv).norm() / mv.norm();
  }
  for (int i = 0; i < k; ++i) {
    bool joins = i > 0 && S.eigenvalues[i] - S.eigenvalues[i - 1] <=
                              cluster_tol * std::max(1.0, std::abs(S.eigenvalues[i]));
    if (joins)
      S.clusters.back().push_back(i);
    else
      S.clusters.push_back({i});
  }
  return S;
}

double lambda2(const SupportField& K) {
  OperatorPencil P = assemble(K);
  return deflated_minimum(P.A, P.M, low_mode_constraints(K, true));
}

double lambda1e(const SupportField& K) {
  const auto& dom = K.domain();
  const VectorXd& c = K.h.coeffs;
  double odd = 0.0;
  for (int i = 0; i < dom->basis_count; ++i)
    if (dom->degree[i] % 2 == 1) odd += c[i] * c[i];
  if (std::sqrt(odd) > 1e-10 * c.norm())
    throw NotSymmetricError("even-mode eigenvalue needs an origin-symmetric body");

  std::vector<int> even;
  for (int i = 0; i < dom->basis_count; ++i)
    if (dom->degree[i] % 2 == 0) even.push_back(i);

  OperatorPencil P = assemble(K);
  MatrixXd C = low_mode_constraints(K, false);
  return deflated_minimum(P.A(even, even), P.M(even, even), C(even, Eigen::all));
}

VectorXd apply_ltilde(const SupportField& K, const TangentData& z) {
  if (z.domain != K.domain()) throw DimensionError("jet and body live on different domains");
  TangentData zh = jet_product(z, K.jet);
  if (K.domain()->dim == 2) return zh.hess[0].cwiseQuotient(K.jet.hess[0]);
  VectorXd q = 0.5 * (zh.hess[0].cwiseProduct(K.jet.hess[2]) +
                      zh.hess[2].cwiseProduct(K.jet.hess[0]) -
                      2.0 * zh.hess[1].cwiseProduct(K.jet.hess[1]));
  return q.cwiseQuotient(K.det_d2h);
}

VectorXd apply_operator(const SupportField& K, const TangentData& z) {
  return apply_ltilde(K, z) - z.value;
}

double dirichlet_form(const SupportField& K, const TangentData& f, const TangentData& g) {
  const auto& dom = K.domain();
  const VectorXd h2 = K.h.values.cwiseAbs2();
  if (dom->dim == 2)
    return dom->integrate(0.5 * h2.cwiseProduct(f.grad[0]).cwiseProduct(g.grad[0]));
  VectorXd adj = K.jet.hess[2].cwiseProduct(f.grad[0].cwiseProduct(g.grad[0])) +
                 K.jet.hess[0].cwiseProduct(f.grad[1].cwiseProduct(g.grad[1])) -
                 K.jet.hess[1].cwiseProduct(f.grad[0].cwiseProduct(g.grad[1]) +
                                            f.grad[1].cwiseProduct(g.grad[0]));
  return dom->integrate(h2.cwiseProduct(adj)) / 6.0;
}

Decomposition decompose(const SupportField& K, const VectorXd& f_values) {
  const auto& dom = K.domain();
  if (f_values.size() != dom->node_count)
    throw DimensionError("decompose expects nodal values");
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  VectorXd wV = dom->weights.cwiseProduct(cone.values);
  const int n = dom->dim;

  Decomposition d;
  d.c = wV.dot(f_values) / cone.total;

  VectorXd foh = f_values.cwiseQuotient(K.h.values);
  VectorXd inv_h2 = K.h.values.cwiseAbs2().cwiseInverse();
  MatrixXd M2(n, n);
  VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b[i] = wV.dot(foh.cwiseProduct(dom->nodes.col(i)));
    for (int j = i; j < n; ++j)
      M2(i, j) = M2(j, i) =
          wV.dot(dom->nodes.col(i).cwiseProduct(dom->nodes.col(j)).cwiseProduct(inv_h2));
  }
  d.v = M2.llt().solve(b);
  d.tilde = f_values.array() - d.c -
            (dom->nodes * d.v).cwiseQuotient(K.h.values).array();
  return d;
}

double subspace_angle(const DensityField& m, const MatrixXd& U, const MatrixXd& W) {
  const auto& dom = m.domain;
  if (U.rows() != dom->node_count || W.rows() != dom->node_count)
    throw DimensionError("subspace blocks must hold nodal columns");
  VectorXd s = dom->weights.cwiseProduct(m.values).cwiseMax(0.0).cwiseSqrt();

  auto orthonormal = [](const MatrixXd& X) {
    Eigen::HouseholderQR<MatrixXd> qr(X);
    return MatrixXd(qr.householderQ() * MatrixXd::Identity(X.rows(), X.cols()));
  };
  MatrixXd Qu = orthonormal(s.asDiagonal() * U);
  MatrixXd Qw = orthonormal(s.asDiagonal() * W);
  Eigen::JacobiSVD<MatrixXd> svd(Qu.transpose() * Qw);
  double cosine = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(cosine);
}

}  // namespace hbm
