#include "hbm/inequality.hpp"

#include <cmath>

#include "hbm/errors.hpp"

namespace hbm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using Witnesses = std::vector<std::pair<std::string, Eigen::VectorXd>>;

VectorXd scalar_witness(double x) { return VectorXd::Constant(1, x); }

InequalityReport finish(std::string name, double lhs, double rhs, double tol_scale,
                        Witnesses witnesses = {}) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = lhs - rhs;
  r.tolerance = tol_scale * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  if (std::abs(r.residual) <= r.tolerance)
    r.verdict = InequalityReport::Verdict::Equality;
  else if (r.residual < 0)
    r.verdict = InequalityReport::Verdict::Violated;
  else
    r.verdict = InequalityReport::Verdict::Holds;
  r.witnesses = std::move(witnesses);
  return r;
}

void require_origin_symmetric(const SupportField& K, const char* role) {
  const auto& dom = K.domain();
  double odd = 0.0;
  for (int i = 0; i < dom->basis_count; ++i)
    if (dom->degree[i] % 2 == 1) odd += K.h.coeffs[i] * K.h.coeffs[i];
  if (std::sqrt(odd) > 1e-10 * K.h.coeffs.norm())
    throw NotSymmetricError(std::string(role) + " must be origin-symmetric");
}

// f minus its mean against dV_K, as an exact jet.
TangentData mean_free(const SupportField& K, const TangentData& f, const VectorXd& wV, double V) {
  double c = wV.dot(f.value) / V;
  return jet_scale_add(1.0, f, -c, jet_constant(K.domain(), 1.0));
}

// Poincare-type report against an explicit volume-like measure.
InequalityReport poincare_core(std::string name, const SupportField& K, const TangentData& f,
                               const DensityField& vol, double tol_scale) {
  const auto& dom = K.domain();
  VectorXd wV = dom->weights.cwiseProduct(vol.values);
  TangentData g = mean_free(K, f, wV, vol.total);
  double lhs = dirichlet_form(K, g, g);
  double rhs = wV.dot(g.value.cwiseAbs2());
  return finish(std::move(name), lhs, rhs, tol_scale);
}

double lambda2_checked(const SupportField& K) {
  double l2 = lambda2(K);
  if (l2 <= 1.0 + 1e-12) throw SolverError("spectral gap collapsed: lambda_2 <= 1");
  return l2;
}

}  // namespace

HomotheticData homothetic_data(const SupportField& K, const SupportField& L) {
  if (K.domain() != L.domain()) throw DimensionError("bodies live on different domains");
  Decomposition d = decompose(K, L.h.values.cwiseQuotient(K.h.values));
  if (!(d.c > 0)) throw InvalidInputError("homothetic scale must be positive");

  HomotheticData hd;
  hd.c = d.c;
  hd.v = d.v;
  VectorXd lin = linear_coeffs(K.domain(), d.v);
  hd.K_tilde = translated_from_coeffs(K.domain(), d.c * K.h.coeffs + lin);
  hd.L_bar = translated_from_coeffs(K.domain(), (L.h.coeffs - lin) / d.c);
  return hd;
}

InequalityReport local_bm(const SupportField& K, const TangentData& f, double tol_scale) {
  return poincare_core("local_bm", K, f, measure(K, MeasureLabel::ConeVolume), tol_scale);
}

InequalityReport local_bm(const SupportField& K, const ScalarField& f, double tol_scale) {
  return local_bm(K, differentiate(f), tol_scale);
}

InequalityReport local_af(const std::vector<const SupportField*>& C, const TangentData& f,
                          double tol_scale) {
  std::vector<const TranslatedField*> tuple(C.begin(), C.end());
  DensityField vol = mixed_cone_measure(tuple);
  return poincare_core("local_af", *C.front(), f, vol, tol_scale);
}

InequalityReport spectral_gap_ineq(const SupportField& K, const TangentData& f,
                                   double tol_scale) {
  const auto& dom = K.domain();
  Decomposition d = decompose(K, f.value);
  TangentData tilde = jet_scale_add(1.0, f, -d.c, jet_constant(dom, 1.0));
  tilde = jet_scale_add(1.0, tilde, -1.0, jet_ratio(jet_linear(dom, d.v), K.jet));

  VectorXd wV = dom->weights.cwiseProduct(measure(K, MeasureLabel::ConeVolume).values);
  double lhs = dirichlet_form(K, tilde, tilde);
  double rhs = lambda2_checked(K) * wV.dot(tilde.value.cwiseAbs2());
  return finish("spectral_gap_ineq", lhs, rhs, tol_scale,
                {{"c_f", scalar_witness(d.c)}, {"v_f", d.v}});
}

InequalityReport reverse_ineq(const SupportField& K, const TangentData& f, double tol_scale) {
  const auto& dom = K.domain();
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  VectorXd wV = dom->weights.cwiseProduct(cone.values);

  double mean = wV.dot(f.value);
  double mean_term = mean * mean / cone.total;
  double l2 = lambda2_checked(K);

  VectorXd lt = apply_ltilde(K, f);
  double lhs = (wV.dot(lt.cwiseAbs2()) - mean_term) / (l2 - 1.0);
  double rhs = dirichlet_form(K, f, f) - wV.dot(f.value.cwiseAbs2()) + mean_term;
  return finish("reverse_ineq", lhs, rhs, tol_scale);
}

InequalityReport stability_bm(const SupportField& K, const TangentData& f, double tol_scale) {
  const auto& dom = K.domain();
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  VectorXd wV = dom->weights.cwiseProduct(cone.values);

  double mean = wV.dot(f.value);
  double lhs =
      dirichlet_form(K, f, f) - wV.dot(f.value.cwiseAbs2()) + mean * mean / cone.total;
  Decomposition d = decompose(K, f.value);
  double rhs = (lambda2_checked(K) - 1.0) * wV.dot(d.tilde.cwiseAbs2());
  return finish("stability_bm", lhs, rhs, tol_scale,
                {{"c_f", scalar_witness(d.c)}, {"v_f", d.v}});
}

InequalityReport minkowski_second_stability(const SupportField& K, const SupportField& L,
                                            double tol_scale) {
  const auto& dom = K.domain();
  double V = volume(K);
  double wkl = dom->dim == 2 ? mixed_volume(K, L) : mixed_volume(K, K, L);
  double wll = dom->dim == 2 ? volume(L) : mixed_volume(K, L, L);
  double lhs = wkl * wkl / V - wll;

  HomotheticData hd = homothetic_data(K, L);
  DensityField s2 = measure(K, MeasureLabel::LpSurface, 2.0);
  double d2 = l2_distance(L.h.values, hd.K_tilde.h.values, s2);
  double rhs = (lambda2_checked(K) - 1.0) / dom->dim * d2 * d2;
  return finish("minkowski_second_stability", lhs, rhs, tol_scale,
                {{"c", scalar_witness(hd.c)}, {"v", hd.v}});
}

InequalityReport symmetric_stability(const SupportField& K, const SupportField& L,
                                     double tol_scale) {
  require_origin_symmetric(K, "first body");
  require_origin_symmetric(L, "second body");
  const auto& dom = K.domain();
  if (dom != L.domain()) throw DimensionError("bodies live on different domains");

  double V = volume(K);
  double wkl = dom->dim == 2 ? mixed_volume(K, L) : mixed_volume(K, K, L);
  double wll = dom->dim == 2 ? volume(L) : mixed_volume(K, L, L);
  double lhs = wkl * wkl / V - wll;

  VectorXd wV = dom->weights.cwiseProduct(measure(K, MeasureLabel::ConeVolume).values);
  VectorXd ratio = L.h.values.cwiseQuotient(K.h.values);
  double R = wV.dot(ratio.cwiseAbs2()) - wll;
  double rhs = (1.0 - 1.0 / lambda1e(K)) * R;
  return finish("symmetric_stability", lhs, rhs, tol_scale, {{"R_K", scalar_witness(R)}});
}

InequalityReport ratio_bm_stability(const SupportField& K, const SupportField& L1,
                                    const SupportField& L2, double tol_scale) {
  const auto& dom = K.domain();
  if (dom != L1.domain() || dom != L2.domain())
    throw DimensionError("bodies live on different domains");

  double V = volume(K);
  auto pair_volume = [&](const TranslatedField& a, const TranslatedField& b) {
    return dom->dim == 2 ? mixed_volume(a, b) : mixed_volume(K, a, b);
  };
  double b1 = pair_volume(K, L1);
  double b2 = pair_volume(K, L2);
  double v11 = pair_volume(L1, L1);
  double v22 = pair_volume(L2, L2);
  double v12 = pair_volume(L1, L2);
  double lhs = (2.0 * v12 * b1 * b2 - v11 * b2 * b2 - v22 * b1 * b1) / (V * V);

  HomotheticData h1 = homothetic_data(K, L1);
  HomotheticData h2 = homothetic_data(K, L2);
  DensityField s2 = measure(K, MeasureLabel::LpSurface, 2.0);
  double d2 = l2_distance(h1.L_bar.h.values, h2.L_bar.h.values, s2);
  double scaled = b1 * b2 * d2 / (V * V);
  double rhs = (lambda2_checked(K) - 1.0) / dom->dim * scaled * scaled;

  VectorXd wV = dom->weights.cwiseProduct(measure(K, MeasureLabel::ConeVolume).values);
  VectorXd fhat = L1.h.values / h1.c - L2.h.values / h2.c;
  double fhat_mean = wV.dot(fhat.cwiseQuotient(K.h.values));

  return finish("ratio_bm_stability", lhs, rhs, tol_scale,
                {{"c_1", scalar_witness(h1.c)},
                 {"v_1", h1.v},
                 {"c_2", scalar_witness(h2.c)},
                 {"v_2", h2.v},
                 {"fhat_mean", scalar_witness(fhat_mean)}});
}

InequalityReport xk_inequality(const SupportField& K, double tol_scale) {
  const auto& dom = K.domain();
  const int n = dom->dim;
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  VectorXd wV = dom->weights.cwiseProduct(cone.values);

  MatrixXd X = K.h.values.asDiagonal() * dom->nodes + ambient_gradient(K.jet);
  VectorXd trace = n == 2 ? K.jet.hess[0] : VectorXd(K.jet.hess[0] + K.jet.hess[2]);
  double plain_lhs_val = wV.dot(K.h.values.cwiseProduct(trace)) / (n - 1.0);

  VectorXd intX(n);
  for (int l = 0; l < n; ++l) intX[l] = wV.dot(X.col(l));
  double plain_rhs_val = wV.dot(X.rowwise().squaredNorm()) - intX.squaredNorm() / cone.total;

  Witnesses wit;
  double linear_mass = 0.0;
  VectorXd inv_h2 = K.h.values.cwiseAbs2().cwiseInverse();
  for (int l = 0; l < n; ++l) {
    VectorXd vl = decompose(K, X.col(l)).v;
    VectorXd lv = dom->nodes * vl;
    linear_mass += wV.dot(lv.cwiseAbs2().cwiseProduct(inv_h2));
    wit.emplace_back("v_" + std::to_string(l + 1), vl);
  }
  wit.emplace_back("plain_lhs", scalar_witness(plain_lhs_val));
  wit.emplace_back("plain_rhs", scalar_witness(plain_rhs_val));

  double lhs = plain_lhs_val - plain_rhs_val;
  double rhs = (lambda2_checked(K) - 1.0) * (plain_rhs_val - linear_mass);
  return finish("xk_inequality", lhs, rhs, tol_scale, std::move(wit));
}

InequalityReport heintze_karcher_planar(const SupportField& K, const SupportField& L,
                                        double tol_scale) {
  const auto& dom = K.domain();
  if (dom->dim != 2) throw DimensionError("curvature integral bound is planar only");
  if (dom != L.domain()) throw DimensionError("bodies live on different domains");

  double vl = volume(L);
  double curv = 0.5 * dom->integrate(K.h.values.cwiseProduct(
                          L.jet.hess[0].cwiseAbs2().cwiseQuotient(K.jet.hess[0])));
  double lhs = curv - vl;

  double wkl = mixed_volume(K, L);
  double rhs = lambda2_checked(K) * (wkl * wkl / volume(K) - vl);
  return finish("heintze_karcher_planar", lhs, rhs, tol_scale);
}

}  // namespace hbm
