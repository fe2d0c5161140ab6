#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hbm/spectrum.hpp"

namespace hbm {

/**
 * Outcome of evaluating one inequality on concrete inputs. lhs is always the
 * dominating side, so residual = lhs - rhs is nonnegative up to quadrature
 * noise whenever the inequality holds.
 *
 * witnesses carries derived quantities a caller may want to audit (scalar
 * entries are stored as length-1 vectors). Stable keys per op:
 *   stability ops:   "c_f", "v_f"
 *   minkowski/ratio: "c", "v" (per body suffix _1/_2 for the ratio op)
 *   symmetric:       "R_K"
 *   xk:              "v_1".."v_n" and "plain_lhs"/"plain_rhs"
 */
struct InequalityReport {
  enum class Verdict { Holds, Equality, Violated };

  std::string name;
  double lhs = 0;
  double rhs = 0;
  double residual = 0;  // lhs - rhs
  double tolerance = 0;
  Verdict verdict = Verdict::Holds;
  std::vector<std::pair<std::string, Eigen::VectorXd>> witnesses;
};

/**
 * Homothetic normalizations attached to a body pair: c and v solve the
 * low-mode decomposition of h_L / h_K, K_tilde = c K + v is the homothetic
 * copy of K closest to L in L^2(S_2 K), and L_bar = (L - v)/c normalizes L
 * back to the scale of K. K and L are homothetic iff K_tilde = L.
 */
struct HomotheticData {
  double c = 1;
  Eigen::VectorXd v;
  TranslatedField K_tilde;
  TranslatedField L_bar;
};

HomotheticData homothetic_data(const SupportField& K, const SupportField& L);

/// Poincare-type bound: integral of f^2 dV_K <= Dirichlet form of f, for f
/// with zero mean against dV_K. The mean is projected off internally, so raw
/// f is accepted. lhs = Dirichlet form, rhs = integral of f~^2 dV_K.
/// Equality characterizes f = <x,v>/h_K.
InequalityReport local_bm(const SupportField& K, const TangentData& f, double tol_scale = 1e-7);
InequalityReport local_bm(const SupportField& K, const ScalarField& f, double tol_scale = 1e-7);

/// Same bound against the mixed cone measure of a body tuple. Below ambient
/// dimension 4 the tuple holds one body and the report reduces to local_bm
/// of it; the tuple length is validated.
InequalityReport local_af(const std::vector<const SupportField*>& C, const TangentData& f,
                          double tol_scale = 1e-7);

/// Sharp form on the complement of the low modes: after projecting f onto
/// the orthogonal complement of constants and renormalized linears,
/// Dirichlet(f~) >= lambda_2 ||f~||^2. lhs = Dirichlet form, rhs with
/// lambda_2 recomputed at the body's own resolution.
InequalityReport spectral_gap_ineq(const SupportField& K, const TangentData& f,
                                   double tol_scale = 1e-7);

/// Upper bound complementing the spectral gap:
///   Dir(f) - ||f||^2 + (mean term) <= [ ||Ltilde f||^2 - (mean term) ] / (lambda_2 - 1).
/// lhs is the right-hand bound (dominating side).
InequalityReport reverse_ineq(const SupportField& K, const TangentData& f,
                              double tol_scale = 1e-7);

/// Quantitative strengthening of local_bm: the Dirichlet excess dominates
/// (lambda_2 - 1) times the squared distance from f to its closest
/// c + <x,v>/h_K. Witnesses carry c_f and v_f.
InequalityReport stability_bm(const SupportField& K, const TangentData& f,
                              double tol_scale = 1e-7);

/// Stability of Minkowski's second inequality:
///   V(K[n-1],L)^2/V(K) - V(K[n-2],L[2])
///     >= (1/n)(lambda_2 - 1) d_2^{S_2K}(L, cK+v)^2
/// with (c, v) from homothetic_data. Both sides vanish iff L is a homothet
/// of K.
InequalityReport minkowski_second_stability(const SupportField& K, const SupportField& L,
                                            double tol_scale = 1e-7);

/// Origin-symmetric variant with the even-mode gap:
///   V(K[n-1],L)^2/V(K) - V(K[n-2],L[2]) >= (1 - 1/lambda_1e) R_K(L),
/// R_K(L) = integral (h_L/h_K)^2 dV_K - V(K[n-2],L[2]) >= 0. Throws
/// NotSymmetricError unless both bodies are origin-symmetric.
InequalityReport symmetric_stability(const SupportField& K, const SupportField& L,
                                     double tol_scale = 1e-7);

/// Stability of the Brunn-Minkowski-type inequality for mixed volume ratios,
/// rescaled by (b_1 b_2 / V(K))^2 with b_i = V(L_i[1], K[n-1]) so that both
/// sides are scale covariant and reduce exactly to
/// minkowski_second_stability at L_2 = K:
///   lhs = [2 V(L_1,L_2,K..) b_1 b_2 - V(L_1,L_1,K..) b_2^2 - V(L_2,L_2,K..) b_1^2] / V^2
///   rhs = (1/n)(lambda_2 - 1) (b_1 b_2 d_2^{S_2K}(L_bar_1, L_bar_2) / V^2)^2.
InequalityReport ratio_bm_stability(const SupportField& K, const SupportField& L1,
                                    const SupportField& L2, double tol_scale = 1e-7);

/// Bound on the spread of the boundary embedding X_K = h x + grad h, in the
/// quantitative form: the trace excess
///   integral h (tr D^2 h)/(n-1) dV - integral |X_K|^2 dV + |integral X_K dV|^2/V
/// dominates (lambda_2 - 1) times the distance of the coordinates of X_K
/// from their best renormalized-linear approximations <x,v_l>/h. Equality in
/// both this and the plain bound (stored in witnesses) holds exactly for
/// origin-centred ellipsoids.
InequalityReport xk_inequality(const SupportField& K, double tol_scale = 1e-7);

/// Planar anisotropic Heintze-Karcher bound: for convex curves,
///   1/2 integral h_K (D^2 h_L)^2 / D^2 h_K dtheta - V(L)
///     >= lambda_2(-L_K) (V(K,L)^2/V(K) - V(L)).
/// K = B reduces to the classical curvature-integral isoperimetric bound.
/// Throws DimensionError off the circle.
InequalityReport heintze_karcher_planar(const SupportField& K, const SupportField& L,
                                        double tol_scale = 1e-7);

}  // namespace hbm
