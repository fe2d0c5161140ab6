#pragma once

#include <vector>

#include "hbm/domain.hpp"

namespace hbm {

/**
 * A C^2 field h on the sphere handled like a support function: cached 2-jet,
 * curvature determinant det(D^2 h), and extremal statistics. Only convexity
 * (D^2 h > 0) is guaranteed; h itself may change sign, as happens for bodies
 * translated so the origin leaves the interior.
 */
struct TranslatedField {
  ScalarField h;
  TangentData jet;
  Eigen::VectorXd det_d2h;  // det of the restricted Hessian per node
  double min_h = 0;
  double min_eig_d2h = 0;
  double max_eig_d2h = 0;

  const DomainPtr& domain() const { return h.domain; }
};

/// A genuine support function: additionally h > 0, so the origin is interior.
struct SupportField : TranslatedField {};

/// Validates positivity and convexity (both thresholds 1e-8 times the mean
/// of h over the sphere). Throws NotPositiveError / NotConvexError.
SupportField body_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs);

/// Validates convexity only; h may be negative somewhere.
TranslatedField translated_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs);

/// Basis coefficients of the linear form x -> <x, v> (exact, degree 1).
Eigen::VectorXd linear_coeffs(const DomainPtr& domain, const Eigen::VectorXd& v);

SupportField make_ball(const DomainPtr& domain, double radius = 1.0);
/// Axis-aligned ellipsoid with the given semiaxes, projected onto the basis.
SupportField make_ellipsoid(const DomainPtr& domain, const Eigen::VectorXd& semiaxes);
/// h = 1 + sum of amplitude * basis(l, m) for each (l, m, amplitude) mode.
SupportField make_perturbed_ball(const DomainPtr& domain,
                                 const std::vector<std::tuple<int, int, double>>& modes);

SupportField translate_body(const SupportField& K, const Eigen::VectorXd& v);
SupportField scale_body(const SupportField& K, double c);
/// Minkowski combination a*K + b*L, a, b >= 0 (support functions add).
SupportField minkowski_sum(const SupportField& K, double a, const SupportField& L, double b);

/// Boundary point with outer normal x, per node: X(x) = h(x) x + grad h(x).
Eigen::MatrixXd gauss_map_inverse(const TranslatedField& K);

enum class MeasureLabel {
  Lebesgue,    // round measure, density 1
  ConeVolume,  // (1/n) h det(D2 h)
  LpSurface,   // h^(1-p) det(D2 h)
  Hilbert,     // det(D2 h) / (n h)
  MixedCone,   // cone measure of the leading body of a tuple
};

struct DensityField {
  DomainPtr domain;
  Eigen::VectorXd values;  // density against the round measure, per node
  MeasureLabel label;
  double exponent;  // p for LpSurface, unused otherwise
  double total;     // integrate(values)
};

DensityField measure(const TranslatedField& K, MeasureLabel label, double p = 1.0);

/// Mixed cone measure dV_C of a body tuple. Below ambient dimension 4 the
/// tuple has a single entry and the measure coincides with its cone-volume
/// measure; longer tuples are rejected.
DensityField mixed_cone_measure(const std::vector<const TranslatedField*>& tuple);

/// V(g_1, ..., g_n) = (1/n) integral of g_1 Q(D2 g_2, ..., D2 g_n), where Q
/// is the mixed discriminant (n = 2: Q(A) = A; n = 3: the polarized 2x2
/// determinant). Accepts arbitrary jets, not just support functions; all the
/// inequality machinery relies on that generality.
double mixed_volume(const std::vector<const TangentData*>& jets);
double mixed_volume(const std::vector<const TranslatedField*>& bodies);
double mixed_volume(const TranslatedField& a, const TranslatedField& b);  // n = 2
double mixed_volume(const TranslatedField& a, const TranslatedField& b,
                    const TranslatedField& c);  // n = 3

double volume(const TranslatedField& K);

/// Per-node partial mixed discriminant Q^{ij}, packed like Hessian slots
/// ((0,0), (0,1), (1,1)). n = 3: Q^{ij}(A) = (tr A * I - A)/2 for the single
/// tuple matrix A; n = 2 takes an empty tuple and Q^{ij} = 1. Contracting
/// against D2 g recovers Q(D2 g, A): sum_ij (D2 g)_ij Q^{ij}, with the
/// off-diagonal slot counted twice.
std::array<Eigen::VectorXd, 3> mixed_discriminant_partial(
    const DomainPtr& domain, const std::vector<const TangentData*>& tuple);

/// W_m(K) = V(K[n-m], B[m]).
double quermassintegral(const SupportField& K, int m);

Eigen::VectorXd centroid(const TranslatedField& K);

/// Steiner point s(L) = (1/V(B)) integral of h_L(x) x dmu.
Eigen::VectorXd steiner_point(const TranslatedField& L);
/// Mean width w(L) = (2/(n V(B))) integral of h_L dmu.
double mean_width(const TranslatedField& L);

struct TransformResult {
  SupportField body;
  // Relative L2 norm of the tail lost when re-projecting h(T^t x) onto the
  // truncated basis; linear images of bandlimited bodies are generally not
  // bandlimited.
  double truncation_residual;
};

/// Image body T(K), via h_{TK}(x) = |T^t x| h_K(T^t x / |T^t x|).
TransformResult linear_transform(const SupportField& K, const Eigen::MatrixXd& T);

/// Second-moment matrix of the L2 surface-area measure:
/// Sigma = integral of x (x)^t dS_2(K), density det(D2 h)/h.
Eigen::MatrixXd s2_moment(const TranslatedField& K);

struct IsotropizeResult {
  SupportField body;
  Eigen::MatrixXd transform;  // accumulated T in SL(n), body = T(input)
  double defect;              // final ||n Sigma / tr Sigma - I||_F
  int iters;
};

/// Puts K in the position where S_2(TK) is isotropic, iterating volume-
/// normalized transforms T = Sigma^(1/2)/det(Sigma^(1/2))^(1/n). Throws
/// MaxIterError if the defect does not drop below tol.
IsotropizeResult s2_isotropize(const SupportField& K, double tol = 1e-8, int max_iter = 200);

/// L2 distance of two nodal functions in the measure m.
double l2_distance(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const DensityField& m);

}  // namespace hbm
