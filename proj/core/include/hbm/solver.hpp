#pragma once

#include <utility>
#include <vector>

#include "hbm/body.hpp"

namespace hbm {

// ---------------------------------------------------------------------------
// Planar branch solver for h'' + h = h^(p-1) on the circle.
// ---------------------------------------------------------------------------

/**
 * One closed convex solution of the planar isotropic L_p Minkowski equation,
 * represented by its fundamental arc. The support function has k-fold
 * symmetry and is even about theta = 0, so the arc [0, pi/k] runs from the
 * outer turning point h0 = h(0) = max h down to min h with h' < 0 inside.
 * k = 1 marks the circle branch.
 */
struct PlanarSolution {
  double p = 0;
  int k = 1;
  double h0 = 1;            // h(0), outer turning point
  Eigen::MatrixXd profile;  // rows (theta, h, h') on [0, pi/k], uniform theta
  double residual = 0;      // max |h'' + h - h^(p-1)| of the reconstruction
  // Cosine coefficients of the arc, h = sum modes[m] cos(k m theta). The
  // spectral extension in planar_support_field starts from these; profile
  // samples alone cannot recover high modes without noise entering D^2 h.
  Eigen::VectorXd modes;
};

/// Shooting seed window for h(0). The circle h = 1 is excluded from the scan.
struct SearchWindow {
  double lo = 0.05;
  double hi = 20.0;
  int seeds = 400;
};

/// Integrates h'' = h^(p-1) - h from (a, 0) over [0, pi/k] and returns
/// (h, h') at the right endpoint. The shooting map whose h' roots are the
/// turning points of closed k-fold profiles.
std::pair<double, double> planar_shoot(double p, int k, double a);

/// All non-circular k-fold solutions with a turning point inside the window,
/// one entry per closed profile (the two turning points of an orbit are
/// deduplicated, keeping h0 > 1). Shooting roots are refined to
/// |h'(pi/k)| < 1e-12 and the profile is polished by Fourier collocation.
/// Throws InvalidInputError unless p < 0 and k >= 1.
std::vector<PlanarSolution> solve_planar_branch(double p, int k, const SearchWindow& window = {});

/// Branch census against the predicted set {k : 3 <= k < sqrt(2-p)}.
struct PlanarClassification {
  double p = 0;
  std::vector<std::pair<int, int>> branches;  // (k, profiles found), found only
  std::vector<int> predicted;
};

/// Scans k = 3,...,ceil(sqrt(2-p))+1 with the default window. Requires p < -2.
PlanarClassification classify_planar(double p);

/// Extends the fundamental arc k-fold periodically and projects onto the
/// circle harmonics, returning a full support field. lmax = 0 picks the
/// smallest resolution carrying every significant mode of the profile.
SupportField planar_support_field(const PlanarSolution& sol, int lmax = 0);

/// Max nodal defect |D^2 h - h^(p-1)| of the planar equation (D^2 h is the
/// 1x1 restricted Hessian h'' + h). Planar only; the sphere analogue is
/// pde_residual below, which multiplies through by h^(1-p)/det and so
/// amplifies the defect by h^(1-p) at steep exponents.
double planar_ode_residual(const TranslatedField& K, double p);

// ---------------------------------------------------------------------------
// Sphere solver for h^(1-p) det(D^2 h) = 1 and the uniqueness hypotheses.
// ---------------------------------------------------------------------------

/// Max nodal defect |h^(1-p) det(D^2 h) - 1| of the isotropic L_p Minkowski
/// equation; zero exactly on solutions.
double pde_residual(const TranslatedField& K, double p);

/// Basis projection of the equation defect, b -> integral of
/// phi_b (h^(1-p) det(D^2 h) - 1) dmu. Zero on Galerkin solutions.
Eigen::VectorXd minkowski_galerkin_residual(const TranslatedField& K, double p);

/// Derivative of the projected defect in basis coefficients. Moving the body
/// by phi_c changes det(D^2 h) by adj(D^2 h) : D^2 phi_c, which gives
///   J_bc = integral phi_b [ (1-p) h^(-p) det(D^2 h) phi_c
///                           + h^(1-p) adj(D^2 h) : D^2 phi_c ] dmu.
Eigen::MatrixXd minkowski_galerkin_jacobian(const TranslatedField& K, double p);

enum class HypothesisStatus { Met, NotMet, Boundary };

/**
 * Evaluation of the spectral uniqueness criteria on a candidate solution.
 * Two sets of hypotheses are checked, both requiring S_2-isotropy:
 *   origin-centred: -2n-1 <= p < -n, centroid at origin, and
 *                   lambda_2(-L_K) >= (-p-1)/(n-1);
 *   general:        (1-3n^2)/(2n) <= p < -n and
 *                   lambda_2(-L_K) >= (n-1)/(2n-1+p).
 * Bodies meeting either set must be the unit ball, which is what
 * is_unit_ball records. lambda_2 comparisons within 1e-6 of the threshold
 * report Boundary; isotropy and centroid defects are accepted below 1e-5.
 *
 * identity_gradient and identity_position are the relative defects of two
 * integral identities that hold exactly on solutions:
 *   integral h lap(h) dV  = -(p+1) integral |grad h|^2 dV,
 *   integral X_K dV       = (n+p)/(n-1) integral grad h dV,
 * normalized by the larger side with a floor of 1e-6 V (1+|p|) so the
 * ball's 0 = 0 instance stays well-posed.
 */
struct UniquenessCheck {
  double p = 0;
  double pde_residual = 0;
  double lambda2 = 0;
  double threshold_origin_centred = 0;  // (-p-1)/(n-1)
  double threshold_general = 0;         // (n-1)/(2n-1+p), sign tracks range
  bool origin_range_ok = false;         // -2n-1 <= p < -n
  bool general_range_ok = false;        // (1-3n^2)/(2n) <= p < -n
  double isotropy_defect = 0;           // ||n S2K moment / trace - I||
  double centroid_norm = 0;
  double ball_deviation = 0;  // max |h - 1|
  bool is_unit_ball = false;  // ball_deviation < 1e-5
  HypothesisStatus origin_centred_verdict = HypothesisStatus::NotMet;
  HypothesisStatus general_verdict = HypothesisStatus::NotMet;
  double identity_gradient = 0;
  double identity_position = 0;
};

UniquenessCheck check_uniqueness_hypotheses(const SupportField& K, double p);

/// Damped Newton controls. tol is the target nodal PDE residual; runs that
/// stall above it but below 1e-7 still count as converged.
struct NewtonOptions {
  double damping = 1.0;  // initial step fraction
  int max_iters = 60;
  int max_halvings = 30;
  double tol = 1e-10;
};

struct SolveReport {
  SupportField body;
  double p = 0;
  double pde_residual = 0;
  int newton_iters = 0;
  double lambda2 = 0;
  UniquenessCheck hypotheses;
  std::vector<double> residual_history;  // Galerkin residual norm per iterate
};

/// Damped Newton on the Galerkin system from the given initial body (n = 3
/// only). Steps are halved until the iterate is a valid support function and
/// the residual decreases; NotConvexDuringIterationError if no halving
/// restores convexity, NewtonDivergedError on stagnation or budget
/// exhaustion away from a solution. The report carries the uniqueness
/// hypothesis evaluation of the final body.
SolveReport solve_sphere(double p, const SupportField& initial, const NewtonOptions& opts = {});

}  // namespace hbm
