#include <cmath>
#include <vector>

#include "hbm/solver.hpp"
#include "hbm/spectrum.hpp"

namespace hbm {

namespace {

// Nodal defect h^(1-p) det(D^2 h) - 1 of the isotropic L_p Minkowski
// equation. All residual and Jacobian work goes through this form.
Eigen::VectorXd equation_defect(const TranslatedField& K, double p) {
  if (!(K.min_h > 0)) throw NotPositiveError("the L_p curvature equation needs h > 0");
  return (K.h.values.array().pow(1.0 - p) * K.det_d2h.array() - 1.0).matrix();
}

Eigen::VectorXd galerkin_residual_of(const TranslatedField& K, double p) {
  const auto& dom = K.domain();
  return dom->bval.transpose() * dom->weights.cwiseProduct(equation_defect(K, p));
}

HypothesisStatus verdict(bool range_ok, bool geometry_ok, double lambda2, double threshold) {
  if (!range_ok || !geometry_ok) return HypothesisStatus::NotMet;
  if (std::abs(lambda2 - threshold) <= 1e-6) return HypothesisStatus::Boundary;
  return lambda2 > threshold ? HypothesisStatus::Met : HypothesisStatus::NotMet;
}

}  // namespace

double pde_residual(const TranslatedField& K, double p) {
  return equation_defect(K, p).cwiseAbs().maxCoeff();
}

Eigen::VectorXd minkowski_galerkin_residual(const TranslatedField& K, double p) {
  return galerkin_residual_of(K, p);
}

Eigen::MatrixXd minkowski_galerkin_jacobian(const TranslatedField& K, double p) {
  if (!(K.min_h > 0)) throw NotPositiveError("the L_p curvature equation needs h > 0");
  const auto& dom = K.domain();
  const auto& w = dom->weights;
  Eigen::ArrayXd hp = K.h.values.array().pow(-p);

  // value variation: (1-p) h^(-p) det(D^2 h) phi
  Eigen::VectorXd dval = (w.array() * (1.0 - p) * hp * K.det_d2h.array()).matrix();
  Eigen::MatrixXd J = dom->bval.transpose() * dval.asDiagonal() * dom->bval;

  // curvature variation: h^(1-p) adj(D^2 h) : D^2 phi
  Eigen::ArrayXd wh = w.array() * hp * K.h.values.array();
  if (dom->dim == 2) {
    J += dom->bval.transpose() * wh.matrix().asDiagonal() * dom->bhess[0];
  } else {
    J += dom->bval.transpose() *
         ((wh * K.jet.hess[2].array()).matrix().asDiagonal() * dom->bhess[0] +
          (wh * K.jet.hess[0].array()).matrix().asDiagonal() * dom->bhess[2] -
          (2.0 * wh * K.jet.hess[1].array()).matrix().asDiagonal() * dom->bhess[1]);
  }
  return J;
}

UniquenessCheck check_uniqueness_hypotheses(const SupportField& K, double p) {
  const auto& dom = K.domain();
  const double n = dom->dim;

  UniquenessCheck out;
  out.p = p;
  out.pde_residual = pde_residual(K, p);
  out.lambda2 = lambda2(K);
  out.threshold_origin_centred = (-p - 1.0) / (n - 1.0);
  out.threshold_general = (n - 1.0) / (2.0 * n - 1.0 + p);
  out.origin_range_ok = -2.0 * n - 1.0 <= p && p < -n;
  out.general_range_ok = (1.0 - 3.0 * n * n) / (2.0 * n) <= p && p < -n;

  Eigen::MatrixXd sigma = s2_moment(K);
  out.isotropy_defect =
      (n * sigma / sigma.trace() - Eigen::MatrixXd::Identity(dom->dim, dom->dim)).norm();
  out.centroid_norm = centroid(K).norm();
  out.ball_deviation = (K.h.values.array() - 1.0).abs().maxCoeff();
  out.is_unit_ball = out.ball_deviation < 1e-5;

  bool isotropic = out.isotropy_defect <= 1e-5;
  bool centred = out.centroid_norm <= 1e-5;
  out.origin_centred_verdict =
      verdict(out.origin_range_ok, isotropic && centred, out.lambda2, out.threshold_origin_centred);
  out.general_verdict =
      verdict(out.general_range_ok, isotropic, out.lambda2, out.threshold_general);

  // integral identities satisfied by solutions, against the cone measure
  DensityField cone = measure(K, MeasureLabel::ConeVolume);
  Eigen::VectorXd wV = dom->weights.cwiseProduct(cone.values);
  double floor = 1e-6 * cone.total * (1.0 + std::abs(p));

  Eigen::ArrayXd lap = K.jet.hess[0].array();
  if (dom->dim == 3) lap += K.jet.hess[2].array();
  lap -= (n - 1.0) * K.h.values.array();
  Eigen::ArrayXd grad2 = K.jet.grad[0].array().square();
  if (dom->dim == 3) grad2 += K.jet.grad[1].array().square();
  double lhs_g = wV.dot((K.h.values.array() * lap).matrix());
  double rhs_g = -(p + 1.0) * wV.dot(grad2.matrix());
  out.identity_gradient =
      std::abs(lhs_g - rhs_g) / std::max({std::abs(lhs_g), std::abs(rhs_g), floor});

  Eigen::MatrixXd X = gauss_map_inverse(K);
  Eigen::VectorXd lhs_x = X.transpose() * wV;
  Eigen::VectorXd rhs_x = ((n + p) / (n - 1.0)) * (ambient_gradient(K.jet).transpose() * wV);
  out.identity_position =
      (lhs_x - rhs_x).norm() / std::max({lhs_x.norm(), rhs_x.norm(), floor});
  return out;
}

SolveReport solve_sphere(double p, const SupportField& initial, const NewtonOptions& opts) {
  if (initial.domain()->dim != 3)
    throw DimensionError("the Minkowski solver runs on the 2-sphere only");
  if (!(opts.damping > 0) || opts.damping > 1.0 || opts.max_iters < 1 || opts.max_halvings < 0 ||
      !(opts.tol > 0))
    throw InvalidInputError("malformed Newton options");

  const auto& dom = initial.domain();
  SupportField body = initial;
  Eigen::VectorXd R = galerkin_residual_of(body, p);

  SolveReport rep;
  rep.p = p;
  rep.residual_history.push_back(R.norm());

  while (true) {
    double pde = pde_residual(body, p);
    if (pde <= opts.tol) break;
    if (rep.newton_iters >= opts.max_iters) {
      if (pde <= 1e-7) break;
      throw NewtonDivergedError("Newton ran out of iterations at residual " + std::to_string(pde));
    }

    Eigen::MatrixXd J = minkowski_galerkin_jacobian(body, p);
    Eigen::VectorXd delta = J.partialPivLu().solve(-R);
    if (!delta.allFinite())
      throw NewtonDivergedError("Newton linear solve produced a non-finite step");
    // near-singular linearizations (the critical exponent) give unbounded
    // steps along the solution family; cap the move per iteration
    double cap = 0.5 * body.h.coeffs.norm();
    if (delta.norm() > cap) delta *= cap / delta.norm();

    bool accepted = false;
    bool any_convex = false;
    double step = opts.damping;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, step *= 0.5) {
      SupportField trial;
      try {
        trial = body_from_coeffs(dom, body.h.coeffs + step * delta);
      } catch (const InvalidInputError&) {
        continue;
      }
      any_convex = true;
      Eigen::VectorXd Rt = galerkin_residual_of(trial, p);
      if (Rt.norm() < R.norm()) {
        body = trial;
        R = Rt;
        ++rep.newton_iters;
        rep.residual_history.push_back(R.norm());
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!any_convex)
        throw NotConvexDuringIterationError(
            "every damped Newton step left the cone of support functions");
      if (pde <= 1e-7) break;  // stalled at the discretization floor
      throw NewtonDivergedError("Newton stalled at residual " + std::to_string(pde));
    }
  }

  rep.body = body;
  rep.pde_residual = pde_residual(body, p);
  rep.hypotheses = check_uniqueness_hypotheses(body, p);
  rep.lambda2 = rep.hypotheses.lambda2;
  return rep;
}

}  // namespace hbm