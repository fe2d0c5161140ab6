#pragma once

#include <vector>

#include "hbm/body.hpp"

namespace hbm {

/**
 * Galerkin discretization of the curvature operator of a body K as a
 * symmetric-definite matrix pencil (A, M).
 *
 * Dirichlet kind:
 *   A_ij = (1/(n-1)) integral of h ((D^2 h)^{-1})[grad phi_i, grad phi_j] dV_K
 *   M_ij = integral of phi_i phi_j dV_K
 * so A v = lambda M v discretizes the eigenvalue problem of -L_K on L^2(V_K):
 * lambda_0 = 0 on constants, lambda_1 = 1 on <x,v>/h, lambda_2 > 1.
 *
 * Hilbert kind: the conjugated operator f -> h Ltilde(f/h) against its
 * measure det(D^2 h)/(n h) dmu; its eigenvalues are 1 - lambda. Assembled
 * from the polarized-determinant form of the mixed volume V(phi_i, phi_j, .),
 * which is symmetric only after integration, so the recorded asymmetry is a
 * quadrature diagnostic rather than rounding noise.
 */
struct OperatorPencil {
  enum class Kind { Dirichlet, Hilbert };
  DomainPtr domain;
  Kind kind = Kind::Dirichlet;
  Eigen::MatrixXd A;
  Eigen::MatrixXd M;
  double assembly_residual = 0;  // max |A_ij - A_ji| before symmetrizing
};

/// Dirichlet pencil of -L_K. The tuple of extra bodies must be empty below
/// ambient dimension 4 (the multi-body operator has a single leading body
/// there and coincides with -L of it).
OperatorPencil assemble(const SupportField& K, const std::vector<const SupportField*>& extras = {});

OperatorPencil hilbert_pencil(const SupportField& K);

struct SpectralResult {
  Eigen::VectorXd eigenvalues;             // ascending
  Eigen::MatrixXd eigenvectors;            // coefficient columns, M-orthonormal
  Eigen::VectorXd residuals;               // ||A v - lambda M v|| / ||M v||
  std::vector<std::vector<int>> clusters;  // indices grouped within cluster_tol
};

/// Lowest k eigenpairs of the pencil by a dense symmetric-definite solve.
SpectralResult spectrum(const OperatorPencil& P, int k, double cluster_tol = 1e-5);

/// Smallest eigenvalue of -L_K after deflating constants and the exact
/// renormalized-linear functions <x, E_l>/h (not their computed eigenvector
/// approximations).
double lambda2(const SupportField& K);

/// Smallest nonzero eigenvalue of -L_K restricted to even functions.
/// Requires an origin-symmetric body: odd-degree coefficient mass below
/// 1e-10 relative, else NotSymmetricError.
double lambda1e(const SupportField& K);

/// Pointwise strong form Ltilde_K z = Q(D^2(z h), D^2 h, ...)/det(D^2 h)
/// at the nodes, from an exact 2-jet of z.
Eigen::VectorXd apply_ltilde(const SupportField& K, const TangentData& z);

/// L_K z = Ltilde_K z - z.
Eigen::VectorXd apply_operator(const SupportField& K, const TangentData& z);

/// Dirichlet form (1/(n-1)) integral of h (D^2 h)^{-1}[grad f, grad g] dV_K
/// for arbitrary jets; equals integral of f (-L_K g) dV_K.
double dirichlet_form(const SupportField& K, const TangentData& f, const TangentData& g);

/**
 * Splitting f = c_f + <x, v_f>/h + f_tilde against the lowest two
 * eigenspaces of -L_K:
 *   c_f = integral of f dV_K / V(K),
 *   v_f solves [integral of x x^t / h^2 dV_K] v = integral of (f/h) x dV_K,
 * leaving f_tilde orthogonal to both in L^2(V_K) at quadrature precision.
 */
struct Decomposition {
  double c;
  Eigen::VectorXd v;
  Eigen::VectorXd tilde;  // nodal values of the remainder
};

Decomposition decompose(const SupportField& K, const Eigen::VectorXd& f_values);

/// Largest principal angle (radians) between the spans of two blocks of
/// nodal columns, in L^2 of the given measure.
double subspace_angle(const DensityField& m, const Eigen::MatrixXd& U, const Eigen::MatrixXd& W);

}  // namespace hbm
