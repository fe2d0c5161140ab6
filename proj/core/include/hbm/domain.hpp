#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hbm/errors.hpp"

namespace hbm {

class SphereDomain;
using DomainPtr = std::shared_ptr<const SphereDomain>;

/**
 * Quadrature discretisation of the unit sphere S^{n-1} (ambient n = 2 or 3)
 * together with an orthonormal truncated harmonic basis and precomputed
 * 2-jets of every basis function at every node.
 *
 * n = 2: basis 1/sqrt(2*pi), cos(k*t)/sqrt(pi), sin(k*t)/sqrt(pi) for
 *        k <= lmax; nodes are 2*lmax + 2 equispaced angles with uniform
 *        (trapezoidal) weights.
 * n = 3: real fully normalised spherical harmonics Y_lm for l <= lmax;
 *        nodes are a Gauss-Legendre grid in cos(theta) (lmax + 2 points)
 *        times 2*lmax + 2 equispaced azimuths.
 *
 * Both rules integrate products of two basis functions exactly, so the
 * Gram matrix of the basis is the identity to rounding.
 *
 * Derivatives are taken through the degree-1-homogeneous extension
 * F(x) = |x|^(1-l) * P_l(x) of each degree-l basis function, where P_l is
 * the corresponding solid harmonic polynomial. At |x| = 1 the Euclidean
 * gradient of F splits as grad F = f*x + grad_S f, and the Euclidean
 * Hessian of F annihilates x and restricts on the tangent plane to
 * D^2 f = Hess_S f + f * Id, the operator all curvature formulas below
 * are written in. Working with the polynomial extension gives closed-form
 * jets at every node with no coordinate singularities.
 */
class SphereDomain {
 public:
  int dim;          // ambient dimension n (2 or 3)
  int lmax;         // basis cutoff degree
  int node_count;   // number of quadrature nodes
  int basis_count;  // number of basis functions

  Eigen::MatrixXd nodes;    // node_count x dim, unit vectors
  Eigen::VectorXd weights;  // quadrature weights, sum = |S^{n-1}|

  // Orthonormal tangent frame per node; frame[a] is node_count x dim.
  // n = 3 uses (e_theta, e_phi); n = 2 uses the counterclockwise tangent.
  std::array<Eigen::MatrixXd, 2> frame;

  // Basis jet tables. Row = node, column = basis function.
  Eigen::MatrixXd bval;                  // values
  std::array<Eigen::MatrixXd, 2> bgrad;  // frame components of grad_S
  std::array<Eigen::MatrixXd, 3> bhess;  // D^2 entries (0,0), (0,1), (1,1);
                                         // n = 2 uses only entry (0,0)
  std::vector<int> degree;               // harmonic degree per basis function

  int hess_size() const { return dim == 2 ? 1 : 3; }
  int grad_size() const { return dim - 1; }
  double sphere_area() const;

  /// Nodal values of the expansion with the given coefficients.
  Eigen::VectorXd synth(const Eigen::VectorXd& coeffs) const;

  /// Quadrature projection of nodal values onto the basis.
  Eigen::VectorXd analyze(const Eigen::VectorXd& values) const;

  /// Quadrature of nodal values against the round measure.
  double integrate(const Eigen::VectorXd& values) const;

  /// Evaluate the expansion at an arbitrary direction (x is normalised).
  double evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const;

  /// Values of all basis functions at an arbitrary direction.
  Eigen::VectorXd evaluate_basis(const Eigen::VectorXd& x) const;

  /// Basis index bookkeeping. n = 3: (l, m) with -l <= m <= l, sine
  /// harmonics at m < 0. n = 2: pass (k, 0) for cos, (k, 1) for sin.
  int index_of(int l, int m) const;

 private:
  friend DomainPtr make_domain(int, int);
  SphereDomain() = default;

  struct MonoTerm {
    std::array<int, 3> e;  // exponents of x, y, z (z unused for n = 2)
    double c;
  };
  std::vector<std::vector<MonoTerm>> polys_;  // solid harmonic per basis fn

  void build_circle(int lmax);
  void build_sphere(int lmax);
  void tabulate_jets();
};

/// Construct (or fetch from a process-wide cache) the domain for the given
/// ambient dimension and cutoff. Throws DimensionError for dim not in {2,3}
/// or lmax < 2.
DomainPtr make_domain(int dim, int lmax);

/**
 * A function on the sphere stored both spectrally and nodally.
 * Invariant: values == domain->synth(coeffs) to rounding.
 */
struct ScalarField {
  DomainPtr domain;
  Eigen::VectorXd coeffs;
  Eigen::VectorXd values;
};

ScalarField field_from_coeffs(DomainPtr domain, const Eigen::VectorXd& coeffs);

/// Projects arbitrary nodal values onto the basis (truncation is lossy;
/// the returned field stores the projected values).
ScalarField field_from_values(DomainPtr domain, const Eigen::VectorXd& values);

/**
 * Per-node 2-jet of a C^2 function on the sphere: value, tangential
 * gradient in frame components, and the restricted Hessian
 * D^2 f = Hess_S f + f * Id in the same frame. All inequality and
 * operator formulas consume this type, so jets of non-bandlimited
 * functions (ratios, linear forms over h) can be supplied exactly.
 */
struct TangentData {
  DomainPtr domain;
  Eigen::VectorXd value;
  std::array<Eigen::VectorXd, 2> grad;
  std::array<Eigen::VectorXd, 3> hess;
};

/// Exact jets of a bandlimited field from the basis tables.
TangentData differentiate(const ScalarField& f);

/// Jet of the constant c. Note D^2 c = c * Id, not zero.
TangentData jet_constant(DomainPtr domain, double c);

/// Jet of the linear form x -> <x, v> (its D^2 vanishes identically).
TangentData jet_linear(DomainPtr domain, const Eigen::VectorXd& v);

/// Jet of a*f + b*g.
TangentData jet_scale_add(double a, const TangentData& f, double b, const TangentData& g);

/// Jet of the product f*g:
///   D^2(fg) = f D^2 g + g D^2 f + df x dg + dg x df - fg * Id.
TangentData jet_product(const TangentData& f, const TangentData& g);

/// Jet of the quotient u/h (h nonvanishing):
///   D^2(u/h) = D^2 u / h - sym(du x dh)/h^2 - u D^2 h / h^2
///            + 2 u dh x dh / h^3 + (u/h) * Id.
TangentData jet_ratio(const TangentData& u, const TangentData& h);

/// Ambient tangential gradient vectors (node_count x dim) from frame components.
Eigen::MatrixXd ambient_gradient(const TangentData& f);

}  // namespace hbm
