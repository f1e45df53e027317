#pragma once

#include <Eigen/Dense>

#include "grassrisk/errors.hpp"
#include "grassrisk/rng.hpp"

namespace grassrisk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A point of Gr(d, k) held as a d-by-k matrix with orthonormal columns.
/// Equality of subspaces is basis-independent; use same_subspace to compare.
class GrassmannPoint {
 public:
  /// Wraps an orthonormal basis. Bases within 1e-6 of orthonormality are
  /// snapped back with a polar correction (geodesic formulas drift by a few
  /// ulps); anything farther off is rejected.
  explicit GrassmannPoint(Matrix basis);

  const Matrix& basis() const { return basis_; }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int subspace_dim() const { return static_cast<int>(basis_.cols()); }

  /// Max-norm orthonormality residual ||U^T U - I||_max.
  double orthonormality_residual() const;

 private:
  Matrix basis_;
};

/// Horizontal lift of a tangent vector at `anchor`: a d-by-k matrix delta
/// with anchor^T delta = 0. The Riemannian norm of the tangent vector equals
/// the Frobenius norm of delta.
struct TangentLift {
  GrassmannPoint anchor;
  Matrix delta;

  double norm() const { return delta.norm(); }
  double horizontality_residual() const {
    return (anchor.basis().transpose() * delta).cwiseAbs().maxCoeff();
  }
};

/// Principal angles between two subspaces, sorted non-decreasingly in
/// [0, pi/2]. angles[k-1] is the maximum rotation.
struct PrincipalAngles {
  Vector angles;

  double max_angle() const { return angles(angles.size() - 1); }
};

/// Column-space preserving orthonormalization (polar factor of a thin SVD).
/// Throws RankDeficient when the smallest singular value is below
/// 1e-10 times the largest.
GrassmannPoint orthonormalize(const Matrix& m);

/// Projects an ambient d-by-k matrix onto the horizontal space at u:
/// delta = (I - U U^T) M. Idempotent.
TangentLift project_horizontal(const GrassmannPoint& u, const Matrix& m);

/// Geodesic gamma(t) from u with velocity delta, via the thin SVD
/// delta = P S Q^T: gamma(t) = U Q cos(tS) Q^T + P sin(tS) Q^T.
GrassmannPoint exp_map(const GrassmannPoint& u, const TangentLift& delta,
                       double t = 1.0);

/// Inverse of exp_map where defined (theta_k < pi/2 - 1e-6, else CutLocus):
/// lift = P arctan(S) Q^T from the SVD of (I - U U^T) V (U^T V)^{-1}.
/// The singular values of the result are the principal angles.
TangentLift log_map(const GrassmannPoint& u, const GrassmannPoint& v);

PrincipalAngles principal_angles(const GrassmannPoint& u,
                                 const GrassmannPoint& v);

/// Riemannian (geodesic) distance: sqrt(sum of squared principal angles).
double distance(const GrassmannPoint& u, const GrassmannPoint& v);

/// Basis-independent equality test: theta_k(u, v) < 1e-8.
bool same_subspace(const GrassmannPoint& u, const GrassmannPoint& v);

/// Parallel transport of `zeta` along the geodesic from u with velocity
/// `direction`, evaluated at time t. Inner-product preserving; the result is
/// anchored at exp_map(u, direction, t).
TangentLift parallel_transport(const GrassmannPoint& u,
                               const TangentLift& direction, double t,
                               const TangentLift& zeta);

/// Inverse transport along the same geodesic: maps tangents at
/// exp_map(u, direction, t) back to u.
TangentLift parallel_transport_inverse(const GrassmannPoint& u,
                                       const TangentLift& direction, double t,
                                       const TangentLift& zeta_at_end);

/// Identifies R^{(d-k) x k} with the horizontal space at u through the
/// Frobenius-isometric map C -> U_perp C. `u_perp` must complete u to an
/// orthogonal matrix.
TangentLift lift_from_coords(const GrassmannPoint& u, const Matrix& u_perp,
                             const Matrix& coords);

/// Inverse of lift_from_coords: coords = U_perp^T delta.
Matrix coords_from_lift(const Matrix& u_perp, const TangentLift& lift);

/// Deterministic orthonormal basis of the orthogonal complement of u,
/// as the trailing columns of a full QR factorization.
Matrix complement_basis(const GrassmannPoint& u);

/// Uniform-ish random point (QR of a Gaussian matrix); deterministic given
/// the generator state.
GrassmannPoint random_point(Philox& gen, int d, int k);

/// Random horizontal lift at u, rescaled so its largest singular value is
/// `max_angle` (so theta_k(u, exp(u, xi)) = max_angle for max_angle < pi/2).
TangentLift random_tangent(Philox& gen, const GrassmannPoint& u,
                           double max_angle);

namespace detail {
/// Thin SVD of a horizontal lift with rank-r zero-padding: P is d-by-k whose
/// first r columns are the left singular vectors and the rest are zero, as
/// required by the geodesic and transport formulas.
struct LiftSvd {
  Matrix p;        // d x k, zero-padded beyond the numerical rank
  Vector s;        // k singular values, non-increasing
  Matrix q;        // k x k right factor
  int rank;
};
LiftSvd lift_svd(const Matrix& delta);
}  // namespace detail

}  // namespace grassrisk
