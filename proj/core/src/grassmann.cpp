#include "grassrisk/grassmann.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace grassrisk {

namespace {

constexpr double kOrthoTol = 1e-12;
constexpr double kOrthoSnapTol = 1e-6;
constexpr double kZeroTangentTol = 1e-14;
constexpr double kCutLocusMargin = 1e-6;
constexpr double kSameSubspaceTol = 1e-8;
constexpr double kAnchorTol = 1e-10;

Matrix polar_factor(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

void require_same_shape(const GrassmannPoint& u, const GrassmannPoint& v) {
  if (u.ambient_dim() != v.ambient_dim() ||
      u.subspace_dim() != v.subspace_dim()) {
    fail(ErrorCode::DimensionMismatch,
         "points live on different Grassmannians");
  }
}

void require_anchor(const GrassmannPoint& u, const TangentLift& xi,
                    const char* what) {
  if (xi.anchor.ambient_dim() != u.ambient_dim() ||
      xi.anchor.subspace_dim() != u.subspace_dim() ||
      (xi.anchor.basis() - u.basis()).cwiseAbs().maxCoeff() > kAnchorTol) {
    fail(ErrorCode::AnchorMismatch, what);
  }
}

}  // namespace

GrassmannPoint::GrassmannPoint(Matrix basis) : basis_(std::move(basis)) {
  const auto d = basis_.rows();
  const auto k = basis_.cols();
  if (d <= 0 || k <= 0 || k >= d) {
    fail(ErrorCode::DimensionMismatch,
         "GrassmannPoint requires 0 < k < d, got d=" + std::to_string(d) +
             " k=" + std::to_string(k));
  }
  double residual = orthonormality_residual();
  if (residual > kOrthoTol) {
    if (residual > kOrthoSnapTol) {
      fail(ErrorCode::RankDeficient,
           "basis is not orthonormal (residual " + std::to_string(residual) +
               ")");
    }
    basis_ = polar_factor(basis_);
  }
}

double GrassmannPoint::orthonormality_residual() const {
  const Matrix gram = basis_.transpose() * basis_;
  return (gram - Matrix::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

GrassmannPoint orthonormalize(const Matrix& m) {
  if (m.rows() <= m.cols()) {
    fail(ErrorCode::DimensionMismatch, "orthonormalize requires d > k");
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    fail(ErrorCode::RankDeficient, "matrix is numerically rank deficient");
  }
  return GrassmannPoint(svd.matrixU() * svd.matrixV().transpose());
}

TangentLift project_horizontal(const GrassmannPoint& u, const Matrix& m) {
  if (m.rows() != u.ambient_dim() || m.cols() != u.subspace_dim()) {
    fail(ErrorCode::DimensionMismatch, "ambient matrix has wrong shape");
  }
  Matrix delta = m - u.basis() * (u.basis().transpose() * m);
  return TangentLift{u, std::move(delta)};
}

namespace detail {

LiftSvd lift_svd(const Matrix& delta) {
  Eigen::JacobiSVD<Matrix> svd(delta,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  LiftSvd out;
  out.s = svd.singularValues();
  out.q = svd.matrixV();
  out.p = svd.matrixU();
  const double smax = out.s.size() > 0 ? out.s(0) : 0.0;
  out.rank = 0;
  for (Eigen::Index i = 0; i < out.s.size(); ++i) {
    if (out.s(i) > std::max(kZeroTangentTol, 1e-14 * smax)) ++out.rank;
  }
  // Zero the columns beyond the numerical rank; sin(tS) vanishes there, so
  // the geodesic formulas are unaffected, but transport needs P P^T built
  // from meaningful directions only.
  for (Eigen::Index i = out.rank; i < out.p.cols(); ++i) {
    out.p.col(i).setZero();
  }
  return out;
}

}  // namespace detail

GrassmannPoint exp_map(const GrassmannPoint& u, const TangentLift& delta,
                       double t) {
  require_anchor(u, delta, "tangent is not anchored at the base point");
  if (delta.delta.cwiseAbs().maxCoeff() < kZeroTangentTol) {
    return u;
  }
  const auto f = detail::lift_svd(delta.delta);
  const Vector ts = t * f.s;
  Matrix result = u.basis() * f.q * ts.array().cos().matrix().asDiagonal() *
                      f.q.transpose() +
                  f.p * ts.array().sin().matrix().asDiagonal() *
                      f.q.transpose();
  return GrassmannPoint(std::move(result));
}

TangentLift log_map(const GrassmannPoint& u, const GrassmannPoint& v) {
  require_same_shape(u, v);
  const Matrix m = u.basis().transpose() * v.basis();
  Eigen::JacobiSVD<Matrix> overlap(m, Eigen::ComputeThinU |
                                          Eigen::ComputeThinV);
  const double smin = overlap.singularValues()(m.rows() - 1);
  // theta_k < pi/2 - margin  <=>  smin > sin(margin) ~= margin.
  if (smin <= std::sin(kCutLocusMargin)) {
    fail(ErrorCode::CutLocus,
         "largest principal angle too close to pi/2; logarithm undefined");
  }
  const Matrix x =
      (v.basis() - u.basis() * m).eval() *
      overlap.matrixV() *
      overlap.singularValues().cwiseInverse().asDiagonal() *
      overlap.matrixU().transpose();
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix lift = svd.matrixU() *
                      svd.singularValues().array().atan().matrix().asDiagonal() *
                      svd.matrixV().transpose();
  // Re-project: x is horizontal in exact arithmetic, keep it that way.
  return project_horizontal(u, lift);
}

PrincipalAngles principal_angles(const GrassmannPoint& u,
                                 const GrassmannPoint& v) {
  require_same_shape(u, v);
  const Matrix m = u.basis().transpose() * v.basis();
  Eigen::JacobiSVD<Matrix> svd(m);
  Vector angles = svd.singularValues();
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    angles(i) = std::acos(std::clamp(angles(i), 0.0, 1.0));
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return PrincipalAngles{std::move(angles)};
}

double distance(const GrassmannPoint& u, const GrassmannPoint& v) {
  return principal_angles(u, v).angles.norm();
}

bool same_subspace(const GrassmannPoint& u, const GrassmannPoint& v) {
  return principal_angles(u, v).max_angle() < kSameSubspaceTol;
}

TangentLift parallel_transport(const GrassmannPoint& u,
                               const TangentLift& direction, double t,
                               const TangentLift& zeta) {
  require_anchor(u, direction, "direction is not anchored at the base point");
  require_anchor(u, zeta, "transported tangent is not anchored at the base point");
  if (direction.delta.cwiseAbs().maxCoeff() < kZeroTangentTol) {
    return zeta;
  }
  const auto f = detail::lift_svd(direction.delta);
  const Vector ts = t * f.s;
  const Matrix pt_z = f.p.transpose() * zeta.delta;
  Matrix transported =
      zeta.delta - f.p * pt_z  // (I - P P^T) zeta
      + f.p * ts.array().cos().matrix().asDiagonal() * pt_z -
      u.basis() * f.q * ts.array().sin().matrix().asDiagonal() * pt_z;
  GrassmannPoint end = exp_map(u, direction, t);
  // Mathematically horizontal at the endpoint; strip roundoff.
  return project_horizontal(end, transported);
}

TangentLift parallel_transport_inverse(const GrassmannPoint& u,
                                       const TangentLift& direction, double t,
                                       const TangentLift& zeta_at_end) {
  if (direction.delta.cwiseAbs().maxCoeff() < kZeroTangentTol) {
    return zeta_at_end;
  }
  // Transport back along the reversed geodesic from the endpoint.
  const GrassmannPoint end = exp_map(u, direction, t);
  require_anchor(end, zeta_at_end, "tangent is not anchored at the endpoint");
  const TangentLift forward = parallel_transport(u, direction, t, direction);
  const TangentLift back_dir{end, -forward.delta};
  return parallel_transport(end, back_dir, t, zeta_at_end);
}

TangentLift lift_from_coords(const GrassmannPoint& u, const Matrix& u_perp,
                             const Matrix& coords) {
  const int d = u.ambient_dim();
  const int k = u.subspace_dim();
  if (u_perp.rows() != d || u_perp.cols() != d - k) {
    fail(ErrorCode::NotOrthogonalComplement, "complement has wrong shape");
  }
  if (coords.rows() != d - k || coords.cols() != k) {
    fail(ErrorCode::DimensionMismatch, "coordinate matrix has wrong shape");
  }
  const double cross =
      (u.basis().transpose() * u_perp).cwiseAbs().maxCoeff();
  const double gram = (u_perp.transpose() * u_perp -
                       Matrix::Identity(d - k, d - k))
                          .cwiseAbs()
                          .maxCoeff();
  if (cross > 1e-10 || gram > 1e-10) {
    fail(ErrorCode::NotOrthogonalComplement,
         "[U | U_perp] is not an orthogonal matrix");
  }
  return TangentLift{u, u_perp * coords};
}

Matrix coords_from_lift(const Matrix& u_perp, const TangentLift& lift) {
  if (u_perp.rows() != lift.anchor.ambient_dim()) {
    fail(ErrorCode::DimensionMismatch, "complement has wrong row count");
  }
  return u_perp.transpose() * lift.delta;
}

Matrix complement_basis(const GrassmannPoint& u) {
  const int d = u.ambient_dim();
  const int k = u.subspace_dim();
  Eigen::HouseholderQR<Matrix> qr(u.basis());
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix tail = q.rightCols(d - k);
  // Householder Q may flip orientation relative to u; the complement only
  // needs orthogonality to u, which holds for the trailing columns.
  return tail;
}

GrassmannPoint random_point(Philox& gen, int d, int k) {
  Matrix m(d, k);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) {
      m(i, j) = gen.next_gaussian();
    }
  }
  return orthonormalize(m);
}

TangentLift random_tangent(Philox& gen, const GrassmannPoint& u,
                           double max_angle) {
  Matrix m(u.ambient_dim(), u.subspace_dim());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      m(i, j) = gen.next_gaussian();
    }
  }
  TangentLift xi = project_horizontal(u, m);
  const auto f = detail::lift_svd(xi.delta);
  if (f.rank == 0) {
    return xi;  // measure-zero; caller gets the zero tangent
  }
  xi.delta *= max_angle / f.s(0);
  return xi;
}

}  // namespace grassrisk
