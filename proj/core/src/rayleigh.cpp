#include "grassrisk/rayleigh.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

namespace grassrisk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kMinimizerGradTol = 1e-8;

void require_anchor_at(const GrassmannPoint& v, const TangentLift& xi) {
  if (xi.anchor.ambient_dim() != v.ambient_dim() ||
      xi.anchor.subspace_dim() != v.subspace_dim() ||
      (xi.anchor.basis() - v.basis()).cwiseAbs().maxCoeff() > 1e-10) {
    fail(ErrorCode::AnchorMismatch, "tangent not anchored at evaluation point");
  }
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

BlockRayleigh::BlockRayleigh(Matrix a, int k) : a_(std::move(a)), k_(k) {
  const auto d = a_.rows();
  if (a_.cols() != d || d < 2) {
    fail(ErrorCode::DimensionMismatch, "matrix must be square, d >= 2");
  }
  if (k_ < 1 || k_ >= d) {
    fail(ErrorCode::DimensionMismatch, "require 1 <= k < d");
  }
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::DimensionMismatch, "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::NumericalFailure, "eigendecomposition failed");
  }
  eigenvalues_ = es.eigenvalues().reverse();
  eigenvectors_ = es.eigenvectors().rowwise().reverse();
  // Sign convention: largest-magnitude entry of each eigenvector positive.
  for (Eigen::Index j = 0; j < eigenvectors_.cols(); ++j) {
    Eigen::Index imax = 0;
    eigenvectors_.col(j).cwiseAbs().maxCoeff(&imax);
    if (eigenvectors_(imax, j) < 0.0) eigenvectors_.col(j) *= -1.0;
  }
  const Matrix recon = eigenvectors_ * eigenvalues_.asDiagonal() *
                       eigenvectors_.transpose();
  const double scale = std::max(1.0, a_.norm());
  if ((recon - a_).norm() > 1e-10 * scale) {
    fail(ErrorCode::NumericalFailure, "spectrum does not reconstruct matrix");
  }
}

GrassmannPoint BlockRayleigh::minimizer() const {
  return GrassmannPoint(eigenvectors_.leftCols(k_));
}

Matrix BlockRayleigh::minimizer_complement() const {
  return eigenvectors_.rightCols(dim() - k_);
}

double value(const BlockRayleigh& b, const GrassmannPoint& v) {
  if (v.ambient_dim() != b.dim() || v.subspace_dim() != b.k()) {
    fail(ErrorCode::DimensionMismatch, "point has wrong shape for this form");
  }
  return -0.5 * (v.basis().transpose() * b.matrix() * v.basis()).trace();
}

TangentLift gradient(const BlockRayleigh& b, const GrassmannPoint& v) {
  if (v.ambient_dim() != b.dim() || v.subspace_dim() != b.k()) {
    fail(ErrorCode::DimensionMismatch, "point has wrong shape for this form");
  }
  const Matrix av = b.matrix() * v.basis();
  Matrix delta = -(av - v.basis() * (v.basis().transpose() * av));
  return TangentLift{v, std::move(delta)};
}

TangentLift hessian_apply(const BlockRayleigh& b, const GrassmannPoint& v,
                          const TangentLift& xi) {
  require_anchor_at(v, xi);
  const Matrix vav = v.basis().transpose() * b.matrix() * v.basis();
  const Matrix ad = b.matrix() * xi.delta;
  Matrix delta = xi.delta * vav -
                 (ad - v.basis() * (v.basis().transpose() * ad));
  return TangentLift{v, std::move(delta)};
}

double third_derivative(const BlockRayleigh& b, const GrassmannPoint& v,
                        const TangentLift& xi1, const TangentLift& xi2,
                        const TangentLift& xi3) {
  require_anchor_at(v, xi1);
  require_anchor_at(v, xi2);
  require_anchor_at(v, xi3);
  const Matrix& d1 = xi1.delta;
  const Matrix& d2 = xi2.delta;
  const Matrix& d3 = xi3.delta;
  const Matrix inner = d1.transpose() * d2 * d3.transpose() +
                       d2.transpose() * d1 * d3.transpose() +
                       d3.transpose() * d1 * d2.transpose() +
                       d3.transpose() * d2 * d1.transpose();
  return (b.matrix() * v.basis() * inner).trace();
}

GeodesicProfile geodesic_profile(const BlockRayleigh& b,
                                 const GrassmannPoint& v_start,
                                 const GrassmannPoint& v_end,
                                 const Vector& t_grid) {
  GeodesicProfile out;
  out.t_grid = t_grid;
  const auto n = t_grid.size();
  out.g.resize(n);
  out.g1.setZero(n);
  out.g2.setZero(n);
  out.g3.setZero(n);

  if (same_subspace(v_start, v_end)) {
    out.g.setConstant(value(b, v_start));
    out.theta_max = 0.0;
    return out;
  }

  const TangentLift xi = log_map(v_start, v_end);
  const auto f = detail::lift_svd(xi.delta);
  out.theta_max = f.s(0);

  // Closed forms: with V(t) = V0 Q cos(tS) + P sin(tS), only the diagonals
  // of Q^T V0^T A V0 Q, Q^T V0^T A P and P^T A P enter the traces.
  const Matrix av0 = b.matrix() * v_start.basis();
  const Matrix m11 = f.q.transpose() * (v_start.basis().transpose() * av0) * f.q;
  const Matrix m12 = f.q.transpose() * (av0.transpose() * f.p);
  const Matrix m22 = f.p.transpose() * b.matrix() * f.p;
  const Vector a11 = m11.diagonal();
  const Vector a12 = m12.diagonal();
  const Vector a22 = m22.diagonal();
  const Vector& s = f.s;

  Vector g_closed(n), g1_closed(n), g2_closed(n), g3_closed(n);
  for (Eigen::Index it = 0; it < n; ++it) {
    const double t = t_grid(it);
    double g = 0, g1 = 0, g2 = 0, g3 = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double si = s(i);
      const double c = std::cos(t * si), sn = std::sin(t * si);
      const double c2 = std::cos(2 * t * si), s2 = std::sin(2 * t * si);
      const double diff = a11(i) - a22(i);
      g += c * c * a11(i) + 2 * c * sn * a12(i) + sn * sn * a22(i);
      g1 += si * (s2 * diff - 2 * c2 * a12(i));
      g2 += si * si * (c2 * diff + 2 * s2 * a12(i));
      g3 += si * si * si * (-2 * s2 * diff + 4 * c2 * a12(i));
    }
    g_closed(it) = -0.5 * g;
    g1_closed(it) = 0.5 * g1;
    g2_closed(it) = g2;
    g3_closed(it) = g3;
  }

  // Independent route: transported tangents fed through the gradient,
  // Hessian, and third-derivative formulas.
  const double scale = std::max(1.0, b.matrix().norm() *
                                         std::max(1.0, xi.norm()) *
                                         std::max(1.0, xi.norm()) *
                                         std::max(1.0, xi.norm()));
  for (Eigen::Index it = 0; it < n; ++it) {
    const double t = t_grid(it);
    const GrassmannPoint gamma = exp_map(v_start, xi, t);
    const TangentLift xt = parallel_transport(v_start, xi, t, xi);
    const double g = value(b, gamma);
    const double g1 = (gradient(b, gamma).delta.array() * xt.delta.array()).sum();
    const double g2 =
        (hessian_apply(b, gamma, xt).delta.array() * xt.delta.array()).sum();
    const double g3 = third_derivative(b, gamma, xt, xt, xt);
    const double denom = 1e-8 * scale;
    if (std::abs(g - g_closed(it)) >
            std::max(denom, 1e-8 * std::abs(g_closed(it))) ||
        std::abs(g1 - g1_closed(it)) >
            std::max(denom, 1e-8 * std::abs(g1_closed(it))) ||
        std::abs(g2 - g2_closed(it)) >
            std::max(denom, 1e-8 * std::abs(g2_closed(it))) ||
        std::abs(g3 - g3_closed(it)) >
            std::max(denom, 1e-8 * std::abs(g3_closed(it)))) {
      fail(ErrorCode::NumericalFailure,
           "transport-based and closed-form geodesic derivatives disagree");
    }
    out.g(it) = g_closed(it);
    out.g1(it) = g1_closed(it);
    out.g2(it) = g2_closed(it);
    out.g3(it) = g3_closed(it);
  }
  return out;
}

double psi(double theta) {
  if (!(theta > 0.0) || !(theta < kPi / 4.0)) {
    fail(ErrorCode::DomainError, "psi requires theta in (0, pi/4)");
  }
  const auto f = [theta](double t) {
    return std::log(std::tan(theta * t + kPi / 4.0));
  };
  return integrate(f, 0.0, 1.0, 1e-12) / theta;
}

Vector margin_grid(int points) {
  if (points < 2) fail(ErrorCode::DomainError, "grid needs >= 2 points");
  Vector t(points);
  const double hi = 1.0 - 1e-6;
  for (int i = 0; i < points; ++i) {
    t(i) = hi * static_cast<double>(i) / (points - 1);
  }
  return t;
}

namespace {

void check_concordance_inputs(const BlockRayleigh& b,
                              const GrassmannPoint& v_star,
                              const GrassmannPoint& v, double* theta_out) {
  if (b.gap() <= 0.0) {
    fail(ErrorCode::NoEigengap, "minimizer is not unique without an eigengap");
  }
  if (gradient(b, v_star).norm() > kMinimizerGradTol) {
    fail(ErrorCode::NotMinimizer,
         "v_star is not a critical point of the Rayleigh quotient");
  }
  if (!same_subspace(v_star, b.minimizer())) {
    fail(ErrorCode::NotMinimizer, "v_star is not the top-k eigenspace");
  }
  const double theta = principal_angles(v_star, v).max_angle();
  if (theta >= kPi / 4.0) {
    fail(ErrorCode::AngleTooLarge,
         "self-concordance requires theta_k < pi/4");
  }
  *theta_out = theta;
}

}  // namespace

std::vector<double> self_concordance_margin(const BlockRayleigh& b,
                                            const GrassmannPoint& v_star,
                                            const GrassmannPoint& v,
                                            const Vector& t_grid,
                                            GeodesicOrigin origin) {
  double theta = 0.0;
  check_concordance_inputs(b, v_star, v, &theta);
  if (same_subspace(v_star, v)) {
    return std::vector<double>(static_cast<std::size_t>(t_grid.size()), 0.0);
  }
  const GrassmannPoint& start =
      origin == GeodesicOrigin::Minimizer ? v_star : v;
  const GrassmannPoint& end = origin == GeodesicOrigin::Minimizer ? v : v_star;
  const GeodesicProfile prof = geodesic_profile(b, start, end, t_grid);
  std::vector<double> margin(static_cast<std::size_t>(t_grid.size()));
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    margin[static_cast<std::size_t>(i)] =
        2.0 * theta * std::tan(2.0 * t_grid(i) * theta) * prof.g2(i) -
        std::abs(prof.g3(i));
  }
  return margin;
}

TaylorSandwich taylor_sandwich(const BlockRayleigh& b,
                               const GrassmannPoint& v_star,
                               const GrassmannPoint& v,
                               GeodesicOrigin origin) {
  TaylorSandwich out;
  check_concordance_inputs(b, v_star, v, &out.theta);
  if (same_subspace(v_star, v)) {
    return out;
  }
  const GrassmannPoint& start =
      origin == GeodesicOrigin::Minimizer ? v_star : v;
  const GrassmannPoint& end = origin == GeodesicOrigin::Minimizer ? v : v_star;
  const TangentLift xi = log_map(start, end);
  const double grad_term =
      (gradient(b, start).delta.array() * xi.delta.array()).sum();
  out.actual = value(b, end) - value(b, start) - grad_term;
  out.quad_term =
      0.5 * (hessian_apply(b, start, xi).delta.array() * xi.delta.array()).sum();
  out.lower = 0.8 * out.quad_term;
  out.upper = 1.5 * out.quad_term;
  const double th = out.theta;
  const double sinc_sq =
      th < 1e-8 ? 1.0 : (std::sin(th) / th) * (std::sin(th) / th);
  out.sharp_lower = sinc_sq * out.quad_term;
  out.sharp_upper = (th < 1e-12 ? 1.0 : psi(th)) * out.quad_term;
  return out;
}

}  // namespace grassrisk
