#pragma once

#include <vector>

#include "grassrisk/grassmann.hpp"

namespace grassrisk {

/// The negative block Rayleigh quotient F([V]) = -Tr(V^T A V)/2 of a
/// symmetric matrix A, together with its spectrum. The top-k eigenspace of A
/// is the unique minimizer of F when the eigengap mu_k - mu_{k+1} is
/// positive.
class BlockRayleigh {
 public:
  BlockRayleigh(Matrix a, int k);

  const Matrix& matrix() const { return a_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  int dim() const { return static_cast<int>(a_.rows()); }
  int k() const { return k_; }
  double gap() const { return eigenvalues_(k_ - 1) - eigenvalues_(k_); }

  /// Top-k eigenvectors (the global minimizer of F when gap() > 0).
  GrassmannPoint minimizer() const;
  /// The remaining d-k eigenvectors, an orthonormal complement of the
  /// minimizer.
  Matrix minimizer_complement() const;

 private:
  Matrix a_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  int k_;
};

double value(const BlockRayleigh& b, const GrassmannPoint& v);

/// lift of grad F([V]) = -(I - V V^T) A V.
TangentLift gradient(const BlockRayleigh& b, const GrassmannPoint& v);

/// lift of Hess F([V])[xi] = Delta V^T A V - (I - V V^T) A Delta.
TangentLift hessian_apply(const BlockRayleigh& b, const GrassmannPoint& v,
                          const TangentLift& xi);

/// Third covariant derivative
/// <A, V(D1^T D2 D3^T + D2^T D1 D3^T + D3^T D1 D2^T + D3^T D2 D1^T)>_F,
/// symmetric in its three tangent arguments and bounded by
/// 4 ||A||_F prod ||xi_i||.
double third_derivative(const BlockRayleigh& b, const GrassmannPoint& v,
                        const TangentLift& xi1, const TangentLift& xi2,
                        const TangentLift& xi3);

/// Values and first three derivatives of g(t) = F(gamma(t)) along the
/// geodesic from v_start to v_end, evaluated on t_grid in [0, 1].
struct GeodesicProfile {
  Vector t_grid;
  Vector g, g1, g2, g3;
  double theta_max = 0.0;
};

/// Computes the profile two independent ways (transported gradient/Hessian/
/// third-derivative formulas, and the trigonometric closed forms from the
/// geodesic parametrization) and requires agreement to 1e-8 relative;
/// disagreement raises NumericalFailure.
GeodesicProfile geodesic_profile(const BlockRayleigh& b,
                                 const GrassmannPoint& v_start,
                                 const GrassmannPoint& v_end,
                                 const Vector& t_grid);

/// psi(theta) = theta^{-1} int_0^1 log tan(theta t + pi/4) dt for
/// theta in (0, pi/4); psi -> 1 at 0 and psi -> 16*Catalan/pi^2 ~ 1.485 at
/// pi/4.
double psi(double theta);

enum class GeodesicOrigin {
  Minimizer,  // gamma(0) = [V*]
  Point,      // gamma(0) = [V]
};

/// Evenly spaced grid on [0, 1 - 1e-6]; the tiny end buffer keeps
/// tan(2 t theta) finite as theta -> pi/4.
Vector margin_grid(int points);

/// Self-concordance margins 2 theta tan(2 t theta) g''(t) - |g'''(t)| per
/// grid point along the geodesic between the minimizer of b and v
/// (theta_k < pi/4 required). Non-negative margins are the content of the
/// generalized self-concordance bound.
std::vector<double> self_concordance_margin(
    const BlockRayleigh& b, const GrassmannPoint& v_star,
    const GrassmannPoint& v, const Vector& t_grid,
    GeodesicOrigin origin = GeodesicOrigin::Minimizer);

/// Second-order Taylor control of F between the minimizer and v:
///   lower = (4/5) quad  <=  actual  <=  (3/2) quad = upper,
/// plus the sharp bounds sin^2(theta)/theta^2 * quad and psi(theta) * quad.
/// `actual` excludes the (zero at the minimizer) gradient term.
struct TaylorSandwich {
  double lower = 0.0;
  double upper = 0.0;
  double actual = 0.0;
  double quad_term = 0.0;
  double theta = 0.0;
  double sharp_lower = 0.0;
  double sharp_upper = 0.0;
};

TaylorSandwich taylor_sandwich(const BlockRayleigh& b,
                               const GrassmannPoint& v_star,
                               const GrassmannPoint& v,
                               GeodesicOrigin origin = GeodesicOrigin::Minimizer);

}  // namespace grassrisk
