#pragma once

#include <vector>

#include "grassrisk/grassmann.hpp"

namespace grassrisk {

/// Population spectrum of a second-moment matrix: eigenvalues in
/// non-increasing order, a full orthogonal eigenvector matrix, and the target
/// dimension k. The top-k eigenspace is the PCA optimum; gap() > 0 makes it
/// unique.
class SpectralModel {
 public:
  SpectralModel(Vector eigenvalues, Matrix eigenvectors, int k);

  /// Eigendecomposition with a deterministic tie-break: eigenvalues sorted
  /// non-increasingly; exact ties ordered by the index of the eigenvector's
  /// first nonzero coordinate; signs normalized so the largest-magnitude
  /// entry is positive.
  static SpectralModel from_covariance(const Matrix& sigma, int k);

  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  int k() const { return k_; }
  double gap() const { return eigenvalues_(k_ - 1) - eigenvalues_(k_); }
  double trace() const { return eigenvalues_.sum(); }

  Matrix covariance() const;
  GrassmannPoint top_subspace() const;  // U*
  Matrix tail_basis() const;            // U*^perp, columns u_{k+1}..u_d

  /// delta_ij = lambda_j - lambda_{k+i}; i in [0, d-k), j in [0, k).
  double delta(int i, int j) const {
    return eigenvalues_(j) - eigenvalues_(k_ + i);
  }

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
  int k_;
};

/// Top-k eigenspace of an empirical second-moment matrix.
struct PcaFit {
  GrassmannPoint subspace;
  Vector empirical_eigenvalues;  // all d, non-increasing
  long n = 0;                    // sample count when fitted from data
};

/// Uncentered second moment n^{-1} sum_i x_i x_i^T.
Matrix empirical_second_moment(const Matrix& data);

PcaFit pca_fit(const Matrix& s, int k);
PcaFit pca_fit_data(const Matrix& data, int k);

/// R([U]) = E||X||^2/2 - Tr(U^T Sigma U)/2 with the second-moment trace
/// supplied by the caller.
double population_risk(const SpectralModel& model, const GrassmannPoint& u,
                       double second_moment_trace);

/// R([U]) - R([U*]) = (Tr(U*^T Sigma U*) - Tr(U^T Sigma U))/2 >= 0.
double excess_risk(const SpectralModel& model, const GrassmannPoint& u);

/// Eigenpairs of Hess R([U*]): the lifts of U*^perp E_ij with eigenvalues
/// delta_ij = lambda_j - lambda_{k+i}.
struct HessianEigenpair {
  int i;
  int j;
  double delta;
  TangentLift xi;
};
std::vector<HessianEigenpair> hessian_spectrum_at_opt(const SpectralModel& model);

enum class HPower { MinusOne, MinusHalf };

/// Action of Hess R([U*])^{-1} or ^{-1/2} on horizontal coordinates:
/// entrywise division by delta_ij or sqrt(delta_ij).
Matrix apply_h_power(const SpectralModel& model, const Matrix& coords,
                     HPower power);

/// Schatten-p distance of the projectors, computed from principal angles as
/// 2^{1/p} (sum_j sin^p theta_j)^{1/p}; p = infinity gives the max sine.
double projector_schatten_distance(const GrassmannPoint& u,
                                   const GrassmannPoint& v, double p);

/// One Davis-Kahan test: lhs = sin theta_k(fit(S_emp), U*),
/// rhs = 2 ||S_emp - Sigma||_op / gap. Not applicable (no statement made)
/// when ||S_emp - Sigma||_op > gap/2.
struct DavisKahanCheck {
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
DavisKahanCheck davis_kahan_check(const SpectralModel& model,
                                  const Matrix& s_emp);

/// Largest absolute eigenvalue of a symmetric matrix.
double sym_operator_norm(const Matrix& s);

}  // namespace grassrisk
