#include "grassrisk/risk.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace grassrisk {

namespace {

void require_gap(const SpectralModel& model) {
  if (model.gap() <= 0.0) {
    fail(ErrorCode::NoEigengap, "lambda_k == lambda_{k+1}");
  }
}

Eigen::Index first_nonzero_index(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0) return i;
  }
  return v.size();
}

}  // namespace

SpectralModel::SpectralModel(Vector eigenvalues, Matrix eigenvectors, int k)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      k_(k) {
  const auto d = eigenvalues_.size();
  if (eigenvectors_.rows() != d || eigenvectors_.cols() != d) {
    fail(ErrorCode::DimensionMismatch, "eigenvector matrix must be d x d");
  }
  if (k_ < 1 || k_ >= d) {
    fail(ErrorCode::DimensionMismatch, "require 1 <= k < d");
  }
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    if (eigenvalues_(i) < eigenvalues_(i + 1)) {
      fail(ErrorCode::DimensionMismatch,
           "eigenvalues must be non-increasing");
    }
  }
  const double ortho = (eigenvectors_.transpose() * eigenvectors_ -
                        Matrix::Identity(d, d))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-12) {
    fail(ErrorCode::DimensionMismatch, "eigenvector matrix is not orthogonal");
  }
}

SpectralModel SpectralModel::from_covariance(const Matrix& sigma, int k) {
  if (sigma.rows() != sigma.cols()) {
    fail(ErrorCode::DimensionMismatch, "covariance must be square");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::DimensionMismatch, "covariance must be symmetric");
  }
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::NumericalFailure, "eigendecomposition failed");
  }
  const auto d = sym.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  Matrix vecs = es.eigenvectors();
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index imax = 0;
    vecs.col(j).cwiseAbs().maxCoeff(&imax);
    if (vecs(imax, j) < 0.0) vecs.col(j) *= -1.0;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double la = es.eigenvalues()(a);
                     const double lb = es.eigenvalues()(b);
                     if (la != lb) return la > lb;
                     return first_nonzero_index(vecs.col(a)) <
                            first_nonzero_index(vecs.col(b));
                   });
  Vector lam(d);
  Matrix q(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    lam(j) = es.eigenvalues()(order[static_cast<std::size_t>(j)]);
    q.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  return SpectralModel(std::move(lam), std::move(q), k);
}

Matrix SpectralModel::covariance() const {
  return eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
}

GrassmannPoint SpectralModel::top_subspace() const {
  return GrassmannPoint(eigenvectors_.leftCols(k_));
}

Matrix SpectralModel::tail_basis() const {
  return eigenvectors_.rightCols(dim() - k_);
}

Matrix empirical_second_moment(const Matrix& data) {
  if (data.rows() == 0) {
    fail(ErrorCode::EmptyData, "no samples");
  }
  return data.transpose() * data / static_cast<double>(data.rows());
}

PcaFit pca_fit(const Matrix& s, int k) {
  if (k < 1 || k >= s.rows()) {
    fail(ErrorCode::DimensionMismatch, "require 1 <= k < d");
  }
  const SpectralModel spectral = SpectralModel::from_covariance(s, k);
  return PcaFit{GrassmannPoint(spectral.eigenvectors().leftCols(k)),
                spectral.eigenvalues(), 0};
}

PcaFit pca_fit_data(const Matrix& data, int k) {
  PcaFit fit = pca_fit(empirical_second_moment(data), k);
  fit.n = data.rows();
  return fit;
}

double population_risk(const SpectralModel& model, const GrassmannPoint& u,
                       double second_moment_trace) {
  if (u.ambient_dim() != model.dim() || u.subspace_dim() != model.k()) {
    fail(ErrorCode::DimensionMismatch, "subspace has wrong shape");
  }
  const Matrix proj = model.eigenvectors().transpose() * u.basis();
  const double captured =
      (model.eigenvalues().asDiagonal() * proj * proj.transpose()).trace();
  return 0.5 * second_moment_trace - 0.5 * captured;
}

double excess_risk(const SpectralModel& model, const GrassmannPoint& u) {
  require_gap(model);
  if (u.ambient_dim() != model.dim() || u.subspace_dim() != model.k()) {
    fail(ErrorCode::DimensionMismatch, "subspace has wrong shape");
  }
  const Matrix proj = model.eigenvectors().transpose() * u.basis();
  double captured = 0.0;
  for (Eigen::Index j = 0; j < model.dim(); ++j) {
    captured += model.eigenvalues()(j) * proj.row(j).squaredNorm();
  }
  const double best = model.eigenvalues().head(model.k()).sum();
  return 0.5 * (best - captured);
}

std::vector<HessianEigenpair> hessian_spectrum_at_opt(
    const SpectralModel& model) {
  require_gap(model);
  const GrassmannPoint u_star = model.top_subspace();
  const Matrix u_perp = model.tail_basis();
  const int k = model.k();
  const int dk = model.dim() - k;
  std::vector<HessianEigenpair> out;
  out.reserve(static_cast<std::size_t>(k * dk));
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < k; ++j) {
      Matrix coords = Matrix::Zero(dk, k);
      coords(i, j) = 1.0;
      out.push_back(HessianEigenpair{
          i, j, model.delta(i, j),
          lift_from_coords(u_star, u_perp, coords)});
    }
  }
  return out;
}

Matrix apply_h_power(const SpectralModel& model, const Matrix& coords,
                     HPower power) {
  require_gap(model);
  const int k = model.k();
  const int dk = model.dim() - k;
  if (coords.rows() != dk || coords.cols() != k) {
    fail(ErrorCode::DimensionMismatch, "coordinate matrix has wrong shape");
  }
  Matrix out(dk, k);
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < k; ++j) {
      const double dij = model.delta(i, j);
      out(i, j) = power == HPower::MinusOne
                      ? coords(i, j) / dij
                      : coords(i, j) / std::sqrt(dij);
    }
  }
  return out;
}

double projector_schatten_distance(const GrassmannPoint& u,
                                   const GrassmannPoint& v, double p) {
  if (std::isnan(p) || p < 1.0) {
    fail(ErrorCode::InvalidP, "Schatten index must satisfy p >= 1");
  }
  const PrincipalAngles angles = principal_angles(u, v);
  if (std::isinf(p)) {
    return std::sin(angles.max_angle());
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < angles.angles.size(); ++j) {
    sum += std::pow(std::sin(angles.angles(j)), p);
  }
  return std::pow(2.0, 1.0 / p) * std::pow(sum, 1.0 / p);
}

double sym_operator_norm(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

DavisKahanCheck davis_kahan_check(const SpectralModel& model,
                                  const Matrix& s_emp) {
  require_gap(model);
  DavisKahanCheck out;
  const double dev = sym_operator_norm(s_emp - model.covariance());
  if (dev > 0.5 * model.gap()) {
    return out;  // hypothesis fails; no statement made
  }
  out.applicable = true;
  const PcaFit fit = pca_fit(s_emp, model.k());
  out.lhs = std::sin(
      principal_angles(fit.subspace, model.top_subspace()).max_angle());
  out.rhs = 2.0 * dev / model.gap();
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

}  // namespace grassrisk
