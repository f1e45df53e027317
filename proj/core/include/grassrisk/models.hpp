#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grassrisk/risk.hpp"
#include "grassrisk/rng.hpp"

namespace grassrisk {

enum class LatentKind { Gaussian, Rademacher };

/// Spiked covariance specification: X = sum_j xi_j e_j + eps with
/// E[xi_j^2] = eta_j and eps ~ N(0, sigma^2 I_d). Population eigenvalues are
/// eta_j + sigma^2 on the spike block and sigma^2 after it.
struct SpikedSpec {
  Vector eta;  // eta_1 >= ... >= eta_k > 0
  double sigma = 1.0;
  int d = 0;
  LatentKind latent = LatentKind::Gaussian;

  int k() const { return static_cast<int>(eta.size()); }
  void validate() const;
  Vector spectrum() const;  // length d
};

/// Rows are i.i.d. N(0, sigma); sampled through the spectral square root so
/// rank-deficient covariances are fine.
Matrix sample_gaussian(const Matrix& sigma, long n, std::uint64_t seed);
Matrix sample_gaussian(const SpectralModel& model, long n, Philox& gen);

Matrix sample_spiked(const SpikedSpec& spec, long n, std::uint64_t seed);
Matrix sample_spiked(const SpikedSpec& spec, long n, Philox& gen);

/// Undirected weighted graph edge sampling: edge {j,l} (j < l) drawn with
/// probability w_jl / W_tot where W_tot = sum_{j<l} w_jl, emitted as
/// A = e_j e_l^T + e_l e_j^T. Hence E[A] = W / W_tot entrywise.
std::vector<Matrix> sample_edge_matrices(const Matrix& w, long n,
                                         std::uint64_t seed);

enum class DatasetFormat { Csv, Json };

Matrix load_dataset(const std::string& path, DatasetFormat format,
                    bool skip_header = false);
void save_dataset(const Matrix& data, const std::string& path,
                  DatasetFormat format);

/// A data-generating process together with its implied population spectrum.
class DistributionModel {
 public:
  enum class Kind { Gaussian, Spiked, Dataset, EdgeGraph };

  static DistributionModel gaussian(Matrix sigma);
  static DistributionModel gaussian_spectrum(Vector eigenvalues);
  static DistributionModel spiked(SpikedSpec spec);
  static DistributionModel dataset(Matrix data);
  static DistributionModel edge_graph(Matrix weights);

  Kind kind() const { return kind_; }
  int dim() const;

  /// Population spectrum for a requested target dimension. For Gaussian and
  /// spiked variants this is the exact population law; for a dataset it is
  /// the eigendecomposition of the empirical second moment; for an edge
  /// graph it is the eigendecomposition of E[A] = W / W_tot.
  SpectralModel spectral_model(int k) const;

  /// n i.i.d. vector samples. Valid for Gaussian and spiked variants.
  Matrix sample(long n, std::uint64_t seed) const;
  Matrix sample(long n, Philox& gen) const;
  bool has_vector_samples() const {
    return kind_ == Kind::Gaussian || kind_ == Kind::Spiked;
  }

  /// n i.i.d. symmetric-matrix samples (edge-graph variant).
  std::vector<Matrix> sample_matrices(long n, std::uint64_t seed) const;

  const SpikedSpec& spiked_spec() const;
  const Matrix& dataset_rows() const;
  const Matrix& edge_weights() const;
  /// Mean matrix whose spectrum the model targets (Sigma, or W / W_tot for
  /// the edge graph, or the dataset second moment).
  Matrix mean_matrix() const;

 private:
  struct GaussianData {
    Matrix sigma;
    Matrix root;  // spectral square root, fixed at construction
  };
  struct DatasetData {
    Matrix rows;
  };
  struct EdgeData {
    Matrix weights;
    double total_weight;
  };

  DistributionModel(Kind kind,
                    std::variant<GaussianData, SpikedSpec, DatasetData,
                                 EdgeData> data)
      : kind_(kind), data_(std::move(data)) {}

  Kind kind_;
  std::variant<GaussianData, SpikedSpec, DatasetData, EdgeData> data_;
};

}  // namespace grassrisk
