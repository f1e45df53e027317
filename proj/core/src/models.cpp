#include "grassrisk/models.hpp"

#include <Eigen/Eigenvalues>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace grassrisk {

void SpikedSpec::validate() const {
  const int kk = k();
  if (kk < 1 || d <= kk) {
    fail(ErrorCode::InvalidSpike, "need 1 <= k < d spike directions");
  }
  for (int j = 0; j < kk; ++j) {
    if (!(eta(j) > 0.0)) {
      fail(ErrorCode::InvalidSpike, "spike eigenvalues must be positive");
    }
    if (j > 0 && eta(j) > eta(j - 1)) {
      fail(ErrorCode::InvalidSpike, "spike eigenvalues must be non-increasing");
    }
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::InvalidSpike, "noise level must be finite and >= 0");
  }
}

Vector SpikedSpec::spectrum() const {
  validate();
  Vector lam = Vector::Constant(d, sigma * sigma);
  lam.head(k()) += eta;
  return lam;
}

Matrix sample_gaussian(const Matrix& sigma, long n, std::uint64_t seed) {
  if (sigma.rows() != sigma.cols() ||
      (sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
          1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::NotPsd, "covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()));
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
    fail(ErrorCode::NotPsd, "covariance has a negative eigenvalue");
  }
  const Matrix root =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Philox gen(seed);
  const auto d = sigma.rows();
  Matrix z(n, d);
  for (long i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = gen.next_gaussian();
  }
  return z * root.transpose();
}

Matrix sample_gaussian(const SpectralModel& model, long n, Philox& gen) {
  const int d = model.dim();
  const Matrix root = model.eigenvectors() *
                      model.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Matrix z(n, d);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = gen.next_gaussian();
  }
  return z * root.transpose();
}

Matrix sample_spiked(const SpikedSpec& spec, long n, Philox& gen) {
  spec.validate();
  const int d = spec.d;
  const int k = spec.k();
  Matrix x(n, d);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      x(i, j) = spec.sigma * gen.next_gaussian();
    }
    for (int j = 0; j < k; ++j) {
      const double scale = std::sqrt(spec.eta(j));
      double latent;
      if (spec.latent == LatentKind::Gaussian) {
        latent = scale * gen.next_gaussian();
      } else {
        latent = gen.next_double() < 0.5 ? -scale : scale;
      }
      x(i, j) += latent;
    }
  }
  return x;
}

Matrix sample_spiked(const SpikedSpec& spec, long n, std::uint64_t seed) {
  Philox gen(seed);
  return sample_spiked(spec, n, gen);
}

namespace {

struct EdgeList {
  std::vector<std::pair<int, int>> edges;
  std::vector<double> cumulative;  // normalized cumulative weights
  double total = 0.0;
};

EdgeList collect_edges(const Matrix& w) {
  const auto d = w.rows();
  if (w.cols() != d) {
    fail(ErrorCode::InvalidGraph, "weight matrix must be square");
  }
  if ((w - w.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::InvalidGraph, "weight matrix must be symmetric");
  }
  EdgeList list;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (w(j, j) != 0.0) {
      fail(ErrorCode::InvalidGraph, "weight matrix must have zero diagonal");
    }
    for (Eigen::Index l = j + 1; l < d; ++l) {
      const double weight = w(j, l);
      if (weight < 0.0) {
        fail(ErrorCode::InvalidGraph, "weights must be non-negative");
      }
      if (weight > 0.0) {
        list.edges.emplace_back(static_cast<int>(j), static_cast<int>(l));
        list.total += weight;
        list.cumulative.push_back(list.total);
      }
    }
  }
  if (list.edges.empty() || list.total <= 0.0) {
    fail(ErrorCode::InvalidGraph, "graph has no positive-weight edge");
  }
  for (double& c : list.cumulative) c /= list.total;
  list.cumulative.back() = 1.0;
  return list;
}

}  // namespace

std::vector<Matrix> sample_edge_matrices(const Matrix& w, long n,
                                         std::uint64_t seed) {
  const EdgeList list = collect_edges(w);
  const auto d = w.rows();
  Philox gen(seed);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double u = gen.next_double();
    const auto it = std::lower_bound(list.cumulative.begin(),
                                     list.cumulative.end(), u);
    const auto idx = static_cast<std::size_t>(
        std::distance(list.cumulative.begin(), it));
    const auto [j, l] = list.edges[std::min(idx, list.edges.size() - 1)];
    Matrix a = Matrix::Zero(d, d);
    a(j, l) = 1.0;
    a(l, j) = 1.0;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, int line_no) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    std::string cell = line.substr(pos, next - pos);
    // trim whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    if (b == std::string::npos) {
      fail(ErrorCode::ParseError,
           "empty cell at line " + std::to_string(line_no));
    }
    cell = cell.substr(b, e - b + 1);
    double value = 0.0;
    const auto res =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      fail(ErrorCode::ParseError, "cannot parse '" + cell + "' at line " +
                                      std::to_string(line_no));
    }
    row.push_back(value);
    if (next == line.size()) break;
    pos = next + 1;
  }
  return row;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    fail(ErrorCode::EmptyData, "dataset has no rows");
  }
  const std::size_t d = rows.front().size();
  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      fail(ErrorCode::ParseError,
           "ragged row " + std::to_string(i + 1) + ": expected " +
               std::to_string(d) + " values, got " +
               std::to_string(rows[i].size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j])) {
        fail(ErrorCode::NonFiniteValue,
             "non-finite value in row " + std::to_string(i + 1));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return out;
}

}  // namespace

Matrix load_dataset(const std::string& path, DatasetFormat format,
                    bool skip_header) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoError, "cannot open '" + path + "'");
  }
  if (format == DatasetFormat::Csv) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1 && skip_header) continue;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      rows.push_back(parse_csv_row(line, line_no));
    }
    return rows_to_matrix(rows);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_array()) {
    fail(ErrorCode::ParseError, "expected a JSON array of arrays");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& r : doc) {
    if (!r.is_array()) {
      fail(ErrorCode::ParseError, "expected a JSON array of arrays");
    }
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) {
        fail(ErrorCode::ParseError, "non-numeric entry in dataset");
      }
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows_to_matrix(rows);
}

void save_dataset(const Matrix& data, const std::string& path,
                  DatasetFormat format) {
  std::ofstream out(path);
  if (!out) {
    fail(ErrorCode::IoError, "cannot write '" + path + "'");
  }
  out.precision(17);
  if (format == DatasetFormat::Csv) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (j) out << ',';
        out << data(i, j);
      }
      out << '\n';
    }
  } else {
    nlohmann::json doc = nlohmann::json::array();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < data.cols(); ++j) row.push_back(data(i, j));
      doc.push_back(std::move(row));
    }
    out << doc.dump();
  }
  if (!out) {
    fail(ErrorCode::IoError, "write to '" + path + "' failed");
  }
}

DistributionModel DistributionModel::gaussian(Matrix sigma) {
  if (sigma.rows() != sigma.cols()) {
    fail(ErrorCode::InvalidModel, "covariance must be square");
  }
  return DistributionModel(Kind::Gaussian, GaussianData{std::move(sigma)});
}

DistributionModel DistributionModel::gaussian_spectrum(Vector eigenvalues) {
  Matrix sigma = eigenvalues.asDiagonal();
  return gaussian(std::move(sigma));
}

DistributionModel DistributionModel::spiked(SpikedSpec spec) {
  spec.validate();
  return DistributionModel(Kind::Spiked, std::move(spec));
}

DistributionModel DistributionModel::dataset(Matrix data) {
  if (data.rows() == 0 || data.cols() == 0) {
    fail(ErrorCode::EmptyData, "dataset is empty");
  }
  return DistributionModel(Kind::Dataset, DatasetData{std::move(data)});
}

DistributionModel DistributionModel::edge_graph(Matrix weights) {
  collect_edges(weights);  // validates
  const double total = 0.5 * weights.sum();
  return DistributionModel(Kind::EdgeGraph, EdgeData{std::move(weights), total});
}

int DistributionModel::dim() const {
  switch (kind_) {
    case Kind::Gaussian:
      return static_cast<int>(std::get<GaussianData>(data_).sigma.rows());
    case Kind::Spiked:
      return std::get<SpikedSpec>(data_).d;
    case Kind::Dataset:
      return static_cast<int>(std::get<DatasetData>(data_).rows.cols());
    case Kind::EdgeGraph:
      return static_cast<int>(std::get<EdgeData>(data_).weights.rows());
  }
  return 0;
}

Matrix DistributionModel::mean_matrix() const {
  switch (kind_) {
    case Kind::Gaussian:
      return std::get<GaussianData>(data_).sigma;
    case Kind::Spiked: {
      const auto& spec = std::get<SpikedSpec>(data_);
      Matrix sigma = spec.spectrum().asDiagonal();
      return sigma;
    }
    case Kind::Dataset:
      return empirical_second_moment(std::get<DatasetData>(data_).rows);
    case Kind::EdgeGraph: {
      const auto& e = std::get<EdgeData>(data_);
      return e.weights / e.total_weight;
    }
  }
  fail(ErrorCode::InvalidModel, "unknown model kind");
}

SpectralModel DistributionModel::spectral_model(int k) const {
  if (kind_ == Kind::Spiked) {
    const auto& spec = std::get<SpikedSpec>(data_);
    return SpectralModel(spec.spectrum(),
                         Matrix::Identity(spec.d, spec.d), k);
  }
  return SpectralModel::from_covariance(mean_matrix(), k);
}

Matrix DistributionModel::sample(long n, Philox& gen) const {
  if (n < 0) fail(ErrorCode::EmptyData, "negative sample count");
  switch (kind_) {
    case Kind::Gaussian: {
      const SpectralModel m = SpectralModel::from_covariance(
          std::get<GaussianData>(data_).sigma,
          std::max(1, dim() - 1) >= 1 ? 1 : 1);
      return sample_gaussian(m, n, gen);
    }
    case Kind::Spiked:
      return sample_spiked(std::get<SpikedSpec>(data_), n, gen);
    default:
      fail(ErrorCode::InvalidModel,
           "model does not generate vector samples");
  }
}

Matrix DistributionModel::sample(long n, std::uint64_t seed) const {
  Philox gen(seed);
  return sample(n, gen);
}

std::vector<Matrix> DistributionModel::sample_matrices(
    long n, std::uint64_t seed) const {
  if (kind_ != Kind::EdgeGraph) {
    fail(ErrorCode::InvalidModel, "only the edge-graph model emits matrices");
  }
  return sample_edge_matrices(std::get<EdgeData>(data_).weights, n, seed);
}

const SpikedSpec& DistributionModel::spiked_spec() const {
  if (kind_ != Kind::Spiked) {
    fail(ErrorCode::InvalidModel, "not a spiked model");
  }
  return std::get<SpikedSpec>(data_);
}

const Matrix& DistributionModel::dataset_rows() const {
  if (kind_ != Kind::Dataset) {
    fail(ErrorCode::InvalidModel, "not a dataset model");
  }
  return std::get<DatasetData>(data_).rows;
}

const Matrix& DistributionModel::edge_weights() const {
  if (kind_ != Kind::EdgeGraph) {
    fail(ErrorCode::InvalidModel, "not an edge-graph model");
  }
  return std::get<EdgeData>(data_).weights;
}

}  // namespace grassrisk
