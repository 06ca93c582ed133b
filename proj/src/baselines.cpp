#include "sdr/baselines.hpp"

#include "result_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdr {

SliceAssignment slice_response(const Vector& responses, std::size_t slices) {
  const auto n = static_cast<std::size_t>(responses.size());
  if (slices < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 slices");
  if (n < 2 * slices) {
    throw Error(ErrorCode::TooManySlices, std::to_string(slices) + " slices need at least " +
                                              std::to_string(2 * slices) + " observations, got " +
                                              std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return responses[static_cast<Index>(a)] < responses[static_cast<Index>(b)];
  });

  SliceAssignment out;
  out.slices = slices;
  out.slice_of.resize(n);
  out.counts.assign(slices, 0);
  for (std::size_t r = 0; r < n; ++r) {
    // ceil((r + 1) * H / n) - 1
    const std::size_t h = ((r + 1) * slices + n - 1) / n - 1;
    out.slice_of[order[r]] = h;
    ++out.counts[h];
  }
  return out;
}

Vector ols_covariance_vector(const StandardizedData& s) {
  const Index n = s.z.rows();
  const double ybar = s.response.mean();
  return s.z.transpose() * (s.response.array() - ybar).matrix() / static_cast<double>(n);
}

namespace {

std::vector<Matrix> slice_rows(const StandardizedData& s, const SliceAssignment& slices) {
  if (slices.slice_of.size() != static_cast<std::size_t>(s.z.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "slice assignment does not match the data");
  }
  std::vector<Matrix> groups(slices.slices);
  std::vector<Index> fill(slices.slices, 0);
  for (std::size_t h = 0; h < slices.slices; ++h) {
    groups[h].resize(static_cast<Index>(slices.counts[h]), s.z.cols());
  }
  for (Index i = 0; i < s.z.rows(); ++i) {
    const std::size_t h = slices.slice_of[static_cast<std::size_t>(i)];
    groups[h].row(fill[h]++) = s.z.row(i);
  }
  return groups;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Indices of the q entries of `key` that are largest, ordered largest first.
std::vector<Index> top_indices(const Vector& key, int q) {
  std::vector<Index> idx(static_cast<std::size_t>(key.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return key[a] > key[b]; });
  idx.resize(static_cast<std::size_t>(q));
  return idx;
}

EstimatorResult largest_directions(const Matrix& kernel, const StandardizedData& s, int q,
                                   Method method, SpectrumConvention convention) {
  const SymmetricEigen eig = symmetric_eigen(symmetrized(kernel));
  const Vector key = convention == SpectrumConvention::LargestMagnitude
                         ? Vector(eig.values.cwiseAbs())
                         : eig.values;
  const std::vector<Index> chosen = top_indices(key, q);
  Matrix gamma(eig.vectors.rows(), q);
  for (int k = 0; k < q; ++k) gamma.col(k) = eig.vectors.col(chosen[static_cast<std::size_t>(k)]);
  return detail::build_result(s.inv_sqrt, gamma, eig.values, method, convention);
}

}  // namespace

Matrix sir_matrix(const StandardizedData& s, const SliceAssignment& slices) {
  const Index p = s.z.cols();
  const double n = static_cast<double>(s.z.rows());
  Matrix m = Matrix::Zero(p, p);
  for (const Matrix& group : slice_rows(s, slices)) {
    const Vector mean = group.colwise().mean().transpose();
    m += (static_cast<double>(group.rows()) / n) * mean * mean.transpose();
  }
  return symmetrized(m);
}

Matrix save_matrix(const StandardizedData& s, const SliceAssignment& slices) {
  const Index p = s.z.cols();
  const double n = static_cast<double>(s.z.rows());
  Matrix m = Matrix::Zero(p, p);
  for (const Matrix& group : slice_rows(s, slices)) {
    if (group.rows() < 2) {
      throw Error(ErrorCode::SliceTooSmall, "every SAVE slice needs at least 2 observations");
    }
    const Vector mean = group.colwise().mean().transpose();
    const Matrix centered = group.rowwise() - mean.transpose();
    const Matrix v = centered.transpose() * centered / static_cast<double>(group.rows());
    const Matrix gap = Matrix::Identity(p, p) - v;
    m += (static_cast<double>(group.rows()) / n) * gap * gap.transpose();
  }
  return symmetrized(m);
}

std::string_view to_string(PhdMode mode) {
  return mode == PhdMode::Response ? "response" : "residual";
}

PhdMode parse_phd_mode(std::string_view name) {
  if (name == "response") return PhdMode::Response;
  if (name == "residual") return PhdMode::Residual;
  throw Error(ErrorCode::ConfigError, "PHD mode must be response or residual");
}

Matrix phd_matrix(const StandardizedData& s, PhdMode mode) {
  const Index n = s.z.rows();
  Vector weight = s.response.array() - s.response.mean();
  if (mode == PhdMode::Residual) {
    // z has zero mean and identity covariance, so the least-squares slope is
    // the covariance vector itself.
    weight -= s.z * ols_covariance_vector(s);
  }
  const Matrix weighted = s.z.array().colwise() * weight.array();
  return symmetrized(weighted.transpose() * s.z / static_cast<double>(n));
}

EstimatorResult ols_fit(const Dataset& data) {
  const Vector& y = data.response();
  if (y.maxCoeff() == y.minCoeff()) {
    throw Error(ErrorCode::ConstantResponse, "OLS needs a non-constant response");
  }
  const StandardizedData s = whiten(data);
  const Vector c = ols_covariance_vector(s);
  if (!(c.norm() > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "response is uncorrelated with every predictor");
  }
  Vector eig(1);
  eig[0] = c.squaredNorm();
  return detail::build_result(s.inv_sqrt, c, eig, Method::Ols, SpectrumConvention::Largest);
}

EstimatorResult sir_fit(const Dataset& data, std::size_t slices, int dimension) {
  detail::check_dimension(dimension, data.dims());
  const StandardizedData s = whiten(data);
  const SliceAssignment h = slice_response(s.response, slices);
  return largest_directions(sir_matrix(s, h), s, dimension, Method::Sir,
                            SpectrumConvention::Largest);
}

EstimatorResult save_fit(const Dataset& data, std::size_t slices, int dimension) {
  detail::check_dimension(dimension, data.dims());
  const StandardizedData s = whiten(data);
  const SliceAssignment h = slice_response(s.response, slices);
  return largest_directions(save_matrix(s, h), s, dimension, Method::Save,
                            SpectrumConvention::Largest);
}

EstimatorResult phd_fit(const Dataset& data, int dimension, PhdMode mode) {
  detail::check_dimension(dimension, data.dims());
  const StandardizedData s = whiten(data);
  return largest_directions(phd_matrix(s, mode), s, dimension, Method::Phd,
                            SpectrumConvention::LargestMagnitude);
}

}  // namespace sdr
