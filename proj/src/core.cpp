#include "sdr/core.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <utility>

namespace sdr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::NoPairsSelected: return "NoPairsSelected";
    case ErrorCode::EmptyAfterDegenerate: return "EmptyAfterDegenerate";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooManySlices: return "TooManySlices";
    case ErrorCode::SliceTooSmall: return "SliceTooSmall";
    case ErrorCode::ConstantResponse: return "ConstantResponse";
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingResponseColumn: return "MissingResponseColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Dataset::Dataset(Matrix predictors, Vector response)
    : predictors_(std::move(predictors)), response_(std::move(response)) {
  if (predictors_.rows() != response_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "predictor rows (" + std::to_string(predictors_.rows()) +
                    ") differ from response length (" +
                    std::to_string(response_.size()) + ")");
  }
  if (predictors_.rows() < 2) {
    throw Error(ErrorCode::TooFewRows, "a dataset needs at least 2 rows");
  }
  if (predictors_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "a dataset needs at least 1 predictor");
  }
  for (Index j = 0; j < predictors_.cols(); ++j) {
    for (Index i = 0; i < predictors_.rows(); ++i) {
      if (!std::isfinite(predictors_(i, j))) {
        throw Error(ErrorCode::NonFiniteEntry,
                    "non-finite predictor at row " + std::to_string(i) +
                        ", column " + std::to_string(j));
      }
    }
  }
  for (Index i = 0; i < response_.size(); ++i) {
    if (!std::isfinite(response_[i])) {
      throw Error(ErrorCode::NonFiniteEntry,
                  "non-finite response at row " + std::to_string(i));
    }
  }
}

Dataset validate_dataset(Matrix raw_predictors, Vector raw_response) {
  return Dataset(std::move(raw_predictors), std::move(raw_response));
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t hash, const double* values, Index count) {
  for (Index k = 0; k < count; ++k) {
    std::array<unsigned char, sizeof(double)> bytes{};
    std::memcpy(bytes.data(), &values[k], sizeof(double));
    for (unsigned char b : bytes) {
      hash ^= b;
      hash *= kFnvPrime;
    }
  }
  return hash;
}

}  // namespace

std::uint64_t checksum(const Dataset& data) {
  std::uint64_t hash = kFnvOffset;
  hash = fnv1a(hash, data.predictors().data(), data.predictors().size());
  hash = fnv1a(hash, data.response().data(), data.response().size());
  return hash;
}

Subspace::Subspace(Matrix orthonormal_basis) : basis_(std::move(orthonormal_basis)) {
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
    throw Error(ErrorCode::InvalidArgument,
                "subspace basis must be p x d with 1 <= d <= p");
  }
  const Matrix gram = basis_.transpose() * basis_;
  const double deviation =
      (gram - Matrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
  if (!(deviation <= 1e-10)) {
    throw Error(ErrorCode::InvalidArgument, "subspace basis is not orthonormal");
  }
}

Subspace orthonormalize(const Matrix& columns) {
  const Index p = columns.rows();
  const Index d = columns.cols();
  if (d < 1 || d > p) {
    throw Error(ErrorCode::RankDeficient, "cannot orthonormalize " +
                                              std::to_string(d) + " columns in R^" +
                                              std::to_string(p));
  }
  const double scale = columns.colwise().norm().maxCoeff();
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "all columns are zero");
  }
  Matrix q(p, d);
  for (Index k = 0; k < d; ++k) {
    Vector v = columns.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < k; ++j) {
        v -= q.col(j).dot(v) * q.col(j);
      }
    }
    const double norm = v.norm();
    if (!(norm > kRankTolerance * scale)) {
      throw Error(ErrorCode::RankDeficient,
                  "column " + std::to_string(k) + " is numerically dependent");
    }
    q.col(k) = v / norm;
  }
  return Subspace(std::move(q));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Gcr: return "gcr";
    case Method::Scr: return "scr";
    case Method::Ols: return "ols";
    case Method::Sir: return "sir";
    case Method::Save: return "save";
    case Method::Phd: return "phd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Gcr, Method::Scr, Method::Ols, Method::Sir, Method::Save,
                   Method::Phd}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::UnknownMethod, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(SpectrumConvention convention) {
  switch (convention) {
    case SpectrumConvention::Smallest: return "smallest";
    case SpectrumConvention::Largest: return "largest";
    case SpectrumConvention::LargestMagnitude: return "largest_magnitude";
  }
  return "unknown";
}

void canonicalize_sign(Eigen::Ref<Vector> v) {
  const double cutoff = 1e-12 * v.norm();
  for (Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > cutoff) {
      if (v[k] < 0.0) v = -v;
      return;
    }
  }
}

SymmetricEigen symmetric_eigen(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "eigendecomposition did not converge");
  }
  SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index k = 0; k < out.vectors.cols(); ++k) canonicalize_sign(out.vectors.col(k));
  return out;
}

double RandomSource::uniform() {
  // 53 random mantissa bits; portable unlike std::uniform_real_distribution.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() { return normal_(engine_); }

RandomSource RandomSource::child(std::uint64_t task_index) const {
  return RandomSource(mix_seed(seed_, task_index));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace sdr
