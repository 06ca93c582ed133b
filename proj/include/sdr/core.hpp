#pragma once

// Shared data model for the dimension-reduction estimators: validated
// datasets, orthonormal subspaces, estimator results, typed errors and a
// seeded random source.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteEntry,
  TooFewRows,
  RankDeficient,
  SingularCovariance,
  DegeneratePair,
  NoPairsSelected,
  EmptyAfterDegenerate,
  DimensionTooLarge,
  InvalidArgument,
  TooManySlices,
  SliceTooSmall,
  ConstantResponse,
  AmbientMismatch,
  FileNotFound,
  ParseError,
  MissingResponseColumn,
  NonNumericCell,
  UnknownMethod,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A regression sample: n rows of p predictors plus one response per row.
/// Construction validates shape and finiteness, so every live Dataset holds
/// n >= 2, p >= 1 and finite entries.
class Dataset {
 public:
  Dataset(Matrix predictors, Vector response);

  const Matrix& predictors() const noexcept { return predictors_; }
  const Vector& response() const noexcept { return response_; }
  Index rows() const noexcept { return predictors_.rows(); }
  Index dims() const noexcept { return predictors_.cols(); }

 private:
  Matrix predictors_;
  Vector response_;
};

Dataset validate_dataset(Matrix raw_predictors, Vector raw_response);

/// FNV-1a over the raw bytes of predictors and response.
std::uint64_t checksum(const Dataset& data);

/// Column span of a p x d matrix with orthonormal columns.
class Subspace {
 public:
  /// Throws InvalidArgument unless basis^T basis = I within 1e-10.
  explicit Subspace(Matrix orthonormal_basis);

  const Matrix& basis() const noexcept { return basis_; }
  Index ambient() const noexcept { return basis_.rows(); }
  Index dim() const noexcept { return basis_.cols(); }
  Matrix projection() const { return basis_ * basis_.transpose(); }

 private:
  Matrix basis_;
};

inline constexpr double kRankTolerance = 1e-10;

/// Gram-Schmidt with one re-orthogonalization pass. Columns whose residual
/// norm falls below kRankTolerance times the largest input column norm
/// raise RankDeficient.
Subspace orthonormalize(const Matrix& columns);

enum class Method { Gcr, Scr, Ols, Sir, Save, Phd };

std::string_view to_string(Method method);
/// Throws UnknownMethod for anything outside {gcr, scr, ols, sir, save, phd}.
Method parse_method(std::string_view name);

/// Which end of the spectrum carries the estimated directions.
enum class SpectrumConvention { Smallest, Largest, LargestMagnitude };

std::string_view to_string(SpectrumConvention convention);

struct EstimatorResult {
  Subspace subspace;
  Vector eigenvalues;  // ascending
  Method method;
  SpectrumConvention convention;
  // Unit-norm directions in original predictor units, one per column, before
  // orthonormalization.
  Matrix raw_directions;
};

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

/// Symmetric eigendecomposition, ascending, with each eigenvector's first
/// non-negligible component made positive.
SymmetricEigen symmetric_eigen(const Matrix& symmetric);

/// Flips sign so that the first component with |v_k| > 1e-12 * ||v|| is positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

/// Seeded 64-bit stream. Single-owner: copying is disabled; parallel work
/// derives children with child(task_index).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  RandomSource(RandomSource&&) = default;
  RandomSource& operator=(RandomSource&&) = default;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // standard normal
  RandomSource child(std::uint64_t task_index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer of (seed, value).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value);

}  // namespace sdr
