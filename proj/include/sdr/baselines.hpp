#pragma once

// Moment-based comparison estimators: OLS, sliced inverse regression (SIR),
// sliced average variance estimation (SAVE) and principal Hessian
// directions (PHD). All work on whitened predictors and map their
// directions back with the inverse square root of the sample covariance.

#include "sdr/core.hpp"
#include "sdr/standardize.hpp"

#include <cstddef>
#include <vector>

namespace sdr {

/// Slice indices are 0-based here: slice_of[i] is in [0, slices).
struct SliceAssignment {
  std::vector<std::size_t> slice_of;
  std::vector<std::size_t> counts;
  std::size_t slices = 0;
};

inline constexpr std::size_t kDefaultSlices = 10;

/// Equal-count slicing on stably sorted responses: the observation with
/// 1-based rank r goes to slice ceil(r * H / n) - 1. Throws TooManySlices
/// when n < 2H.
SliceAssignment slice_response(const Vector& responses, std::size_t slices);

/// (1/n) sum_i z_i (y_i - ybar), the Z-scale covariance vector.
Vector ols_covariance_vector(const StandardizedData& s);

/// sum_h (n_h / n) m_h m_h^T with m_h the slice mean of z.
Matrix sir_matrix(const StandardizedData& s, const SliceAssignment& slices);

/// sum_h (n_h / n) (I - V_h)(I - V_h)^T with V_h the 1/n_h slice covariance of z.
Matrix save_matrix(const StandardizedData& s, const SliceAssignment& slices);

enum class PhdMode { Response, Residual };

std::string_view to_string(PhdMode mode);
PhdMode parse_phd_mode(std::string_view name);

/// (1/n) sum_i r_i z_i z_i^T where r_i is y_i - ybar (Response) or the
/// residual of the least-squares fit of y on z (Residual).
Matrix phd_matrix(const StandardizedData& s, PhdMode mode);

/// One direction; eigenvalues holds the squared norm of the Z-scale
/// covariance vector. Throws ConstantResponse when y does not vary.
EstimatorResult ols_fit(const Dataset& data);

EstimatorResult sir_fit(const Dataset& data, std::size_t slices, int dimension);
EstimatorResult save_fit(const Dataset& data, std::size_t slices, int dimension);
EstimatorResult phd_fit(const Dataset& data, int dimension, PhdMode mode = PhdMode::Response);

}  // namespace sdr
