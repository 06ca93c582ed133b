#pragma once

#include "sdr/core.hpp"

namespace sdr {

struct Moments {
  Vector mean;
  Matrix covariance;  // divisor n
};

/// Sample mean and 1/n-divisor covariance of the predictors.
Moments sample_moments(const Dataset& data);

inline constexpr double kSingularityRatio = 1e-10;

/// Symmetric inverse square root V diag(lambda^-1/2) V^T. Throws
/// SingularCovariance when the smallest eigenvalue is not above
/// kSingularityRatio times the largest.
Matrix inverse_sqrt(const Matrix& covariance);

struct StandardizedData {
  Matrix z;           // n x p, rows z_i = inv_sqrt (x_i - mean)
  Vector mean;
  Matrix covariance;
  Matrix inv_sqrt;
  Vector response;
};

StandardizedData whiten(const Dataset& data);

}  // namespace sdr
