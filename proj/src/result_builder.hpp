#pragma once

#include "sdr/core.hpp"

namespace sdr::detail {

/// Maps whitened-space directions back by inv_sqrt, keeps them as unit-norm
/// raw directions and orthonormalizes their span.
inline EstimatorResult build_result(const Matrix& inv_sqrt, const Matrix& whitened_directions,
                                    Vector eigenvalues, Method method,
                                    SpectrumConvention convention) {
  Matrix mapped = inv_sqrt * whitened_directions;
  Matrix raw = mapped;
  for (Index k = 0; k < raw.cols(); ++k) {
    raw.col(k).normalize();
    canonicalize_sign(raw.col(k));
  }
  Subspace subspace = orthonormalize(mapped);
  return {std::move(subspace), std::move(eigenvalues), method, convention, std::move(raw)};
}

inline void check_dimension(int q, Index max_q) {
  if (q < 1) {
    throw Error(ErrorCode::InvalidArgument, "structural dimension must be >= 1");
  }
  if (q > max_q) {
    throw Error(ErrorCode::DimensionTooLarge,
                "structural dimension " + std::to_string(q) + " exceeds " +
                    std::to_string(max_q));
  }
}

}  // namespace sdr::detail
