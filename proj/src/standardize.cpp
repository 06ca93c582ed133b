#include "sdr/standardize.hpp"

#include <algorithm>
#include <cmath>

namespace sdr {

Moments sample_moments(const Dataset& data) {
  const Matrix& x = data.predictors();
  const Index n = x.rows();
  const Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector mean = x.colwise().sum().transpose() * inv_n;
  const Matrix centered = x.rowwise() - mean.transpose();

  Matrix cov(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = a; b < p; ++b) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += centered(i, a) * centered(i, b);
      cov(a, b) = s * inv_n;
      cov(b, a) = cov(a, b);
    }
  }
  return {std::move(mean), std::move(cov)};
}

Matrix inverse_sqrt(const Matrix& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "covariance must be square");
  }
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, covariance.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidArgument, "covariance is not symmetric");
  }
  const SymmetricEigen eig = symmetric_eigen(covariance);
  const double largest = eig.values.maxCoeff();
  const double smallest = eig.values.minCoeff();
  if (!(largest > 0.0) || !(smallest > kSingularityRatio * largest)) {
    throw Error(ErrorCode::SingularCovariance,
                "covariance is singular or nearly so (eigenvalue ratio " +
                    std::to_string(largest > 0.0 ? smallest / largest : 0.0) +
                    "); drop or transform collinear predictors");
  }
  const Vector scale = eig.values.array().rsqrt();
  Matrix w = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (w + w.transpose());
}

StandardizedData whiten(const Dataset& data) {
  Moments m = sample_moments(data);
  Matrix w = inverse_sqrt(m.covariance);
  Matrix z = (data.predictors().rowwise() - m.mean.transpose()) * w;
  return {std::move(z), std::move(m.mean), std::move(m.covariance), std::move(w),
          data.response()};
}

}  // namespace sdr
