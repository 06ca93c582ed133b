#include "sdr/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sdr {

double subspace_distance(const Subspace& s1, const Subspace& s2) {
  if (s1.ambient() != s2.ambient()) {
    throw Error(ErrorCode::AmbientMismatch,
                "subspaces live in R^" + std::to_string(s1.ambient()) + " and R^" +
                    std::to_string(s2.ambient()));
  }
  const Matrix diff = s1.projection() - s2.projection();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.transpose()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ScreeReport scree(const Vector& eigenvalues, SpectrumConvention convention) {
  ScreeReport out;
  out.convention = convention;
  Vector values = eigenvalues;
  if (convention == SpectrumConvention::LargestMagnitude) values = values.cwiseAbs();
  std::sort(values.data(), values.data() + values.size());
  out.eigenvalues = values;

  const Index p = values.size();
  if (p < 2) {
    out.gaps = Vector(0);
    out.flat = true;
    out.suggested_q = 1;
    return out;
  }
  out.gaps.resize(p - 1);
  for (Index k = 0; k + 1 < p; ++k) {
    out.gaps[k] = values[k + 1] / std::max(values[k], 1e-300);
  }
  Index split = 0;
  for (Index k = 1; k < out.gaps.size(); ++k) {
    if (out.gaps[k] > out.gaps[split]) split = k;
  }
  if (!(out.gaps[split] > 1.0 + 1e-9)) {
    out.flat = true;
    out.suggested_q = 1;
    return out;
  }
  const auto below = static_cast<int>(split + 1);
  out.suggested_q = convention == SpectrumConvention::Smallest ? below
                                                               : static_cast<int>(p) - below;
  return out;
}

ScreeReport scree(const EstimatorResult& result) {
  return scree(result.eigenvalues, result.convention);
}

}  // namespace sdr
