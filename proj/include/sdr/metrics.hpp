#pragma once

#include "sdr/core.hpp"

namespace sdr {

/// Spectral norm of P1 - P2 for the orthogonal projections onto s1 and s2.
/// Lies in [0, 1] when the dimensions match. Throws AmbientMismatch.
double subspace_distance(const Subspace& s1, const Subspace& s2);

/// Eigen-scree summary with an advisory structural dimension.
struct ScreeReport {
  Vector eigenvalues;  // ascending; magnitudes for LargestMagnitude results
  Vector gaps;         // gaps[k] = eigenvalues[k+1] / max(eigenvalues[k], 1e-300)
  int suggested_q = 1;
  bool flat = false;   // no consecutive ratio above 1: nothing separates
  SpectrumConvention convention = SpectrumConvention::Smallest;
};

/// The largest consecutive ratio splits the spectrum. For Smallest results
/// the suggestion counts the eigenvalues below the split; otherwise it
/// counts those above. Ties pick the first split. Flat spectra suggest 1.
ScreeReport scree(const Vector& eigenvalues, SpectrumConvention convention);
ScreeReport scree(const EstimatorResult& result);

}  // namespace sdr
