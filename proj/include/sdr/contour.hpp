#pragma once

// General contour regression. Every pair of sample points defines a line;
// the response variance inside a thin cylinder around that line measures
// how much the regression surface changes along it. Pairs with the least
// variation are treated as contour directions, their outer products are
// averaged into a U-statistic, and the eigenvectors for the smallest
// eigenvalues of the whitened average span the estimated central subspace.
//
// Pair indexing: pairs are (i, j) with i > j, enumerated in lexicographic
// order (1,0), (2,0), (2,1), (3,0), ... The first index anchors the line.

#include "sdr/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sdr {

enum class Geometry { Raw, Standardized };

std::string_view to_string(Geometry geometry);

/// Contour identifier: keep pairs whose score is <= a threshold, or the m
/// pairs with the smallest score.
class PairRule {
 public:
  enum class Kind { Threshold, TopM };

  static PairRule threshold(double c);
  static PairRule top(std::size_t m);

  Kind kind() const noexcept { return kind_; }
  double threshold_value() const noexcept { return threshold_; }
  std::size_t count() const noexcept { return count_; }

  /// "thresh:<c>" or "top:<m>".
  std::string to_string() const;
  static PairRule parse(std::string_view text);

 private:
  PairRule(Kind kind, double c, std::size_t m) : kind_(kind), threshold_(c), count_(m) {}

  Kind kind_;
  double threshold_;
  std::size_t count_;
};

/// 2qn pairs, capped at n(n-1)/2.
PairRule default_pair_rule(Index n, int q);

/// Tube radius in the units of the geometry space.
inline constexpr double kDefaultTubeRadius = 1.0;

struct GcrConfig {
  double tube_radius = kDefaultTubeRadius;
  std::optional<PairRule> pairs;  // empty: default_pair_rule(n, dimension)
  int dimension = 1;
  Geometry geometry = Geometry::Standardized;
  unsigned threads = 1;  // workers for the pairwise variance scan
};

struct PairScore {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
  bool degenerate = false;  // rows i and j coincide
  bool selected = false;
};

struct ContourMoment {
  Matrix matrix;  // (1 / C(n,2)) * sum over selected pairs of (x_j - x_i)(x_j - x_i)^T
  std::size_t pairs_used = 0;
  std::size_t degenerate_pairs = 0;
  std::vector<PairScore> pair_scores;  // every pair, canonical order
};

inline constexpr double kDegenerateLength = 1e-12;

/// Euclidean distance from point to the infinite line through a and b.
/// Throws DegeneratePair when ||b - a|| <= kDegenerateLength.
double line_distance(const Vector& point, const Vector& a, const Vector& b);

/// Indices k with distance(points.row(k), line(i, j)) < radius; always
/// includes i and j.
std::vector<Index> cylinder_members(Index i, Index j, const Matrix& points, double radius);

/// 1/#C-divisor variance of the responses of the cylinder members.
double tube_variance(Index i, Index j, const Matrix& points, const Vector& responses,
                     double radius);

/// Tube variance of every pair in canonical order. Degenerate pairs carry
/// value 0 and degenerate = true.
std::vector<PairScore> tube_variances(const Matrix& points, const Vector& responses,
                                      double radius, unsigned threads = 1);

/// |y_i - y_j| for every pair in canonical order (simple contour identifier).
std::vector<PairScore> response_gaps(const Matrix& points, const Vector& responses);

/// Applies the rule to pre-computed scores and accumulates the selected
/// outer products of point differences. Top-m ties break by canonical order.
ContourMoment accumulate_selected(const Matrix& points, std::vector<PairScore> scores,
                                  const PairRule& rule);

/// Tube-variance U-statistic on the given points. config.geometry is not
/// consulted here; callers pass raw or whitened points.
ContourMoment accumulate_fhat(const Matrix& points, const Vector& responses,
                              const GcrConfig& config);

EstimatorResult gcr_fit(const Dataset& data, const GcrConfig& config);

/// Simple contour regression: pairs are scored by |y_i - y_j|.
EstimatorResult scr_fit(const Dataset& data, int dimension,
                        std::optional<PairRule> pairs = std::nullopt);

}  // namespace sdr
