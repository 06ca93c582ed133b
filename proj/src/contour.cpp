#include "sdr/contour.hpp"

#include "result_builder.hpp"
#include "sdr/standardize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <thread>

namespace sdr {

std::string_view to_string(Geometry geometry) {
  return geometry == Geometry::Raw ? "raw" : "std";
}

PairRule PairRule::threshold(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "pair threshold must be positive and finite");
  }
  return PairRule(Kind::Threshold, c, 0);
}

PairRule PairRule::top(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "top-m pair count must be >= 1");
  return PairRule(Kind::TopM, 0.0, m);
}

std::string PairRule::to_string() const {
  if (kind_ == Kind::TopM) return "top:" + std::to_string(count_);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, threshold_);
  return "thresh:" + std::string(buf, res.ptr);
}

PairRule PairRule::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::ConfigError, "pair rule must be top:<m> or thresh:<c>");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view value = text.substr(colon + 1);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (kind == "top") {
    std::size_t m = 0;
    auto [ptr, ec] = std::from_chars(first, last, m);
    if (ec != std::errc() || ptr != last) {
      throw Error(ErrorCode::ConfigError, "bad pair count '" + std::string(value) + "'");
    }
    return top(m);
  }
  if (kind == "thresh") {
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, c);
    if (ec != std::errc() || ptr != last) {
      throw Error(ErrorCode::ConfigError, "bad threshold '" + std::string(value) + "'");
    }
    return threshold(c);
  }
  throw Error(ErrorCode::ConfigError, "unknown pair rule '" + std::string(kind) + "'");
}

PairRule default_pair_rule(Index n, int q) {
  const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  const auto wanted = 2 * static_cast<std::size_t>(q) * static_cast<std::size_t>(n);
  return PairRule::top(std::max<std::size_t>(1, std::min(total, wanted)));
}

namespace {

std::size_t pair_count(Index n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

// Canonical position of pair (i, j), i > j.
std::size_t pair_offset(Index i) {
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(i - 1) / 2;
}

double dot_rows(const Matrix& m, Index r1, Index r2, Index anchor) {
  double s = 0.0;
  for (Index a = 0; a < m.cols(); ++a) {
    s += (m(r1, a) - m(anchor, a)) * (m(r2, a) - m(anchor, a));
  }
  return s;
}

double squared_distance_to_line(const Vector& point, const Vector& a, const Vector& b) {
  double rr = 0.0;
  double rd = 0.0;
  double dd = 0.0;
  for (Index k = 0; k < point.size(); ++k) {
    const double r = point[k] - a[k];
    const double d = b[k] - a[k];
    rr += r * r;
    rd += r * d;
    dd += d * d;
  }
  if (!(std::sqrt(dd) > kDegenerateLength)) {
    throw Error(ErrorCode::DegeneratePair, "line endpoints coincide");
  }
  return rr - rd * rd / dd;
}

void check_pair(Index i, Index j, Index n) {
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw Error(ErrorCode::InvalidArgument, "pair indices must be distinct rows");
  }
}

// Per-anchor scan shared by tube_variances: the anchor's difference vectors
// and their squared norms are computed once, then reused for every partner j.
// Member tests reduce to the same arithmetic as squared_distance_to_line.
void scan_anchor(Index i, const Matrix& points, const Vector& y, double radius_sq,
                 PairScore* out) {
  const Index n = points.rows();
  const Index p = points.cols();
  std::vector<double> diff(static_cast<std::size_t>(n * p));
  std::vector<double> norms(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Index a = 0; a < p; ++a) {
      const double r = points(k, a) - points(i, a);
      diff[static_cast<std::size_t>(k * p + a)] = r;
      s += r * r;
    }
    norms[static_cast<std::size_t>(k)] = s;
  }
  std::vector<char> member(static_cast<std::size_t>(n));

  for (Index j = 0; j < i; ++j) {
    PairScore& score = out[j];
    score.i = i;
    score.j = j;
    const double dd = norms[static_cast<std::size_t>(j)];
    if (!(std::sqrt(dd) > kDegenerateLength)) {
      score.degenerate = true;
      score.value = 0.0;
      continue;
    }
    const double* dj = &diff[static_cast<std::size_t>(j * p)];
    double sum = 0.0;
    std::size_t count = 0;
    for (Index k = 0; k < n; ++k) {
      bool in = (k == i || k == j);
      if (!in) {
        const double* rk = &diff[static_cast<std::size_t>(k * p)];
        double rd = 0.0;
        for (Index a = 0; a < p; ++a) rd += rk[a] * dj[a];
        in = norms[static_cast<std::size_t>(k)] - rd * rd / dd < radius_sq;
      }
      member[static_cast<std::size_t>(k)] = in;
      if (in) {
        sum += y[k];
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (member[static_cast<std::size_t>(k)]) ss += (y[k] - mean) * (y[k] - mean);
    }
    score.value = ss / static_cast<double>(count);
  }
}

void check_points(const Matrix& points, const Vector& responses) {
  if (points.rows() != responses.size()) {
    throw Error(ErrorCode::DimensionMismatch, "points and responses differ in length");
  }
  if (points.rows() < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 points");
}

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "tube radius must be positive and finite");
  }
}

}  // namespace

double line_distance(const Vector& point, const Vector& a, const Vector& b) {
  if (point.size() != a.size() || a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "line_distance operands differ in length");
  }
  return std::sqrt(std::max(0.0, squared_distance_to_line(point, a, b)));
}

std::vector<Index> cylinder_members(Index i, Index j, const Matrix& points, double radius) {
  check_pair(i, j, points.rows());
  check_radius(radius);
  const Vector a = points.row(i).transpose();
  const Vector b = points.row(j).transpose();
  const double radius_sq = radius * radius;
  std::vector<Index> members;
  for (Index k = 0; k < points.rows(); ++k) {
    if (k == i || k == j) {
      members.push_back(k);
      continue;
    }
    if (squared_distance_to_line(points.row(k).transpose(), a, b) < radius_sq) {
      members.push_back(k);
    }
  }
  return members;
}

double tube_variance(Index i, Index j, const Matrix& points, const Vector& responses,
                     double radius) {
  check_points(points, responses);
  const std::vector<Index> members = cylinder_members(i, j, points, radius);
  double sum = 0.0;
  for (Index k : members) sum += responses[k];
  const double mean = sum / static_cast<double>(members.size());
  double ss = 0.0;
  for (Index k : members) ss += (responses[k] - mean) * (responses[k] - mean);
  return ss / static_cast<double>(members.size());
}

std::vector<PairScore> tube_variances(const Matrix& points, const Vector& responses,
                                      double radius, unsigned threads) {
  check_points(points, responses);
  check_radius(radius);
  const Index n = points.rows();
  std::vector<PairScore> scores(pair_count(n));
  const double radius_sq = radius * radius;

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (Index i = 1; i < n; ++i) scan_anchor(i, points, responses, radius_sq, &scores[pair_offset(i)]);
    return scores;
  }
  // Anchors are dealt round-robin; each writes a disjoint slice of scores,
  // so the result does not depend on the worker count.
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = 1 + static_cast<Index>(w); i < n; i += static_cast<Index>(workers)) {
        scan_anchor(i, points, responses, radius_sq, &scores[pair_offset(i)]);
      }
    });
  }
  pool.clear();
  return scores;
}

std::vector<PairScore> response_gaps(const Matrix& points, const Vector& responses) {
  check_points(points, responses);
  const Index n = points.rows();
  std::vector<PairScore> scores;
  scores.reserve(pair_count(n));
  for (Index i = 1; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      PairScore s;
      s.i = i;
      s.j = j;
      s.degenerate = !(std::sqrt(dot_rows(points, j, j, i)) > kDegenerateLength);
      s.value = s.degenerate ? 0.0 : std::abs(responses[i] - responses[j]);
      scores.push_back(s);
    }
  }
  return scores;
}

ContourMoment accumulate_selected(const Matrix& points, std::vector<PairScore> scores,
                                  const PairRule& rule) {
  const Index n = points.rows();
  const Index p = points.cols();
  if (scores.size() != pair_count(n)) {
    throw Error(ErrorCode::DimensionMismatch, "score list does not cover every pair");
  }
  ContourMoment out;
  std::vector<std::size_t> candidates;
  candidates.reserve(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k].degenerate) {
      ++out.degenerate_pairs;
    } else {
      candidates.push_back(k);
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::EmptyAfterDegenerate, "every pair of rows is a duplicate");
  }

  if (rule.kind() == PairRule::Kind::Threshold) {
    for (std::size_t k : candidates) {
      if (scores[k].value <= rule.threshold_value()) scores[k].selected = true;
    }
  } else {
    if (rule.count() > scores.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "top-m count " + std::to_string(rule.count()) + " exceeds n(n-1)/2 = " +
                      std::to_string(scores.size()));
    }
    const std::size_t m = std::min(rule.count(), candidates.size());
    auto before = [&](std::size_t a, std::size_t b) {
      if (scores[a].value != scores[b].value) return scores[a].value < scores[b].value;
      return a < b;
    };
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(m - 1),
                     candidates.end(), before);
    for (std::size_t k = 0; k < m; ++k) scores[candidates[k]].selected = true;
  }

  Matrix f = Matrix::Zero(p, p);
  Vector d(p);
  for (const PairScore& s : scores) {
    if (!s.selected) continue;
    ++out.pairs_used;
    for (Index a = 0; a < p; ++a) d[a] = points(s.j, a) - points(s.i, a);
    for (Index a = 0; a < p; ++a) {
      for (Index b = a; b < p; ++b) f(a, b) += d[a] * d[b];
    }
  }
  if (out.pairs_used == 0) {
    throw Error(ErrorCode::NoPairsSelected, "no pair passes the contour threshold");
  }
  const double norm = static_cast<double>(pair_count(n));
  for (Index a = 0; a < p; ++a) {
    for (Index b = a; b < p; ++b) {
      f(a, b) /= norm;
      f(b, a) = f(a, b);
    }
  }
  out.matrix = std::move(f);
  out.pair_scores = std::move(scores);
  return out;
}

ContourMoment accumulate_fhat(const Matrix& points, const Vector& responses,
                              const GcrConfig& config) {
  const PairRule rule = config.pairs ? *config.pairs
                                     : default_pair_rule(points.rows(), config.dimension);
  return accumulate_selected(points,
                             tube_variances(points, responses, config.tube_radius, config.threads),
                             rule);
}

namespace {

EstimatorResult smallest_directions(const Matrix& target, const Matrix& inv_sqrt, int q,
                                    Method method) {
  const SymmetricEigen eig = symmetric_eigen(0.5 * (target + target.transpose()));
  return detail::build_result(inv_sqrt, eig.vectors.leftCols(q), eig.values, method,
                              SpectrumConvention::Smallest);
}

}  // namespace

EstimatorResult gcr_fit(const Dataset& data, const GcrConfig& config) {
  detail::check_dimension(config.dimension, data.dims() - 1);
  check_radius(config.tube_radius);
  const StandardizedData s = whiten(data);
  if (config.geometry == Geometry::Standardized) {
    const ContourMoment moment = accumulate_fhat(s.z, s.response, config);
    return smallest_directions(moment.matrix, s.inv_sqrt, config.dimension, Method::Gcr);
  }
  const ContourMoment moment = accumulate_fhat(data.predictors(), data.response(), config);
  const Matrix target = s.inv_sqrt * moment.matrix * s.inv_sqrt;
  return smallest_directions(target, s.inv_sqrt, config.dimension, Method::Gcr);
}

EstimatorResult scr_fit(const Dataset& data, int dimension, std::optional<PairRule> pairs) {
  detail::check_dimension(dimension, data.dims() - 1);
  const StandardizedData s = whiten(data);
  const PairRule rule = pairs ? *pairs : default_pair_rule(data.rows(), dimension);
  const ContourMoment moment = accumulate_selected(s.z, response_gaps(s.z, s.response), rule);
  return smallest_directions(moment.matrix, s.inv_sqrt, dimension, Method::Scr);
}

}  // namespace sdr
