#include "oracles.hpp"
#include "sdr/core.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace sdr;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an sdr::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("dataset accepts well formed input") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  Vector y(3);
  y << 1, 0, -1;
  const Dataset d = validate_dataset(x, y);
  CHECK(d.rows() == 3);
  CHECK(d.dims() == 2);
}

TEST_CASE("dataset rejects length mismatch and non-finite entries") {
  Matrix x = Matrix::Ones(3, 2);
  CHECK(code_of([&] { validate_dataset(x, Vector::Ones(4)); }) == ErrorCode::DimensionMismatch);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { validate_dataset(x, Vector::Ones(3)); }) == ErrorCode::NonFiniteEntry);
  Vector y = Vector::Ones(3);
  y[2] = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { validate_dataset(Matrix::Ones(3, 2), y); }) == ErrorCode::NonFiniteEntry);
  CHECK(code_of([&] { validate_dataset(Matrix::Ones(1, 2), Vector::Ones(1)); }) ==
        ErrorCode::TooFewRows);
}

TEST_CASE("orthonormalize examples") {
  const Matrix id = Matrix::Identity(3, 3).leftCols(2);
  CHECK((orthonormalize(id).basis() - id).cwiseAbs().maxCoeff() < 1e-15);

  Matrix col(2, 1);
  col << 3, 4;
  const Matrix b = orthonormalize(col).basis();
  CHECK(std::abs(std::abs(b(0, 0)) - 0.6) < 1e-15);
  CHECK(std::abs(std::abs(b(1, 0)) - 0.8) < 1e-15);
  CHECK(b(0, 0) * b(1, 0) > 0.0);

  Matrix twin(3, 2);
  twin << 1, 1, 2, 2, 3, 3;
  CHECK(code_of([&] { orthonormalize(twin); }) == ErrorCode::RankDeficient);
}

TEST_CASE("orthonormalize preserves the span") {
  RandomSource rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 2 + trial % 6;
    const Index d = 1 + trial % p;
    const Matrix m = oracle::gaussian(rng, p, d);
    const Subspace s = orthonormalize(m);
    const Matrix gram = s.basis().transpose() * s.basis();
    CHECK((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.projection() - oracle::projector(m)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("subspace rejects a non-orthonormal basis") {
  Matrix b(2, 1);
  b << 1, 1;
  CHECK(code_of([&] { Subspace s(b); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("random source is reproducible and seed sensitive") {
  RandomSource a(42);
  RandomSource b(42);
  RandomSource c(43);
  int differing = 0;
  for (int k = 0; k < 200; ++k) {
    const double ua = a.uniform();
    CHECK(ua == b.uniform());
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
    if (ua != c.uniform()) ++differing;
  }
  CHECK(differing == 200);
  for (int k = 0; k < 100; ++k) CHECK(a.normal() == b.normal());

  RandomSource k1 = a.child(7);
  RandomSource k2 = b.child(7);
  RandomSource k3 = a.child(8);
  CHECK(k1.next_u64() == k2.next_u64());
  CHECK(k1.seed() != k3.seed());
}

TEST_CASE("normal draws have unit scale") {
  RandomSource rng(5);
  double s = 0.0;
  double ss = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::Gcr, Method::Scr, Method::Ols, Method::Sir, Method::Save, Method::Phd}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(code_of([] { parse_method("lasso"); }) == ErrorCode::UnknownMethod);
}

TEST_CASE("symmetric eigen is ascending with a positive leading component") {
  RandomSource rng(3);
  const Matrix g = oracle::gaussian(rng, 5, 5);
  const Matrix s = g + g.transpose();
  const SymmetricEigen e = symmetric_eigen(s);
  for (Index k = 1; k < 5; ++k) CHECK(e.values[k - 1] <= e.values[k]);
  for (Index k = 0; k < 5; ++k) {
    Index first = 0;
    while (std::abs(e.vectors(first, k)) < 1e-12) ++first;
    CHECK(e.vectors(first, k) > 0.0);
  }
  CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("checksum reacts to a single changed value") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  Vector y(3);
  y << 1, 2, 3;
  const auto h = checksum(Dataset(x, y));
  CHECK(h == checksum(Dataset(x, y)));
  y[1] = std::nextafter(2.0, 3.0);
  CHECK(h != checksum(Dataset(x, y)));
}
