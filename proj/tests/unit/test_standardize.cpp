#include "oracles.hpp"
#include "sdr/standardize.hpp"

#include <doctest.h>

#include <cmath>

using namespace sdr;

TEST_CASE("two point moments") {
  Matrix x(2, 2);
  x << 0, 0, 2, 0;
  const Moments m = sample_moments(Dataset(x, Vector::Zero(2)));
  CHECK(m.mean[0] == 1.0);
  CHECK(m.mean[1] == 0.0);
  Matrix expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((m.covariance - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("repeated row has zero covariance") {
  Matrix x(6, 3);
  for (Index i = 0; i < 6; ++i) x.row(i) << 1.5, -2.0, 7.25;
  const Moments m = sample_moments(Dataset(x, Vector::Zero(6)));
  CHECK(m.covariance.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("moments match textbook sums") {
  RandomSource rng(17);
  const Matrix x = oracle::gaussian(rng, 5, 3);
  const Moments m = sample_moments(Dataset(x, Vector::Zero(5)));
  for (Index a = 0; a < 3; ++a) {
    double mean = 0.0;
    for (Index i = 0; i < 5; ++i) mean += x(i, a) / 5.0;
    CHECK(std::abs(m.mean[a] - mean) < 1e-12);
  }
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      double s = 0.0;
      for (Index i = 0; i < 5; ++i) s += (x(i, a) - m.mean[a]) * (x(i, b) - m.mean[b]);
      CHECK(std::abs(m.covariance(a, b) - s / 5.0) < 1e-12);
    }
  }
}

TEST_CASE("inverse square root of a diagonal matrix") {
  Matrix s(2, 2);
  s << 4, 0, 0, 9;
  const Matrix w = inverse_sqrt(s);
  CHECK(std::abs(w(0, 0) - 0.5) < 1e-10);
  CHECK(std::abs(w(1, 1) - 1.0 / 3.0) < 1e-10);
  CHECK(std::abs(w(0, 1)) < 1e-10);
  CHECK(std::abs(w(1, 0)) < 1e-10);
  CHECK((inverse_sqrt(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("inverse square root whitens a random SPD matrix") {
  RandomSource rng(23);
  const Matrix g = oracle::gaussian(rng, 4, 4);
  const Matrix s = g * g.transpose() + 0.5 * Matrix::Identity(4, 4);
  const Matrix w = inverse_sqrt(s);
  CHECK((w * s * w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inverse square root rejects singular input") {
  Matrix s(2, 2);
  s << 1, 1, 1, 1;
  CHECK_THROWS_AS(inverse_sqrt(s), Error);
  try {
    inverse_sqrt(s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularCovariance);
  }
}

TEST_CASE("whitening a standard sample is the identity map") {
  Matrix x(4, 2);
  x << 1, 1, -1, 1, 1, -1, -1, -1;
  const StandardizedData s = whiten(Dataset(x, Vector::Zero(4)));
  CHECK((s.z - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("whitened rows have zero mean and identity covariance") {
  Matrix x(4, 2);
  x << 0, 0, 2, 0, 1, 1, 1, -1;
  const StandardizedData s = whiten(Dataset(x, Vector::Zero(4)));
  const Vector mean = s.z.colwise().mean().transpose();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
  const Matrix cov = s.z.transpose() * s.z / 4.0;
  CHECK((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant column is singular") {
  Matrix x(5, 2);
  x << 1, 3, 2, 3, 3, 3, 4, 3, 5, 3;
  CHECK_THROWS_AS(whiten(Dataset(x, Vector::Zero(5))), Error);
}

TEST_CASE("whitening is affine equivariant up to rotation") {
  RandomSource rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 2 + trial % 4;
    const Index n = 30;
    const Matrix x = oracle::gaussian(rng, n, p);
    const Matrix a = oracle::random_invertible(rng, p);
    const Vector b = oracle::gaussian_vector(rng, p);
    Matrix xt = x * a.transpose();
    xt.rowwise() += b.transpose();
    const Matrix z1 = whiten(Dataset(x, Vector::Zero(n))).z;
    const Matrix z2 = whiten(Dataset(xt, Vector::Zero(n))).z;
    const Matrix g1 = z1 * z1.transpose() / static_cast<double>(n);
    const Matrix g2 = z2 * z2.transpose() / static_cast<double>(n);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-8);
  }
}
