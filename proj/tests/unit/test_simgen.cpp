#include "oracles.hpp"
#include "sdr/metrics.hpp"
#include "sdr/simgen.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

using namespace sdr;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

MethodSpec spec_of(Method m) {
  MethodSpec s;
  s.method = m;
  return s;
}

ComparisonConfig small_config() {
  ComparisonConfig c;
  c.designs = {DesignSpec{.design = Design::Ex51, .n = 40}, DesignSpec{.design = Design::Ex53, .n = 40}};
  c.sigmas = {0.1, 0.5};
  c.methods = {spec_of(Method::Gcr), spec_of(Method::Sir), spec_of(Method::Phd)};
  c.methods[1].slices = 4;
  c.runs = 6;
  c.base_seed = 99;
  return c;
}

}  // namespace

TEST_CASE("regression functions") {
  CHECK(regression_function(Design::Ex51, vec({1, 2, 0.3, -4})) == 3.0);
  CHECK(std::abs(regression_function(Design::Ex52, vec({0, 0, 5, 5})) - 1.0) < 1e-15);
  CHECK(regression_function(Design::Ex21, vec({9, -3})) == 9.0);
  const double x2 = 0.4;
  CHECK(regression_function(Design::Ex53, vec({0.9, x2, 0.1, 0.1})) ==
        std::sin(std::pow(std::numbers::pi * x2 + 1.0, 2)));
}

TEST_CASE("noise-free responses follow the formula") {
  for (Design d : {Design::Ex21, Design::Ex51, Design::Ex52, Design::Ex53}) {
    const GeneratedData g = generate({.design = d, .n = 50, .sigma = 0.0, .seed = 5});
    CHECK(g.data.dims() == design_dims(d));
    for (Index i = 0; i < 50; ++i) {
      CHECK(g.data.response()[i] ==
            regression_function(d, g.data.predictors().row(i).transpose()));
    }
  }
}

TEST_CASE("truth subspaces") {
  CHECK(truth_for(Design::Ex51).q == 2);
  CHECK(truth_for(Design::Ex53).q == 1);
  CHECK(subspace_distance(truth_for(Design::Ex52).true_subspace,
                          Subspace(oracle::unit_columns(4, {0, 1}))) < 1e-15);
  CHECK(subspace_distance(truth_for(Design::Ex21).true_subspace,
                          Subspace(oracle::unit_columns(2, {1}))) < 1e-15);
  CHECK(subspace_distance(truth_for(Design::Ex53).true_subspace,
                          Subspace(oracle::unit_columns(4, {1}))) < 1e-15);
}

TEST_CASE("corner-cut cube sampling") {
  const double kept = 1.0 - std::pow(0.7, 4);
  CHECK(std::abs(kept - 0.7599) < 1e-12);

  RandomSource rng(1234);
  const int draws = 100000;
  int accepted = 0;
  for (int k = 0; k < draws; ++k) {
    bool corner = true;
    for (int a = 0; a < 4; ++a) corner = (rng.uniform() <= 0.7) && corner;
    if (!corner) ++accepted;
  }
  CHECK(std::abs(static_cast<double>(accepted) / draws - kept) < 0.01);

  const GeneratedData g = generate({.design = Design::Ex53, .n = 100000, .sigma = 0.1, .seed = 8});
  const Matrix& x = g.data.predictors();
  Index below = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK_FALSE((x.row(i).array() <= 0.7).all());
    if (x(i, 0) <= 0.7) ++below;
  }
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
  // P(x1 <= 0.7 | outside corner) = (0.7 - 0.7^4) / (1 - 0.7^4)
  const double expected = (0.7 - std::pow(0.7, 4)) / kept;
  CHECK(std::abs(static_cast<double>(below) / 100000.0 - expected) < 0.01);
}

TEST_CASE("generation is deterministic and validates input") {
  const GeneratedData a = generate({.design = Design::Ex52, .n = 30, .sigma = 0.4, .seed = 77});
  const GeneratedData b = generate({.design = Design::Ex52, .n = 30, .sigma = 0.4, .seed = 77});
  const GeneratedData c = generate({.design = Design::Ex52, .n = 30, .sigma = 0.4, .seed = 78});
  CHECK(checksum(a.data) == checksum(b.data));
  CHECK(checksum(a.data) != checksum(c.data));
  CHECK_THROWS_AS(generate({.design = Design::Ex51, .n = 9}), Error);
  CHECK_THROWS_AS(generate({.design = Design::Ex51, .n = 20, .sigma = -1.0}), Error);
}

TEST_CASE("design names") {
  for (Design d : {Design::Ex21, Design::Ex51, Design::Ex52, Design::Ex53}) {
    CHECK(parse_design(to_string(d)) == d);
  }
  CHECK_THROWS_AS(parse_design("ex99"), Error);
}

TEST_CASE("comparison is deterministic across thread counts") {
  ComparisonConfig c = small_config();
  const SimulationReport r1 = run_comparison(c);
  c.threads = 3;
  const SimulationReport r2 = run_comparison(c);
  REQUIRE(r1.rows.size() == 2 * 2 * 3);
  for (std::size_t k = 0; k < r1.rows.size(); ++k) {
    CHECK(r1.rows[k].method == r2.rows[k].method);
    CHECK(r1.rows[k].mean_dist == r2.rows[k].mean_dist);
    CHECK(r1.rows[k].spread == r2.rows[k].spread);
    CHECK(r1.rows[k].runs == 6);
    CHECK(r1.rows[k].spread >= 0.0);
    CHECK(r1.rows[k].mean_dist <= std::sqrt(2.0));
  }
  CHECK(r1.rows[0].design == Design::Ex51);
  CHECK(r1.rows[0].sigma == 0.1);
  CHECK(r1.rows[0].method == "gcr");
  CHECK(r1.rows[3].sigma == 0.5);
  CHECK(r1.rows[6].design == Design::Ex53);
}

TEST_CASE("every method in a run sees the same sample") {
  std::map<std::tuple<Design, double, std::size_t>, std::vector<std::uint64_t>> seen;
  ComparisonConfig c = small_config();
  c.threads = 2;
  run_comparison(c, [&](Design d, double sigma, std::size_t run, const MethodSpec&,
                        std::uint64_t sum) { seen[{d, sigma, run}].push_back(sum); });
  CHECK(seen.size() == 2 * 2 * 6);
  for (const auto& [key, sums] : seen) {
    REQUIRE(sums.size() == 3);
    CHECK(sums[0] == sums[1]);
    CHECK(sums[1] == sums[2]);
    const auto& [d, sigma, run] = key;
    const GeneratedData g = generate(
        {.design = d, .n = 40, .sigma = sigma, .seed = derive_run_seed(c.base_seed, d, sigma, run)});
    CHECK(checksum(g.data) == sums[0]);
  }
}

TEST_CASE("a single run reports that fit's distance") {
  ComparisonConfig c;
  c.designs = {DesignSpec{.design = Design::Ex52, .n = 60}};
  c.sigmas = {0.4};
  c.methods = {spec_of(Method::Save)};
  c.runs = 1;
  const SimulationReport r = run_comparison(c);
  const GeneratedData g = generate({.design = Design::Ex52, .n = 60, .sigma = 0.4,
                                    .seed = derive_run_seed(c.base_seed, Design::Ex52, 0.4, 0)});
  const double d = subspace_distance(save_fit(g.data, kDefaultSlices, 2).subspace,
                                     g.truth.true_subspace);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].mean_dist == d);
  CHECK(r.rows[0].spread == 0.0);
}

TEST_CASE("failed fits are excluded and counted") {
  ComparisonConfig c;
  c.designs = {DesignSpec{.design = Design::Ex51, .n = 12}};
  c.sigmas = {0.1};
  MethodSpec bad = spec_of(Method::Sir);
  bad.slices = 7;
  c.methods = {bad, spec_of(Method::Phd)};
  c.runs = 3;
  const SimulationReport r = run_comparison(c);
  CHECK(r.rows[0].failures == 3);
  CHECK_FALSE(r.rows[0].valid);
  CHECK(r.rows[1].failures == 0);
  CHECK(r.rows[1].valid);
}

TEST_CASE("presets") {
  CHECK(preset("table1").methods.size() * preset("table1").sigmas.size() == 12);
  CHECK(preset("table3").methods.size() * preset("table3").sigmas.size() == 15);
  CHECK(preset("table2").designs[0].design == Design::Ex52);
  CHECK(preset("table3").sigmas == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(preset("table1").runs == 500);
  CHECK_THROWS_AS(preset("table4"), Error);
}

TEST_CASE("empty configuration is rejected") {
  ComparisonConfig c = small_config();
  c.methods.clear();
  CHECK_THROWS_AS(run_comparison(c), Error);
}
