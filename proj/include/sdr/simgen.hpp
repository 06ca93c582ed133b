#pragma once

// Synthetic regression designs and the Monte Carlo comparison harness.
//
//   ex21: X ~ N(0, I_2),            Y = X2^2 + sigma e
//   ex51: X ~ N(0, I_4),            Y = X1^2 + X2 + sigma e
//   ex52: X ~ N(0, I_4),            Y = X1 / (0.5 + (X2 + 1.5)^2) + (1 + X2)^2 + sigma e
//   ex53: X ~ U([0,1]^4 minus {x : all x_i <= 0.7}),  Y = sin((pi X2 + 1)^2) + sigma e
//
// with e standard normal and independent of X.

#include "sdr/baselines.hpp"
#include "sdr/contour.hpp"
#include "sdr/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sdr {

enum class Design { Ex21, Ex51, Ex52, Ex53 };

std::string_view to_string(Design design);
Design parse_design(std::string_view name);
Index design_dims(Design design);

struct DesignSpec {
  Design design = Design::Ex51;
  Index n = 100;
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

struct TruthSpec {
  Subspace true_subspace;
  int q;
};

TruthSpec truth_for(Design design);

/// Noise-free regression function of the design at x.
double regression_function(Design design, const Vector& x);

/// Lower corner removed from the unit cube in ex53.
inline constexpr double kCornerCut = 0.7;

struct GeneratedData {
  Dataset data;
  TruthSpec truth;
};

/// Deterministic in spec.seed. Throws InvalidArgument for n < 10 or sigma < 0.
GeneratedData generate(const DesignSpec& spec);

/// An estimator plus its tuning, as run by the harness and the CLI.
struct MethodSpec {
  Method method = Method::Gcr;
  std::size_t slices = kDefaultSlices;
  PhdMode phd_mode = PhdMode::Response;
  double tube_radius = kDefaultTubeRadius;
  std::optional<PairRule> pairs;
  Geometry geometry = Geometry::Standardized;
  std::string label;  // overrides the derived name when set

  /// Method name, or the label when one is set.
  std::string name() const;
};

EstimatorResult fit_method(const Dataset& data, const MethodSpec& spec, int dimension);

struct ComparisonConfig {
  std::vector<DesignSpec> designs;  // templates: design and n are used, seed is not
  std::vector<double> sigmas;
  std::vector<MethodSpec> methods;
  std::size_t runs = 500;
  std::uint64_t base_seed = 20030901;
  unsigned threads = 1;
};

struct ReportRow {
  Design design;
  double sigma;
  std::string method;
  double mean_dist;
  double spread;  // across-run standard deviation (divisor runs - 1)
  std::size_t runs;
  std::size_t failures;
  bool valid;     // failures <= 1% of runs
};

struct SimulationReport {
  std::vector<ReportRow> rows;  // ordered by design, sigma, method
  ComparisonConfig config;
};

/// Seed of the dataset shared by every method in one (design, sigma, run) cell.
std::uint64_t derive_run_seed(std::uint64_t base_seed, Design design, double sigma,
                              std::size_t run);

/// Called once per (run, method) with the checksum of the data the method saw.
using RunObserver =
    std::function<void(Design, double sigma, std::size_t run, const MethodSpec&, std::uint64_t)>;

/// For every (design, sigma, run) one dataset is generated and every method
/// is fitted to it. Estimator errors are counted per cell and excluded.
SimulationReport run_comparison(const ComparisonConfig& config,
                                const RunObserver& observer = {});

/// table1 (ex51), table2 (ex52), table3 (ex53). Throws ConfigError otherwise.
ComparisonConfig preset(std::string_view name);

}  // namespace sdr
