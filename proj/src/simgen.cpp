#include "sdr/simgen.hpp"

#include "sdr/metrics.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

namespace sdr {

std::string_view to_string(Design design) {
  switch (design) {
    case Design::Ex21: return "ex21";
    case Design::Ex51: return "ex51";
    case Design::Ex52: return "ex52";
    case Design::Ex53: return "ex53";
  }
  return "unknown";
}

Design parse_design(std::string_view name) {
  for (Design d : {Design::Ex21, Design::Ex51, Design::Ex52, Design::Ex53}) {
    if (name == to_string(d)) return d;
  }
  throw Error(ErrorCode::ConfigError, "unknown design '" + std::string(name) + "'");
}

Index design_dims(Design design) { return design == Design::Ex21 ? 2 : 4; }

TruthSpec truth_for(Design design) {
  const Index p = design_dims(design);
  switch (design) {
    case Design::Ex21: return {Subspace(Matrix::Identity(p, p).rightCols(1)), 1};
    case Design::Ex51:
    case Design::Ex52: return {Subspace(Matrix::Identity(p, p).leftCols(2)), 2};
    case Design::Ex53: return {Subspace(Matrix::Identity(p, p).middleCols(1, 1)), 1};
  }
  throw Error(ErrorCode::ConfigError, "unknown design");
}

double regression_function(Design design, const Vector& x) {
  switch (design) {
    case Design::Ex21: return x[1] * x[1];
    case Design::Ex51: return x[0] * x[0] + x[1];
    case Design::Ex52: {
      const double shift = x[1] + 1.5;
      const double bend = 1.0 + x[1];
      return x[0] / (0.5 + shift * shift) + bend * bend;
    }
    case Design::Ex53: {
      const double arg = std::numbers::pi * x[1] + 1.0;
      return std::sin(arg * arg);
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown design");
}

GeneratedData generate(const DesignSpec& spec) {
  if (spec.n < 10) throw Error(ErrorCode::InvalidArgument, "designs need n >= 10");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be finite and >= 0");
  }
  RandomSource rng(spec.seed);
  const Index p = design_dims(spec.design);
  Matrix x(spec.n, p);
  for (Index i = 0; i < spec.n; ++i) {
    if (spec.design == Design::Ex53) {
      for (;;) {
        bool in_corner = true;
        for (Index a = 0; a < p; ++a) {
          x(i, a) = rng.uniform();
          in_corner = in_corner && x(i, a) <= kCornerCut;
        }
        if (!in_corner) break;
      }
    } else {
      for (Index a = 0; a < p; ++a) x(i, a) = rng.normal();
    }
  }
  Vector y(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    y[i] = regression_function(spec.design, x.row(i).transpose()) + spec.sigma * rng.normal();
  }
  return {Dataset(std::move(x), std::move(y)), truth_for(spec.design)};
}

std::string MethodSpec::name() const {
  return label.empty() ? std::string(to_string(method)) : label;
}

EstimatorResult fit_method(const Dataset& data, const MethodSpec& spec, int dimension) {
  switch (spec.method) {
    case Method::Gcr: {
      GcrConfig config;
      config.tube_radius = spec.tube_radius;
      config.pairs = spec.pairs;
      config.dimension = dimension;
      config.geometry = spec.geometry;
      return gcr_fit(data, config);
    }
    case Method::Scr: return scr_fit(data, dimension, spec.pairs);
    case Method::Ols: return ols_fit(data);
    case Method::Sir: return sir_fit(data, spec.slices, dimension);
    case Method::Save: return save_fit(data, spec.slices, dimension);
    case Method::Phd: return phd_fit(data, dimension, spec.phd_mode);
  }
  throw Error(ErrorCode::UnknownMethod, "unknown method");
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, Design design, double sigma,
                              std::size_t run) {
  std::uint64_t s = mix_seed(base_seed, static_cast<std::uint64_t>(design) + 1);
  s = mix_seed(s, std::bit_cast<std::uint64_t>(sigma));
  return mix_seed(s, static_cast<std::uint64_t>(run));
}

namespace {

struct CellOutcome {
  std::vector<double> dist;  // NaN marks a failed fit
};

}  // namespace

SimulationReport run_comparison(const ComparisonConfig& config, const RunObserver& observer) {
  if (config.methods.empty()) throw Error(ErrorCode::ConfigError, "no methods to compare");
  if (config.designs.empty()) throw Error(ErrorCode::ConfigError, "no designs to run");
  if (config.sigmas.empty()) throw Error(ErrorCode::ConfigError, "no noise levels to run");
  if (config.runs < 1) throw Error(ErrorCode::ConfigError, "runs must be >= 1");
  for (const DesignSpec& d : config.designs) {
    if (d.n < 10) throw Error(ErrorCode::ConfigError, "designs need n >= 10");
  }
  for (double s : config.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::ConfigError, "sigma must be finite and >= 0");
    }
  }

  SimulationReport report;
  report.config = config;
  const std::size_t methods = config.methods.size();
  std::mutex observer_mutex;

  for (const DesignSpec& tmpl : config.designs) {
    for (double sigma : config.sigmas) {
      // dist[run * methods + m]
      std::vector<double> dist(config.runs * methods, 0.0);
      auto do_run = [&](std::size_t run) {
        DesignSpec spec = tmpl;
        spec.sigma = sigma;
        spec.seed = derive_run_seed(config.base_seed, tmpl.design, sigma, run);
        const GeneratedData g = generate(spec);
        for (std::size_t m = 0; m < methods; ++m) {
          if (observer) {
            std::scoped_lock lock(observer_mutex);
            observer(tmpl.design, sigma, run, config.methods[m], checksum(g.data));
          }
          double& slot = dist[run * methods + m];
          try {
            const EstimatorResult fit = fit_method(g.data, config.methods[m], g.truth.q);
            slot = subspace_distance(fit.subspace, g.truth.true_subspace);
          } catch (const Error&) {
            slot = std::nan("");
          }
        }
      };

      const unsigned workers =
          std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.runs)));
      if (workers == 1) {
        for (std::size_t r = 0; r < config.runs; ++r) do_run(r);
      } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (std::size_t r = w; r < config.runs; r += workers) do_run(r);
          });
        }
      }

      // Reduction in run order keeps the report independent of the worker count.
      for (std::size_t m = 0; m < methods; ++m) {
        double sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t r = 0; r < config.runs; ++r) {
          const double d = dist[r * methods + m];
          if (std::isnan(d)) continue;
          sum += d;
          ++ok;
        }
        const double mean = ok > 0 ? sum / static_cast<double>(ok) : std::nan("");
        double ss = 0.0;
        for (std::size_t r = 0; r < config.runs; ++r) {
          const double d = dist[r * methods + m];
          if (!std::isnan(d)) ss += (d - mean) * (d - mean);
        }
        const double spread = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1)) : 0.0;
        const std::size_t failures = config.runs - ok;
        report.rows.push_back({tmpl.design, sigma, config.methods[m].name(), mean, spread,
                               config.runs, failures,
                               ok > 0 && failures * 100 <= config.runs});
      }
    }
  }
  return report;
}

ComparisonConfig preset(std::string_view name) {
  ComparisonConfig c;
  auto methods = [](std::initializer_list<Method> list) {
    std::vector<MethodSpec> out;
    for (Method m : list) {
      MethodSpec spec;
      spec.method = m;
      out.push_back(spec);
    }
    return out;
  };
  if (name == "table1") {
    c.designs = {DesignSpec{.design = Design::Ex51, .n = 100}};
    c.sigmas = {0.1, 0.4, 0.8};
    c.methods = methods({Method::Gcr, Method::Sir, Method::Save, Method::Phd});
  } else if (name == "table2") {
    c.designs = {DesignSpec{.design = Design::Ex52, .n = 100}};
    c.sigmas = {0.1, 0.4, 0.8};
    c.methods = methods({Method::Gcr, Method::Sir, Method::Save, Method::Phd});
  } else if (name == "table3") {
    c.designs = {DesignSpec{.design = Design::Ex53, .n = 100}};
    c.sigmas = {0.1, 0.2, 0.3};
    c.methods = methods({Method::Gcr, Method::Ols, Method::Sir, Method::Save, Method::Phd});
  } else {
    throw Error(ErrorCode::ConfigError, "unknown preset '" + std::string(name) + "'");
  }
  c.runs = 500;
  return c;
}

}  // namespace sdr
