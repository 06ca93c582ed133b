#include "sdr/cli.hpp"

#include "sdr/metrics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace sdr::cli {

using json = nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_blank(std::string_view line) { return trim(line).empty() && line.find(',') == line.npos; }

std::optional<double> parse_double(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::optional<std::size_t> parse_index(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

NamedDataset parse_csv(std::istream& in, const std::string& response_column, char delimiter) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (is_blank(line)) continue;
    header = split(line, delimiter);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "missing header row");

  std::size_t response_idx = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_column) {
      response_idx = c;
      break;
    }
  }
  if (response_idx == header.size()) {
    const auto idx = parse_index(response_column);
    if (!idx || *idx >= header.size()) {
      throw Error(ErrorCode::MissingResponseColumn,
                  "response column '" + response_column + "' not found in header");
    }
    response_idx = *idx;
  }
  if (header.size() < 2) {
    throw Error(ErrorCode::ParseError, "need at least one predictor column besides the response");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::vector<std::string> cells = split(line, delimiter);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(cells.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) {
        throw Error(ErrorCode::NonNumericCell,
                    "line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                        " ('" + header[c] + "'): '" + cells[c] + "' is not a number");
      }
      values[c] = *v;
    }
    rows.push_back(std::move(values));
  }

  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(header.size() - 1);
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == response_idx) {
        y[i] = rows[static_cast<std::size_t>(i)][c];
      } else {
        x(i, col++) = rows[static_cast<std::size_t>(i)][c];
      }
    }
  }
  NamedDataset out{Dataset(std::move(x), std::move(y)), {}, header[response_idx]};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_idx) out.predictor_names.push_back(header[c]);
  }
  return out;
}

NamedDataset ingest_csv(const std::string& path, const std::string& response_column,
                        char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  return parse_csv(in, response_column, delimiter);
}

void write_csv(std::ostream& out, const NamedDataset& data, char delimiter) {
  for (const std::string& name : data.predictor_names) out << name << delimiter;
  out << data.response_name << '\n';
  const Matrix& x = data.data.predictors();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index a = 0; a < x.cols(); ++a) out << format_number(x(i, a)) << delimiter;
    out << format_number(data.data.response()[i]) << '\n';
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownMethod:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionTooLarge:
      return 1;
    case ErrorCode::FileNotFound:
    case ErrorCode::ParseError:
    case ErrorCode::MissingResponseColumn:
    case ErrorCode::NonNumericCell:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonFiniteEntry:
    case ErrorCode::TooFewRows:
    case ErrorCode::TooManySlices:
      return 2;
    case ErrorCode::RankDeficient:
    case ErrorCode::SingularCovariance:
    case ErrorCode::DegeneratePair:
    case ErrorCode::NoPairsSelected:
    case ErrorCode::EmptyAfterDegenerate:
    case ErrorCode::SliceTooSmall:
    case ErrorCode::ConstantResponse:
    case ErrorCode::AmbientMismatch:
      return 3;
  }
  return 3;
}

namespace {

template <class Writer>
void emit(const RunConfig& config, std::ostream& out, Writer&& write) {
  if (config.output_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::ConfigError, "cannot write '" + config.output_path + "'");
  write(file);
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
  return arr;
}

json columns_json(const Matrix& m) {
  json arr = json::array();
  for (Index c = 0; c < m.cols(); ++c) arr.push_back(vector_json(m.col(c)));
  return arr;
}

int effective_dimension(const RunConfig& config) {
  return config.method.method == Method::Ols ? 1 : config.dimension;
}

// Parameters that matter for the chosen method, in a stable order.
std::vector<std::pair<std::string, std::string>> parameters(const RunConfig& config, Index n) {
  const MethodSpec& m = config.method;
  const int q = effective_dimension(config);
  std::vector<std::pair<std::string, std::string>> out{{"q", std::to_string(q)}};
  switch (m.method) {
    case Method::Gcr:
      out.emplace_back("rho", format_number(m.tube_radius));
      out.emplace_back("pairs", (m.pairs ? *m.pairs : default_pair_rule(n, q)).to_string());
      out.emplace_back("geometry", std::string(to_string(m.geometry)));
      break;
    case Method::Scr:
      out.emplace_back("pairs", (m.pairs ? *m.pairs : default_pair_rule(n, q)).to_string());
      break;
    case Method::Sir:
    case Method::Save:
      out.emplace_back("slices", std::to_string(m.slices));
      break;
    case Method::Phd:
      out.emplace_back("mode", std::string(to_string(m.phd_mode)));
      break;
    case Method::Ols:
      break;
  }
  return out;
}

struct Fitted {
  NamedDataset data;
  EstimatorResult result;
};

Fitted fit_from_config(const RunConfig& config) {
  if (config.input_path.empty()) throw Error(ErrorCode::ConfigError, "--input is required");
  if (config.response_column.empty()) throw Error(ErrorCode::ConfigError, "--response is required");
  NamedDataset data = ingest_csv(config.input_path, config.response_column, config.delimiter);
  EstimatorResult result = fit_method(data.data, config.method, effective_dimension(config));
  return {std::move(data), std::move(result)};
}

}  // namespace

int cmd_fit(const RunConfig& config, std::ostream& out) {
  const Fitted f = fit_from_config(config);
  const auto params = parameters(config, f.data.data.rows());
  emit(config, out, [&](std::ostream& os) {
    if (config.format == OutputFormat::Json) {
      json j;
      j["command"] = "fit";
      j["method"] = to_string(f.result.method);
      j["convention"] = to_string(f.result.convention);
      json pj = json::object();
      for (const auto& [k, v] : params) pj[k] = v;
      j["parameters"] = pj;
      j["n"] = f.data.data.rows();
      j["p"] = f.data.data.dims();
      j["response"] = f.data.response_name;
      j["predictors"] = f.data.predictor_names;
      j["eigenvalues"] = vector_json(f.result.eigenvalues);
      j["basis"] = columns_json(f.result.subspace.basis());
      j["directions"] = columns_json(f.result.raw_directions);
      os << j.dump(2) << '\n';
      return;
    }
    os << "section,index,name,value\n";
    os << "method,,," << to_string(f.result.method) << '\n';
    os << "convention,,," << to_string(f.result.convention) << '\n';
    for (const auto& [k, v] : params) os << "parameter,," << k << ',' << v << '\n';
    for (Index k = 0; k < f.result.eigenvalues.size(); ++k) {
      os << "eigenvalue," << k << ",," << format_number(f.result.eigenvalues[k]) << '\n';
    }
    auto matrix_rows = [&](const char* section, const Matrix& m) {
      for (Index c = 0; c < m.cols(); ++c) {
        for (Index r = 0; r < m.rows(); ++r) {
          os << section << ',' << c << ',' << f.data.predictor_names[static_cast<std::size_t>(r)]
             << ',' << format_number(m(r, c)) << '\n';
        }
      }
    };
    matrix_rows("basis", f.result.subspace.basis());
    matrix_rows("direction", f.result.raw_directions);
  });
  return 0;
}

int cmd_scree(const RunConfig& config, std::ostream& out) {
  const Fitted f = fit_from_config(config);
  const ScreeReport report = scree(f.result);
  emit(config, out, [&](std::ostream& os) {
    if (config.format == OutputFormat::Json) {
      json j;
      j["command"] = "scree";
      j["method"] = to_string(f.result.method);
      j["convention"] = to_string(report.convention);
      j["eigenvalues"] = vector_json(report.eigenvalues);
      j["gaps"] = vector_json(report.gaps);
      j["suggested_q"] = report.suggested_q;
      j["flat"] = report.flat;
      j["advisory"] = "suggested_q is the largest consecutive-ratio gap heuristic, not a test";
      os << j.dump(2) << '\n';
      return;
    }
    os << "section,index,value\n";
    for (Index k = 0; k < report.eigenvalues.size(); ++k) {
      os << "eigenvalue," << k << ',' << format_number(report.eigenvalues[k]) << '\n';
    }
    for (Index k = 0; k < report.gaps.size(); ++k) {
      os << "gap," << k << ',' << format_number(report.gaps[k]) << '\n';
    }
    os << "suggested_q,," << report.suggested_q << '\n';
    os << "flat,," << (report.flat ? "true" : "false") << '\n';
    os << "convention,," << to_string(report.convention) << '\n';
  });
  return 0;
}

int cmd_project(const RunConfig& config, std::ostream& out) {
  const Fitted f = fit_from_config(config);
  const Matrix coords = f.data.data.predictors() * f.result.raw_directions;
  std::vector<std::string> columns;
  for (Index k = 0; k < coords.cols(); ++k) columns.push_back("dir" + std::to_string(k + 1));
  columns.push_back(f.data.response_name);
  const Vector& y = f.data.data.response();
  emit(config, out, [&](std::ostream& os) {
    if (config.format == OutputFormat::Json) {
      json j;
      j["command"] = "project";
      j["method"] = to_string(f.result.method);
      j["columns"] = columns;
      json rows = json::array();
      for (Index i = 0; i < coords.rows(); ++i) {
        json row = vector_json(coords.row(i).transpose());
        row.push_back(y[i]);
        rows.push_back(std::move(row));
      }
      j["rows"] = std::move(rows);
      os << j.dump(2) << '\n';
      return;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << columns[c] << (c + 1 < columns.size() ? config.delimiter : '\n');
    }
    for (Index i = 0; i < coords.rows(); ++i) {
      for (Index k = 0; k < coords.cols(); ++k) os << format_number(coords(i, k)) << config.delimiter;
      os << format_number(y[i]) << '\n';
    }
  });
  return 0;
}

namespace {

ComparisonConfig comparison_from(const RunConfig& config) {
  ComparisonConfig c;
  if (!config.preset.empty()) {
    c = preset(config.preset);
  } else {
    if (config.designs.empty()) {
      throw Error(ErrorCode::ConfigError, "simulate needs --preset or --design");
    }
    for (const std::string& d : config.designs) {
      c.designs.push_back(DesignSpec{.design = parse_design(d), .n = config.sample_size});
    }
    if (config.sigmas.empty()) throw Error(ErrorCode::ConfigError, "--sigmas is required");
    if (!config.methods_given) throw Error(ErrorCode::ConfigError, "--methods is required");
  }
  if (!config.sigmas.empty()) c.sigmas = config.sigmas;
  if (config.methods_given) {
    if (config.methods.empty()) throw Error(ErrorCode::ConfigError, "empty method list");
    c.methods.clear();
    for (const std::string& m : config.methods) {
      MethodSpec spec = config.method;
      spec.method = parse_method(m);
      c.methods.push_back(spec);
    }
  } else {
    for (MethodSpec& spec : c.methods) {
      const Method m = spec.method;
      spec = config.method;
      spec.method = m;
    }
  }
  if (config.runs) c.runs = *config.runs;
  if (config.seed) c.base_seed = *config.seed;
  c.threads = config.threads;
  return c;
}

void print_table(std::ostream& os, const SimulationReport& report) {
  os << "design  sigma   method    DIST    SE      runs  failures\n";
  for (const ReportRow& r : report.rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-7s %-7.4f %-9s %-7.4f %-7.4f %-5zu %zu%s\n",
                  std::string(to_string(r.design)).c_str(), r.sigma, r.method.c_str(),
                  r.mean_dist, r.spread, r.runs, r.failures, r.valid ? "" : "  (invalid)");
    os << buf;
  }
  os << "SE is the across-run standard deviation of the distance.\n";
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const ComparisonConfig c = comparison_from(config);
  const SimulationReport report = run_comparison(c);
  emit(config, out, [&](std::ostream& os) {
    if (config.format == OutputFormat::Json) {
      json j;
      j["command"] = "simulate";
      j["preset"] = config.preset;
      j["seed"] = c.base_seed;
      j["runs"] = c.runs;
      j["spread"] = "across-run standard deviation (divisor runs - 1)";
      json rows = json::array();
      for (const ReportRow& r : report.rows) {
        rows.push_back({{"design", to_string(r.design)},
                        {"sigma", r.sigma},
                        {"method", r.method},
                        {"dist", r.mean_dist},
                        {"se", r.spread},
                        {"runs", r.runs},
                        {"failures", r.failures},
                        {"valid", r.valid}});
      }
      j["rows"] = std::move(rows);
      os << j.dump(2) << '\n';
      return;
    }
    os << "design,sigma,method,dist,se,runs,failures\n";
    for (const ReportRow& r : report.rows) {
      os << to_string(r.design) << ',' << format_number(r.sigma) << ',' << r.method << ','
         << format_number(r.mean_dist) << ',' << format_number(r.spread) << ',' << r.runs << ','
         << r.failures << '\n';
    }
  });
  if (!config.output_path.empty()) print_table(out, report);
  for (const ReportRow& r : report.rows) {
    if (!r.valid) {
      throw Error(ErrorCode::ConfigError, "cell " + std::string(to_string(r.design)) + " / " +
                                              r.method + " exceeded the 1% failure budget");
    }
  }
  return 0;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (std::string& item : split(text, ',')) {
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

void print_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sufficient dimension reduction: contour regression and moment baselines"};
  app.name("sdr");
  app.require_subcommand(1);

  RunConfig config;
  std::string method = "gcr";
  std::string pairs;
  std::string geometry = "std";
  std::string phd_mode = "response";
  std::string format;
  std::string designs;
  std::string sigmas;
  std::string methods;
  double rho = kDefaultTubeRadius;
  std::size_t slices = kDefaultSlices;
  bool tab = false;

  auto estimator_options = [&](CLI::App* sub) {
    sub->add_option("--method", method, "gcr, scr, ols, sir, save or phd");
    sub->add_option("--rho", rho, "tube radius (gcr)");
    sub->add_option("--pairs", pairs, "top:<m> or thresh:<c> (gcr, scr); default top:2qn");
    sub->add_option("--slices", slices, "number of slices (sir, save)");
    sub->add_option("--geometry", geometry, "raw or std: space the cylinders live in (gcr)");
    sub->add_option("--phd-mode", phd_mode, "response or residual (phd)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--output", config.output_path, "output file (default stdout)");
  };
  auto data_options = [&](CLI::App* sub) {
    sub->add_option("--input", config.input_path, "CSV file with a header row")->required();
    sub->add_option("--response", config.response_column, "response column name or 0-based index")
        ->required();
    sub->add_option("--q", config.dimension, "structural dimension");
    sub->add_flag("--tab", tab, "tab-delimited input");
    estimator_options(sub);
  };

  CLI::App* fit = app.add_subcommand("fit", "estimate the central subspace of a CSV dataset");
  data_options(fit);
  CLI::App* scree_cmd = app.add_subcommand("scree", "eigenvalue scree and suggested dimension");
  data_options(scree_cmd);
  CLI::App* project = app.add_subcommand("project", "coordinates along the estimated directions");
  data_options(project);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of estimators");
  simulate->add_option("--preset", config.preset, "table1, table2 or table3");
  simulate->add_option("--design", designs, "comma-separated designs: ex21, ex51, ex52, ex53");
  simulate->add_option("--sigmas", sigmas, "comma-separated noise levels");
  CLI::Option* methods_opt =
      simulate->add_option("--methods", methods, "comma-separated methods");
  simulate->add_option("--n", config.sample_size, "sample size per run");
  simulate->add_option("--runs", config.runs, "replicates per cell");
  simulate->add_option("--seed", config.seed, "base seed");
  simulate->add_option("--threads", config.threads, "worker threads");
  estimator_options(simulate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    config.method.method = parse_method(method);
    config.method.tube_radius = rho;
    config.method.slices = slices;
    if (!pairs.empty()) config.method.pairs = PairRule::parse(pairs);
    if (geometry == "raw") {
      config.method.geometry = Geometry::Raw;
    } else if (geometry == "std") {
      config.method.geometry = Geometry::Standardized;
    } else {
      throw Error(ErrorCode::ConfigError, "--geometry must be raw or std");
    }
    config.method.phd_mode = parse_phd_mode(phd_mode);
    config.delimiter = tab ? '\t' : ',';

    if (fit->parsed()) config.command = Command::Fit;
    if (scree_cmd->parsed()) config.command = Command::Scree;
    if (project->parsed()) config.command = Command::Project;
    if (simulate->parsed()) config.command = Command::Simulate;

    if (format.empty()) {
      config.format = config.command == Command::Project ? OutputFormat::Csv : OutputFormat::Json;
    } else if (format == "csv") {
      config.format = OutputFormat::Csv;
    } else if (format == "json") {
      config.format = OutputFormat::Json;
    } else {
      throw Error(ErrorCode::ConfigError, "--format must be csv or json");
    }

    if (config.command == Command::Simulate) {
      config.designs = split_list(designs);
      for (const std::string& s : split_list(sigmas)) {
        const auto v = [&] {
          double value = 0.0;
          auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
          if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw Error(ErrorCode::ConfigError, "bad sigma '" + s + "'");
          }
          return value;
        }();
        config.sigmas.push_back(v);
      }
      config.methods_given = methods_opt->count() > 0;
      config.methods = split_list(methods);
    }

    switch (config.command) {
      case Command::Fit: return cmd_fit(config, out);
      case Command::Scree: return cmd_scree(config, out);
      case Command::Project: return cmd_project(config, out);
      case Command::Simulate: return cmd_simulate(config, out);
    }
    return 1;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, to_string(ErrorCode::ConfigError), e.what());
    return 1;
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
    return 3;
  }
}

}  // namespace sdr::cli
