#pragma once

// Command-line front end: CSV ingestion, estimator configuration and the
// fit / simulate / scree / project commands.
//
// Exit status: 0 success, 1 usage or configuration error, 2 data error,
// 3 numerical failure. Failures print {"error": <code>, "message": ...}
// on the error stream.

#include "sdr/core.hpp"
#include "sdr/simgen.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sdr::cli {

struct NamedDataset {
  Dataset data;
  std::vector<std::string> predictor_names;
  std::string response_name;
};

/// Header row required. The response is matched by column name first, then
/// as a 0-based column index. Remaining columns become predictors in file
/// order.
NamedDataset parse_csv(std::istream& in, const std::string& response_column,
                       char delimiter = ',');
NamedDataset ingest_csv(const std::string& path, const std::string& response_column,
                        char delimiter = ',');

/// Predictors then response, 17 significant digits.
void write_csv(std::ostream& out, const NamedDataset& data, char delimiter = ',');

/// 17 significant digits, locale independent.
std::string format_number(double value);

enum class Command { Fit, Simulate, Scree, Project };
enum class OutputFormat { Csv, Json };

struct RunConfig {
  Command command = Command::Fit;
  std::string input_path;
  std::string response_column;
  MethodSpec method;
  int dimension = 1;
  char delimiter = ',';
  OutputFormat format = OutputFormat::Json;
  std::string output_path;  // empty: write to the command's output stream

  // simulate
  std::string preset;
  std::vector<std::string> designs;
  std::vector<double> sigmas;
  std::vector<std::string> methods;
  bool methods_given = false;
  Index sample_size = 100;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

int exit_code(ErrorCode code);

int cmd_fit(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_scree(const RunConfig& config, std::ostream& out);
int cmd_project(const RunConfig& config, std::ostream& out);

/// Parses args (without the program name) and dispatches. Errors are mapped
/// to exit codes; nothing escapes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdr::cli
