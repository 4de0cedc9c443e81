#pragma once

// Command-line front end: parameter sweeps, figure reproduction and
// simulation runs. Every command writes one CSV per curve and a JSON manifest.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csflab::cli {

enum ExitStatus : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
};

/// Invalid flag, config key or parameter value; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inclusive arithmetic grid written start:stop:step, or a single value.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

Grid parse_grid(const std::string& spec);

/// Comma-separated list of numbers.
std::vector<double> parse_list(const std::string& spec);

/// Units allowed in CSV headers.
bool is_known_unit(std::string_view unit);

struct Column {
  std::string name;
  std::string unit;
};

/// One scheme's samples. When the first column is a feedback quantity it
/// must be strictly increasing.
struct TradeoffCurve {
  std::string scheme;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  void validate() const;
  std::string to_csv() const;
};

/// Nine significant digits; nan and inf spelled out.
std::string format_number(double v);

struct RunConfig {
  std::string command;                        // e.g. "twostate sweep", "figure"
  std::map<std::string, std::string> params;  // resolved values as decimal strings
  std::string out_path = ".";
  std::uint64_t seed = 1;
  int jobs = 1;
};

/// Executes a resolved config: writes CSVs and manifest.json under out_path
/// and returns the written paths. Throws on failure.
std::vector<std::string> execute(const RunConfig& config);

/// Parses arguments (without the program name), resolves config files and
/// defaults, executes, and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csflab::cli
