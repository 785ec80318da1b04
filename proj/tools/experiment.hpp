#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "zograd/core.hpp"

namespace zograd::cli {

/// Invalid configuration. `line` is the 1-based line in the config file the
/// problem was found on, or 0 when it came from a flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string file = {}, int line = 0);

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  std::string where() const;

 private:
  std::string file_;
  int line_;
};

struct ExperimentConfig {
  std::string command;
  double a = 1.0;
  double b = 1.0;
  int p = 1;
  Norm q = Norm::l2;
  std::vector<int> n_list{64};
  double eps = 1.0;
  std::string estimator = "cfd";
  std::optional<double> delta;  // empty means optimal
  std::optional<std::uint64_t> reps;
  std::uint64_t seed = 7;
  std::vector<double> rho_list{1.0, 2.0, 4.0, 8.0};
  double h = 1.0;
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
};

/// Raw key/value pairs from the command line, in the same spelling as the
/// config file keys. Values are the flag text.
using FlagValues = std::vector<std::pair<std::string, std::string>>;

/// Parses an optional JSON config file and overlays flags on top. Unknown
/// keys, wrong types and out-of-range values raise ConfigError.
ExperimentConfig load_config(const std::string& config_path, const FlagValues& flags,
                             std::optional<std::uint64_t> default_seed);

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);

/// Runs the experiment and writes its artifact. Returns the process exit
/// status: 0 success, 1 acceptance failure.
int run(const ExperimentConfig& config, std::ostream& out);

/// Individual commands, exposed for testing.
Table bounds_table(const ExperimentConfig& config);
Table risk_curve_table(const ExperimentConfig& config);
Table brute_force_table(const ExperimentConfig& config);
Table sp_demo_table(const ExperimentConfig& config);
Table worstcase_table(const ExperimentConfig& config);
void write_worstcase_svg(const ExperimentConfig& config, std::ostream& out);

}  // namespace zograd::cli
