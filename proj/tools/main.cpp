#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "zograd/errors.hpp"

namespace cli = zograd::cli;

int main(int argc, char** argv) {
  CLI::App app{"Minimax zeroth-order gradient estimation experiments"};
  app.set_help_flag("--help");

  std::string command;
  std::string config_path;
  app.add_option("command", command, "bounds | risk-curve | brute-force | sp-demo | worstcase | verify");
  app.add_option("--config", config_path, "JSON config file; flags override its keys");

  // flag name -> config key
  const std::map<std::string, std::string> keys{
      {"--a", "a"},         {"--b", "b"},         {"--n", "n"},       {"--n-list", "n_list"}, {"--p", "p"},
      {"--q", "q"},         {"--eps", "eps"},     {"--estimator", "estimator"}, {"--delta", "delta"},
      {"--reps", "reps"},   {"--seed", "seed"},   {"--rho-list", "rho_list"}, {"--h", "h"},
      {"--out", "out"},     {"--format", "format"}, {"--workers", "workers"}};
  std::map<std::string, std::string> values;
  for (const auto& [flag, key] : keys) app.add_option(flag, values[key]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "zograd: config error: " << e.what() << "\n";
    return 2;
  }

  cli::FlagValues flags;
  if (!command.empty()) flags.emplace_back("command", command);
  for (const auto& [flag, key] : keys) {
    if (app.count(flag) > 0) flags.emplace_back(key, values[key]);
  }

  std::optional<std::uint64_t> default_seed;
  if (const char* env = std::getenv("ZOGRAD_SEED")) {
    try {
      default_seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "zograd: config error: ZOGRAD_SEED must be a nonnegative integer\n";
      return 2;
    }
  }

  try {
    const auto config = cli::load_config(config_path, flags, default_seed);
    if (config.out.empty()) return cli::run(config, std::cout);
    std::ofstream out(config.out);
    if (!out) throw cli::ConfigError("cannot write output file '" + config.out + "'");
    return cli::run(config, out);
  } catch (const cli::ConfigError& e) {
    std::cerr << "zograd: config error: " << e.where() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "zograd: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "zograd: " << e.what() << "\n";
    return 3;
  }
}
