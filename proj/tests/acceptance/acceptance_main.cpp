#include <cstdlib>
#include <iostream>
#include <string>

#include "zograd/acceptance.hpp"

int main(int argc, char** argv) {
  zograd::AcceptanceOptions options;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const auto value = std::stoull(argv[i + 1]);
    if (flag == "--seed") options.seed = value;
    else if (flag == "--reps") options.reps = value;
    else if (flag == "--rate-reps") options.rate_reps = value;
    else if (flag == "--workers") options.workers = static_cast<unsigned>(value);
    else {
      std::cerr << "unknown flag " << flag << "\n";
      return 2;
    }
  }
  const bool ok = zograd::print_acceptance(zograd::run_acceptance(options), std::cout);
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
