#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "podkit/gram_space.hpp"

namespace podkit::cli {

enum class Command { generate_fhn, generate_synthetic, pod, verify, sweep, table };

struct RunConfig {
  Command command = Command::verify;
  std::string input;
  std::string output;
  std::vector<Index> r_list;        // from --r and --r-list, in order
  std::string projector = "orthogonal";
  std::string map;                  // JSON text or a path to a JSON file
  std::optional<double> tol;        // --tol, else PODKIT_TOL, else 1e-8
  std::uint64_t seed = 1;
  std::optional<Index> nodes;
  std::string kind = "random";      // generate-synthetic
  Index dim = 12;                   // generate-synthetic --kind random
  Index count = 10;
};

enum ExitCode : int { ok = 0, input_error = 2, numerical_error = 3, checks_failed = 4 };

/// Parses argv (CLI11). On a usage error writes the error JSON to `err`
/// and returns the exit code instead of a config.
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;
};
ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int main(int argc, const char* const* argv);

}  // namespace podkit::cli
