#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace affdim {

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::optional<double> s;
  std::string method;  // per-subcommand; empty selects the default
  double tol = 1e-12;
  std::size_t max_order = 256;
  int word_len = 12;
  std::string wrt = "s";  // "s" or "t:<k>"
  double step = 0.0;      // derivative step; 0 selects the method default
  std::string param;      // sweep, "t:<k>"
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::size_t points = 1000;
  unsigned threads = 0;  // 0: AFFDIM_THREADS, then hardware concurrency
  int boundary_samples = 256;
  double margin = 1e-9;
  int cone_depth = 10;
  int jsr_depth = 12;
};

/// Throws std::invalid_argument when an invariant is violated (tol > 0,
/// max_order a power of two in [8, 4096], ...).
void check_config(const RunConfig& config);

/// Parses "t:<k>" into k.
std::size_t parse_parameter_ref(const std::string& text);

/// Dispatches one subcommand. Exit status: 0 success, 2 refused input,
/// 1 internal error. Errors are written to `err` as a JSON object.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (without the program name) and runs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affdim
