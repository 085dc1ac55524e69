#pragma once

// Argument parsing and subcommand dispatch for the boundpair tool.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boundpair/export.hpp"

namespace boundpair::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  /// start + i*step for i = 0.. while the value stays within stop (with a
  /// small tolerance so 0.6:1.4:0.01 includes 1.4).
  std::vector<double> values() const;
};

/// Parses "a:b:step"; step > 0 and b >= a.
Grid parse_grid(const std::string& text);

struct RunConfig {
  std::string command;
  std::optional<int> n_atoms;
  std::optional<double> period12;
  double gamma0 = 1.0;
  std::optional<Grid> grid;
  std::string out;    // empty: standard output
  std::string cache;  // empty: no cache
  bool quick = false;
  int threads = 1;
  Format format = Format::csv;
  int truncation = 0;       // relative-coordinate truncation, 0: command default
  std::string matrix = "h0";  // dump-h: h0, h0-inverse, two-photon, relative
  double wavevector = 1.0;  // dump-h relative: K in units of pi
};

/// Throws UsageError for unknown flags, malformed grids or out-of-range values.
/// `env_cache` stands in for the BOUNDPAIR_CACHE environment variable.
RunConfig parse_args(const std::vector<std::string>& args, const std::optional<std::string>& env_cache = std::nullopt);

/// Help text for the whole tool.
std::string usage();

/// Runs one subcommand. The table goes to `out` (or to config.out) and a
/// short summary to `log`. Throws IoError if the output cannot be written.
void run(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Full entry point: 0 on success, 2 on usage errors, 1 on I/O or
/// computation failures.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boundpair::cli
