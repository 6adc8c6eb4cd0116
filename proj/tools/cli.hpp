#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace blp::cli {

enum ExitCode : int {
  kPass = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kBudgetAbort = 3,
  kInadmissible = 4,
};

struct RunManifest {
  std::string command;  ///< simulate, verify, kappa, check-measure or nested
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  std::optional<std::size_t> replicas;
  double k = 3.0;
  std::vector<double> levels;
  unsigned threads = 0;
};

/// FNV-1a hash of everything that determines the output bytes: the command,
/// the config text, seed, replicas, k and levels. The output directory and
/// thread count are excluded.
std::string manifest_hash(const RunManifest& manifest, const std::string& config_text);

/// Executes one command and writes its artifacts under manifest.out_dir.
/// Human-readable progress goes to `out`, diagnostics to `err`.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

}  // namespace blp::cli
