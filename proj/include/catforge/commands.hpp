#pragma once

// Subcommands of the catforge tool. Each one validates its whole
// configuration first, computes everything in memory, and only then writes
// into the output directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace catforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct CommandOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  ///< overrides [tomo] seed
  std::optional<int> cutoff;          ///< overrides [scheme] cutoff
};

/// name is one of generate, wigner, sweep, tomo. Returns the process exit
/// code; diagnostics go to err, the one-line summary to out.
int run_command(std::string_view name, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

}  // namespace catforge
