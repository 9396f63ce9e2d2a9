#pragma once

#include "cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ccrystal::cli {

inline constexpr const char* kVersion = CCRYSTAL_VERSION;

// Each command writes its files under config.out and a one-line summary per file to `log`.
void cmd_band(const RunConfig& config, std::ostream& log);
void cmd_synth(const RunConfig& config, std::ostream& log);
// With `snapshots` off (the compare command) only norms and reports are written.
void cmd_propagate(const RunConfig& config, bool snapshots, std::ostream& log);

// "# ccrystal <version> config=<hash>"
std::string file_banner(const RunConfig& config);

} // namespace ccrystal::cli
