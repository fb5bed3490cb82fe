#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/scenarios.hpp"

namespace curvflow {

inline constexpr std::string_view kVersion = "curvflow 0.1.0";

/// Everything needed to reproduce one run.
struct RunSpec {
  std::string preset;  // empty when built from scratch
  FlowConfig flow;
  InitialSpec initial;
  std::uint64_t seed = 20240611;
};

/// Recognised keys, in the order to_config_text writes them.
const std::vector<std::string_view>& config_keys();

/// Full key for the short sweep aliases (alpha, beta, f, n, N); other names
/// are returned unchanged.
std::string canonical_key(std::string_view key);

/// Sets one key. Throws ConfigError naming the key for unknown keys or
/// malformed values. `run.preset` replaces the whole spec with the preset.
void apply_setting(RunSpec& spec, std::string_view key, std::string_view value);

/// Reads `section.key = value` lines; '#' starts a comment. A run.preset line
/// is applied before every other key regardless of its position. The result
/// is validated.
RunSpec parse_config(std::istream& in, RunSpec base = {});
RunSpec parse_config_file(const std::filesystem::path& path, RunSpec base = {});

/// Canonical text form; parse_config(to_config_text(s)) reproduces s.
std::string to_config_text(const RunSpec& spec);

RunSpec preset_spec(std::string_view name);

}  // namespace curvflow
