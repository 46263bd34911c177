#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vapordet/design.hpp"

namespace vapordet {

inline constexpr std::string_view kVersion = "0.1.0";

/// Parsed run configuration: one JSON document per run.
///
///   {
///     "design": { "preset": "worked", "passes": 50, ... },
///     "seed": 42,
///     "output_dir": "out",
///     "dynamics": {...}, "mc": {...}, "sweep": {...}, "optimize": {...}
///   }
///
/// "design" may also carry "species_file", a path to an AtomicSpecies JSON
/// file resolved against the config's directory.
struct RunConfig {
  nlohmann::json raw;  // as parsed, after --seed override
  DetectorDesign design;
  std::uint64_t seed = 0;
  std::string output_dir;
};

/// Parses and validates; a design that fails validate_units is rejected with
/// one line per offending field. Parse errors name the line and column.
RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = {},
                       const std::string& base_dir = ".");

/// FNV-1a 64 of the canonical (sorted-key, compact) config dump, as hex.
std::string config_hash(const nlohmann::json& raw);

enum class OutputFormat { json = 1, csv = 2, both = 3 };
OutputFormat format_from_string(std::string_view s);

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandOutput {
  std::string summary;  // human-readable table followed by JSON, for stdout
  std::vector<OutputFile> files;
};

/// Commands: budget, dynamics, mc, sweep, optimize. Errors propagate as the
/// library's exception types (ConfigError, IntegrationError, InfeasibleError).
CommandOutput run_command(std::string_view command, const RunConfig& cfg, OutputFormat fmt);

CommandOutput cmd_budget(const RunConfig& cfg, OutputFormat fmt);
CommandOutput cmd_dynamics(const RunConfig& cfg, OutputFormat fmt);
CommandOutput cmd_mc(const RunConfig& cfg, OutputFormat fmt);
CommandOutput cmd_sweep(const RunConfig& cfg, OutputFormat fmt);
CommandOutput cmd_optimize(const RunConfig& cfg, OutputFormat fmt);

}  // namespace vapordet
