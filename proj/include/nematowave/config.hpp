#pragma once

// Run configuration documents: flat INI with sections [constants], [grid],
// [family], [solver] and [run]. Unknown sections or keys are errors.

#include <cstdint>
#include <string>
#include <vector>

#include "nematowave/experiments.hpp"

namespace nematowave {

enum class Command { Simulate, Lifespan, Blowup1d, Converge, VerifyAlgebra };

const char* to_string(Command c) noexcept;
Command parse_command(const std::string& name);

struct RunConfig {
  Command command = Command::Simulate;
  Experiment experiment;
  std::string output_dir = "runs";
  std::uint64_t seed = 7;
  std::size_t samples = 10000;
  std::vector<double> amplitudes;  // lifespan
  bool refine = false;             // blowup1d: also run at h/2
  std::size_t snapshot_every = 0;  // write a snapshot every n-th record (0: final only)
  int threads = 0;                 // 0: OpenMP default
};

/// Parses and validates a document for `command`. Throws ConfigError with the
/// line number (syntax) or the offending field (schema and invariants).
RunConfig parse_config(const std::string& text, Command command);

/// Human-readable key reference with defaults, used by --help.
std::string config_reference();

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace nematowave
