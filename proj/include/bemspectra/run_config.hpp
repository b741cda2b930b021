#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bemspectra/continuous_spectra.hpp"
#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { GramConvergence, Spectrum, ErrorSweep, OracleCheck };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

struct OutputFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;

  friend bool operator==(const OutputFormats&, const OutputFormats&) = default;
};

/// Everything one command run depends on. Unset optionals take command
/// defaults in resolve().
struct RunConfig {
  Command command = Command::Spectrum;
  std::vector<OperatorKind> kinds;
  std::optional<double> ka;
  std::vector<double> ka_list;
  std::optional<int> V;
  double cells_per_ka = 1.0;
  std::optional<BasisKind> basis_test;
  std::optional<BasisKind> basis_source;
  PolicyOverrides overrides;
  std::string out = "out";
  OutputFormats formats;
  std::optional<double> threshold;
  std::optional<double> residual_bound;
  int l_points = 12;
  bool quadrature = false;
  bool corrupt_self_test = false;
  bool decompose = false;
  std::uint64_t seed = 20240611;

  /// Sets one key from its text form. Throws ConfigError on unknown keys or
  /// malformed values.
  void set(std::string_view key, std::string_view value);
  /// Fills command defaults and checks consistency. Throws ConfigError.
  void resolve();
  /// key=value lines in fixed order; parse(serialize()) reproduces the config.
  std::string serialize() const;
  static RunConfig parse(std::string_view text);

  friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.serialize() == b.serialize(); }
};

/// Applies key=value lines ('#' starts a comment) onto config.
void apply_config_text(RunConfig& config, std::string_view text);
RunConfig load_config_file(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace bemspectra
