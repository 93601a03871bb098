#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "scsqkd/model.hpp"
#include "scsqkd/optimizer.hpp"
#include "scsqkd/phaselock.hpp"

namespace scsqkd {

struct PhaseLockConfig {
  FrameTiming timing{};
  InterferenceModel model{};
  DriftModel drift{};
  std::uint64_t seed = 1;  // shot noise
  double sample_interval_s = 0.1;
  double e_floor = 0.036;
  QberOptions qber{};
};

/// Everything one experiment recipe needs. Sections of the INI file:
/// [protocol], [channel], [source_bounds], [phaselock], [optimizer].
struct Config {
  ProtocolParams protocol{};
  ChannelParams channel{};
  /// Explicit vacuum-projection bounds; when absent they are derived from the
  /// intensities and protocol.extinction_ratio_db.
  std::optional<SourceBounds> source_bounds;
  PhaseLockConfig phaselock{};
  GridSpec optimizer{};

  SourceBounds bounds() const;
  ValidationReport validate() const;
};

/// Parses an INI document. Unknown sections or keys, unparsable numbers and
/// invalid values raise ConfigError naming the field. `[channel] dark_rate_hz`
/// may be given instead of `P_dc` (converted with the channel clock), and
/// `[protocol] p_o`, if present, must equal 1 - p_x.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

/// Writes every field, numbers in shortest round-trip form.
void write_config(std::ostream& out, const Config& config);

/// Sets one field from "section.key" and a textual value, with the same
/// checks as parsing. Validation of the whole record is left to the caller.
void apply_override(Config& config, const std::string& dotted_key, const std::string& value);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace scsqkd
