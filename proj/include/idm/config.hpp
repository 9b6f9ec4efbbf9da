#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "idm/types.hpp"

namespace idm {

/// Parse failure in a scenario file; `line()` is 1-based, 0 when the problem is
/// not tied to a single line (e.g. a missing key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads the `[section]` / `key = value` scenario format. Unknown sections or
/// keys, duplicates, and missing required keys are errors. Velocities accept a
/// `km/h` or `m/s` suffix. The result is not validated.
Scenario parse_config(std::istream& in, const std::string& source = "<config>");

Scenario load_config(const std::filesystem::path& path);

/// Inverse of parse_config; numbers are written with 17 significant digits.
std::string format_config(const Scenario& s);

/// Variant with its extra parameter filled by the comparison defaults
/// (a_min = a, eps_v = 0.1, eps_d = 0.5). Throws std::invalid_argument on an
/// unknown name.
VariantKind default_variant(const std::string& name, const ModelParams& p);

/// A builtin scenario name (or alias) or a path to a scenario file.
Scenario resolve_scenario(const std::string& ref);

}  // namespace idm
