// Named experiments behind `dfsaqc run`: configuration handling, CSV output
// and the mapping from failures to exit codes.
#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfsaqc {

/// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidConfig = 2,
  kExitDimensionGuard = 3,
};

/// Exit code for an exception escaping run_experiment.
int exit_code_for(const std::exception_ptr& error);

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Experiment names in the order `--help` lists them.
const std::vector<std::string>& experiment_names();

/// All keys an experiment accepts, with defaults. Throws ConfigError for an
/// unknown experiment.
const std::vector<ConfigKey>& experiment_keys(const std::string& experiment);

/// Flat key=value settings. Lines are `key = value`; `[section]` headers only
/// group keys visually; `#` and `;` start comments. A key may appear once.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  /// Applies a `key=value` override; later overrides win.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Defaults for `experiment` overlaid with `given`. Unknown keys and an
/// `experiment` entry that disagrees are ConfigErrors.
class EffectiveConfig {
 public:
  EffectiveConfig(const std::string& experiment, const Config& given);

  const std::string& experiment() const { return experiment_; }
  /// Keys in schema order.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  /// `key=value` lines in schema order, each terminated by '\n'.
  std::string canonical_text() const;

  std::string str(const std::string& key) const;
  int integer(const std::string& key) const;
  double real(const std::string& key) const;
  std::uint64_t unsigned64(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;

 private:
  std::string experiment_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Git blob id (SHA-1 of "blob <size>\0" + text) as 40 hex digits.
std::string content_hash(const std::string& text);

struct RunSummary {
  std::vector<std::string> files;     ///< main CSV first
  std::vector<std::string> warnings;  ///< also echoed in the CSV header
  std::size_t rows = 0;
};

/// Runs the experiment and writes `out_path` plus any companion files.
RunSummary run_experiment(const EffectiveConfig& config, const std::string& out_path);

/// The version string embedded in CSV headers.
std::string tool_version();

}  // namespace dfsaqc
