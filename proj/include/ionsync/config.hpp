#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionsync {

/// Bad user input: unknown key, malformed value, missing subcommand.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValueKind { number, integer, boolean, choice, names, angular, length, mass };

struct KeySpec {
  std::string key;   // canonical name used in config files and meta.json
  std::string flag;  // command-line spelling
  ValueKind kind;
  std::string help;
  std::vector<std::string> choices = {};  // for ValueKind::choice
};

const std::vector<std::string>& subcommands();
/// Accepted keys of a subcommand; throws ConfigError for unknown ones.
const std::vector<KeySpec>& accepted_keys(const std::string& subcommand);

struct RunConfig {
  std::string subcommand;
  /// Explicitly given keys with canonicalized values (numbers as %.17g).
  std::map<std::string, std::string> parameters;
  std::string output;
  std::string format = "csv";  // csv | json | both

  bool operator==(const RunConfig&) const = default;

  bool has(const std::string& key) const { return parameters.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> names(const std::string& key, const std::vector<std::string>& fallback) const;

  bool wants_csv() const { return format == "csv" || format == "both"; }
  bool wants_json() const { return format == "json" || format == "both"; }
};

/// Checks `value` against the key's kind and returns its canonical text.
std::string canonical_value(const KeySpec& spec, const std::string& value);

/// Contents of a config file: a flat JSON object of key -> value, or a
/// previously emitted meta.json whose "config" member is used.
struct FileConfig {
  std::optional<std::string> subcommand;
  std::map<std::string, std::string> parameters;
  std::optional<std::string> output;
  std::optional<std::string> format;
};

FileConfig load_config_file(const std::string& path);
FileConfig file_config_from_json(const nlohmann::json& j);

/// Merges file values and flag values (flags win), validates every key
/// against the subcommand and canonicalizes. `output` falls back to
/// $IONSYNC_OUTPUT, then "ionsync-out".
RunConfig make_config(const std::string& subcommand, const FileConfig& file,
                      const std::map<std::string, std::string>& flags, const std::optional<std::string>& output,
                      const std::optional<std::string>& format);

nlohmann::json to_json(const RunConfig& c);

/// Comma-separated list of accepted keys, for error messages.
std::string accepted_key_list(const std::string& subcommand);

}  // namespace ionsync
