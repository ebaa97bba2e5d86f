#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace opgrowth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

// Resolved settings: defaults, then a key=value config file, then command-line flags.
struct ExperimentConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
};

const std::vector<std::string>& known_keys();
ExperimentConfig default_config(const std::string& subcommand);
// Parses "key = value" lines ('#' starts a comment); unknown keys throw ConfigError.
std::map<std::string, std::string> parse_config_text(const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

// Writes through a temporary sibling file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// One CSV row per grid point; columns listed in the leading comment block.
std::string sweep_csv(const ExperimentConfig& cfg);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace opgrowth::cli
