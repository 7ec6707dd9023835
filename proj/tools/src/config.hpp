#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fockgabor/counterexample.hpp"
#include "report.hpp"

namespace fockgabor::cli {

enum class Command { verify_fock, verify_sigma, check_identities, build_counterexample, gram_defect, all };

const char* to_string(Command c);
Command parse_command(const std::string& text);
// The suites a command list expands to, in canonical order, without repeats.
std::vector<Command> expand_commands(const std::vector<Command>& commands);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<Command> commands;
  int q = 8;
  int levels = 3;
  double tol_root = 1e-10;
  double tol_solve = 1e-8;
  // Unset: the smallest integer window covering the construction.
  std::optional<double> quad_radius;
  double quad_step = 0.05;
  double trunc = 12.0;
  std::vector<int> section_sizes{8, 12, 16};
  std::filesystem::path output_dir{"reports"};
  Format format = Format::csv;
  bool quiet = false;
  // Where each key was set, for line-anchored validation errors.
  std::string source;
  std::map<std::string, int> key_lines;

  construction::ConstructionParams construction_params() const;
  // Parameters with q replaced, window recomputed unless quad_radius is set.
  construction::ConstructionParams construction_params(int q_override) const;
  // Every parameter as "key = value", defaults included.
  std::vector<std::pair<std::string, std::string>> echo() const;
  // Throws ConfigError when a value violates a module precondition.
  void validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Unknown or repeated keys
// and malformed values raise ConfigError("<source>:<line>: ...").
void apply_config_text(RunConfig& config, const std::string& text, const std::string& source);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace fockgabor::cli
