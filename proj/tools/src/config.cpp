#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fockgabor::cli {

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::verify_fock, "verify-fock"},
    {Command::verify_sigma, "verify-sigma"},
    {Command::check_identities, "check-identities"},
    {Command::build_counterexample, "build-counterexample"},
    {Command::gram_defect, "gram-defect"},
    {Command::all, "all"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out)) throw ConfigError("expected a finite number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  if (used != v.size() || out < -1000000 || out > 1000000) throw ConfigError("expected an integer, got '" + v + "'");
  return static_cast<int>(out);
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list of integers");
  return out;
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "all";
}

Command parse_command(const std::string& text) {
  for (const auto& [cmd, name] : kCommands) {
    if (text == name) return cmd;
  }
  throw ConfigError("unknown command '" + text + "'");
}

std::vector<Command> expand_commands(const std::vector<Command>& commands) {
  std::set<Command> wanted;
  for (Command c : commands) {
    if (c == Command::all) {
      for (const auto& [cmd, name] : kCommands) {
        if (cmd != Command::all) wanted.insert(cmd);
      }
    } else {
      wanted.insert(c);
    }
  }
  return {wanted.begin(), wanted.end()};
}

construction::ConstructionParams RunConfig::construction_params() const { return construction_params(q); }

construction::ConstructionParams RunConfig::construction_params(int q_override) const {
  construction::ConstructionParams p = construction::ConstructionParams::with_window(q_override, levels, quad_step);
  p.tol_root = tol_root;
  p.tol_solve = tol_solve;
  p.trunc = trunc;
  if (quad_radius && q_override == q) p.spec.truncation_radius = *quad_radius;
  return p;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::string sizes;
  for (std::size_t i = 0; i < section_sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(section_sizes[i]);
  return {
      {"q", std::to_string(q)},
      {"levels", std::to_string(levels)},
      {"tol_root", format_number(tol_root)},
      {"tol_solve", format_number(tol_solve)},
      {"quad_radius", format_number(construction_params().spec.truncation_radius)},
      {"quad_step", format_number(quad_step)},
      {"trunc", format_number(trunc)},
      {"section_sizes", sizes},
  };
}

void RunConfig::validate() const {
  auto fail = [this](const std::string& key, const std::string& message) {
    const auto it = key_lines.find(key);
    const std::string where = it == key_lines.end() ? "" : source + ":" + std::to_string(it->second) + ": ";
    throw ConfigError(where + key + ": " + message);
  };
  if (q < 4) fail("q", "must be >= 4");
  if (levels < 1 || levels > 8) fail("levels", "must lie in [1, 8]");
  if (!(tol_root > 0.0) || tol_root > 1e-3) fail("tol_root", "must lie in (0, 1e-3]");
  if (!(tol_solve > 0.0) || tol_solve > 1e-3) fail("tol_solve", "must lie in (0, 1e-3]");
  if (!(quad_step > 0.0) || quad_step > 0.25) fail("quad_step", "must lie in (0, 0.25]");
  if (trunc < 4.0 || trunc > 40.0) fail("trunc", "must lie in [4, 40]");
  const construction::ConstructionParams p = construction_params();
  if (p.spec.truncation_radius < p.required_radius()) {
    fail("quad_radius", "must be at least u_N + 2 sqrt(u_N) + 8 = " + format_number(p.required_radius()));
  }
  if (p.spec.truncation_radius > 400.0) fail("quad_radius", "must be <= 400");
  int previous = 0;
  for (int s : section_sizes) {
    if (s <= previous) fail("section_sizes", "must be positive and strictly increasing");
    previous = s;
  }
  if (previous > 64) fail("section_sizes", "largest section must be <= 64");
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& source) {
  std::istringstream is(text);
  std::string raw;
  std::set<std::string> seen;
  int line_no = 0;
  config.source = source;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    config.key_lines[key] = line_no;
    try {
      if (key == "q") {
        config.q = to_int(value);
      } else if (key == "levels") {
        config.levels = to_int(value);
      } else if (key == "tol_root") {
        config.tol_root = to_double(value);
      } else if (key == "tol_solve") {
        config.tol_solve = to_double(value);
      } else if (key == "quad_radius") {
        config.quad_radius = to_double(value);
      } else if (key == "quad_step") {
        config.quad_step = to_double(value);
      } else if (key == "trunc") {
        config.trunc = to_double(value);
      } else if (key == "section_sizes") {
        config.section_sizes = to_int_list(value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str(), path.string());
}

}  // namespace fockgabor::cli
