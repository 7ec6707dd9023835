#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace fockgabor::cli;
  CLI::App app{"Fock-space Gabor system verification suites"};
  std::vector<std::string> commands;
  std::string config_path;
  std::string out_dir = "reports";
  std::string format = "csv";
  std::string timings;
  bool quiet = false;
  app.add_option("command", commands,
                 "verify-fock, verify-sigma, check-identities, build-counterexample, gram-defect or all");
  app.add_option("--config", config_path, "Key-value config file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format, "csv or json");
  app.add_option("--timings", timings, "Write panel timings (JSON) to this file");
  app.add_flag("--quiet", quiet, "Only report errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  RunConfig config;
  try {
    for (const std::string& c : commands) config.commands.push_back(parse_command(c));
    if (!config_path.empty()) apply_config_file(config, config_path);
    config.format = parse_format(format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  config.output_dir = out_dir;
  config.quiet = quiet;
  std::optional<std::filesystem::path> timings_path;
  if (!timings.empty()) timings_path = timings;
  return run(config, std::cerr, timings_path);
}
