#include "runner.hpp"

#include <fstream>
#include <sstream>

#include "suites.hpp"

namespace fockgabor::cli {

namespace {

struct Counts {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t info = 0;
};

Counts count(const std::vector<ReportRow>& rows) {
  Counts c;
  for (const ReportRow& r : rows) {
    if (r.status == Status::pass) ++c.pass;
    if (r.status == Status::fail) ++c.fail;
    if (r.status == Status::info) ++c.info;
  }
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ReportError("write failed for " + path.string());
}

}  // namespace

int exit_status(const std::vector<ReportRow>& rows) { return count(rows).fail ? kExitFailRows : kExitOk; }

int run(const RunConfig& config, std::ostream& log, const std::optional<std::filesystem::path>& timings_path) {
  const std::vector<Command> suites = expand_commands(config.commands);
  if (suites.empty()) {
    log << "error: no suite selected\n";
    return kExitError;
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec || !std::filesystem::is_directory(config.output_dir)) {
    log << "error: cannot create output directory " << config.output_dir.string() << "\n";
    return kExitError;
  }

  std::ostringstream summary;
  std::ostringstream timings;
  summary << "config\n";
  for (const auto& [key, value] : config.echo()) summary << "  " << key << " = " << value << "\n";
  summary << "  format = " << to_string(config.format) << "\n";
  summary << "suites\n";
  timings << "{\n";
  std::vector<ReportRow> all_rows;
  try {
    for (std::size_t s = 0; s < suites.size(); ++s) {
      const std::string name = to_string(suites[s]);
      if (!config.quiet) log << name << " ..." << std::endl;
      const std::vector<Panel> panels = run_suite(suites[s], config);
      std::vector<ReportRow> rows;
      timings << "  \"" << name << "\": {";
      for (std::size_t p = 0; p < panels.size(); ++p) {
        rows.insert(rows.end(), panels[p].rows.begin(), panels[p].rows.end());
        timings << (p ? ", " : "") << "\"" << panels[p].name << "\": " << format_number(panels[p].seconds);
        for (const std::string& e : panels[p].errors) log << "  " << name << ": " << e << "\n";
      }
      timings << "}" << (s + 1 < suites.size() ? "," : "") << "\n";
      const std::filesystem::path path = config.output_dir / (name + "." + to_string(config.format));
      emit_report(rows, config.format, path);
      const Counts c = count(rows);
      all_rows.insert(all_rows.end(), rows.begin(), rows.end());
      summary << "  " << name << ": rows=" << rows.size() << " pass=" << c.pass << " fail=" << c.fail
              << " info=" << c.info << " status=" << (c.fail ? "fail" : "pass") << "\n";
      if (!config.quiet) {
        log << name << ": " << rows.size() << " rows, " << c.fail << " failed -> " << path.string() << "\n";
        for (const ReportRow& r : rows) {
          if (r.status == Status::fail) log << "  FAIL " << r.check_id << " = " << format_number(std::abs(r.value)) << "\n";
        }
      }
    }
    summary << "status = " << (exit_status(all_rows) == kExitOk ? "pass" : "fail") << "\n";
    timings << "}\n";
    write_text(config.output_dir / "summary.txt", summary.str());
    if (timings_path) write_text(*timings_path, timings.str());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_status(all_rows);
}

}  // namespace fockgabor::cli
