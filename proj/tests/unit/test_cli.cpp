#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "doctest.h"
#include "report.hpp"
#include "runner.hpp"

using namespace fockgabor::cli;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fockgabor_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const std::string& text) {
  RunConfig c;
  try {
    apply_config_text(c, text, "run.cfg");
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<ReportRow> sample_rows() {
  return {
      bound_row("s", "a", "anchor one", {-std::exp(-M_PI), 0.0}, 1.0),
      bound_row("s", "b", "has, comma \"quoted\"", {1e-300, -2.5}, 1e-6),
      info_row("s", "c", "x", {std::nan(""), 0.0}),
      at_least_row("s", "d", "x", 0.25, 0.5),
      rule_row("s", "e", "x", {std::numeric_limits<double>::infinity(), 0.0}, 0.0, true),
      info_row("s", "f", "x", {0.1, 1.0 / 3.0}),
  };
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("row statuses") {
    const std::vector<ReportRow> rows = sample_rows();
    CHECK(rows[0].status == Status::pass);
    CHECK(rows[1].status == Status::fail);
    CHECK(rows[2].status == Status::info);
    CHECK(rows[3].status == Status::fail);
    CHECK(rows[4].status == Status::fail);
    CHECK(rows[5].status == Status::info);
    CHECK(at_least_row("s", "g", "x", 0.5, 0.5).status == Status::pass);
  }

  TEST_CASE("number rendering") {
    CHECK(format_number(-std::exp(-M_PI)) == "-0.043213918263772258");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(parse_number(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  }

  TEST_CASE("one row gives a header and one line") {
    const std::vector<ReportRow> rows{bound_row("verify-fock", "kernel_eval", "k", {-std::exp(-M_PI), 0.0}, 1e-15)};
    const std::string csv = render_report(rows, Format::csv);
    CHECK(csv ==
          "suite,check_id,paper_anchor,value_re,value_im,tolerance,status\n"
          "verify-fock,kernel_eval,k,-0.043213918263772258,0,1.0000000000000001e-15,fail\n");
  }

  TEST_CASE("csv and json round trips") {
    const std::vector<ReportRow> rows = sample_rows();
    for (Format f : {Format::csv, Format::json}) {
      const std::vector<ReportRow> back = parse_report(render_report(rows, f), f);
      REQUIRE(back.size() == rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].suite == rows[i].suite);
        CHECK(back[i].check_id == rows[i].check_id);
        CHECK(back[i].paper_anchor == rows[i].paper_anchor);
        CHECK(back[i].status == rows[i].status);
        CHECK(back[i].tolerance == rows[i].tolerance);
        if (std::isfinite(rows[i].value.real())) {
          CHECK(back[i].value == rows[i].value);
        } else {
          CHECK(format_number(back[i].value.real()) == format_number(rows[i].value.real()));
        }
      }
    }
    const std::vector<ReportRow> csv_rows = parse_report(render_report(rows, Format::csv), Format::csv);
    const std::vector<ReportRow> json_rows = parse_report(render_report(rows, Format::json), Format::json);
    CHECK(render_report(csv_rows, Format::csv) == render_report(json_rows, Format::csv));
  }

  TEST_CASE("emit_report errors") {
    const fs::path dir = scratch_dir("emit");
    fs::create_directories(dir);
    CHECK_THROWS_AS(emit_report({}, Format::csv, dir / "x.csv"), ReportError);
    CHECK_THROWS_AS(emit_report(sample_rows(), Format::csv, dir / "missing" / "x.csv"), ReportError);
    emit_report(sample_rows(), Format::json, dir / "x.json");
    CHECK(parse_report(read_file(dir / "x.json"), Format::json).size() == sample_rows().size());
    fs::remove_all(dir);
  }

  TEST_CASE("config parsing") {
    RunConfig c;
    apply_config_text(c, "# comment\nq = 16  # trailing\nsection_sizes = 4, 8\nquad_step=0.1\n", "a.cfg");
    CHECK(c.q == 16);
    CHECK(c.section_sizes == std::vector<int>{4, 8});
    CHECK(c.quad_step == 0.1);
    c.validate();
    CHECK(c.construction_params().spec.truncation_radius == std::ceil(c.construction_params().required_radius()));
    bool echoed = false;
    for (const auto& [k, v] : c.echo()) echoed = echoed || (k == "q" && v == "16");
    CHECK(echoed);
  }

  TEST_CASE("config errors are line anchored") {
    CHECK(config_error("q = 8\nwidth = 3\n") == "run.cfg:2: unknown key 'width'");
    CHECK(config_error("q = 8\n\nq = 9\n") == "run.cfg:3: duplicate key 'q'");
    CHECK(config_error("q = eight\n") == "run.cfg:1: expected an integer, got 'eight'");
    CHECK(config_error("levels\n") == "run.cfg:1: expected 'key = value'");
    CHECK(config_error("trunc = 12\nq = 2\n") == "run.cfg:2: q: must be >= 4");
    CHECK(config_error("quad_radius = 30\n").rfind("run.cfg:1: quad_radius:", 0) == 0);
    CHECK(config_error("section_sizes = 8, 8\n").rfind("run.cfg:1: section_sizes:", 0) == 0);
    CHECK(config_error("").empty());
  }

  TEST_CASE("commands") {
    CHECK(parse_command("gram-defect") == Command::gram_defect);
    CHECK_THROWS_AS(parse_command("everything"), ConfigError);
    CHECK(expand_commands({Command::all}).size() == 5);
    const std::vector<Command> dup = expand_commands({Command::gram_defect, Command::verify_sigma, Command::gram_defect});
    CHECK(dup == std::vector<Command>{Command::verify_sigma, Command::gram_defect});
  }

  TEST_CASE("exit status depends only on row statuses") {
    CHECK(exit_status({info_row("s", "a", "x", 1.0)}) == kExitOk);
    CHECK(exit_status({bound_row("s", "a", "x", 0.5, 1.0), info_row("s", "b", "x", 1.0)}) == kExitOk);
    CHECK(exit_status(sample_rows()) == kExitFailRows);
  }

  TEST_CASE("no suite selected") {
    RunConfig c;
    std::ostringstream log;
    CHECK(run(c, log) == kExitError);
    CHECK(log.str().find("no suite selected") != std::string::npos);
  }

  TEST_CASE("invalid configuration stops before running") {
    RunConfig c;
    c.commands = {Command::verify_sigma};
    c.q = 2;
    c.output_dir = scratch_dir("invalid");
    std::ostringstream log;
    CHECK(run(c, log) == kExitError);
    CHECK(!fs::exists(c.output_dir / "verify-sigma.csv"));
  }

  TEST_CASE("unwritable output directory") {
    const fs::path base = scratch_dir("blocked");
    fs::create_directories(base);
    std::ofstream(base / "file") << "x";
    RunConfig c;
    c.commands = {Command::verify_sigma};
    c.output_dir = base / "file" / "out";
    std::ostringstream log;
    CHECK(run(c, log) == kExitError);
    fs::remove_all(base);
  }

  TEST_CASE("sigma suite run is deterministic") {
    const fs::path a = scratch_dir("run_a");
    const fs::path b = scratch_dir("run_b");
    RunConfig c;
    c.commands = {Command::verify_sigma};
    c.quiet = true;
    std::ostringstream log;
    c.output_dir = a;
    CHECK(run(c, log, a / "timings.json") == kExitOk);
    c.output_dir = b;
    CHECK(run(c, log) == kExitOk);
    CHECK(read_file(a / "verify-sigma.csv") == read_file(b / "verify-sigma.csv"));
    CHECK(read_file(a / "summary.txt") == read_file(b / "summary.txt"));
    CHECK(read_file(a / "summary.txt").find("status = pass") != std::string::npos);
    const std::vector<ReportRow> rows = parse_report(read_file(a / "verify-sigma.csv"), Format::csv);
    CHECK(rows.size() >= 10);
    for (const ReportRow& r : rows) CHECK(r.suite == "verify-sigma");
    CHECK(read_file(a / "timings.json").find("\"sigma\"") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
  }
}
