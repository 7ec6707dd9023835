#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "fockgabor/fock.hpp"
#include "report.hpp"

namespace fockgabor::cli {

// A timed group of rows. Acceptance criteria map onto panels.
struct Panel {
  std::string name;
  std::vector<ReportRow> rows;
  double seconds = 0.0;
  // Messages of checks that threw; each also produced a fail row.
  std::vector<std::string> errors;
};

// The functions the inner-product checks run over.
std::vector<std::pair<std::string, fock::FockFunction>> function_corpus();

std::vector<Panel> run_suite(Command command, const RunConfig& config);

}  // namespace fockgabor::cli
