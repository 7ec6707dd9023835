#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "config.hpp"

namespace fockgabor::cli {

enum ExitCode { kExitOk = 0, kExitFailRows = 1, kExitError = 2 };

// kExitFailRows when any row failed, kExitOk otherwise.
int exit_status(const std::vector<ReportRow>& rows);

// Runs the selected suites, writes <out>/<suite>.<format> per suite and
// <out>/summary.txt, and returns the exit status. Panel timings go to
// timings_path when given; they are kept out of the reports so that
// identical configs give identical files.
int run(const RunConfig& config, std::ostream& log, const std::optional<std::filesystem::path>& timings_path = {});

}  // namespace fockgabor::cli
