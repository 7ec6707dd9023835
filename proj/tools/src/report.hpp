#pragma once

#include <complex>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockgabor::cli {

enum class Status { pass, fail, info };
enum class Format { csv, json };

const char* to_string(Status s);
Status parse_status(const std::string& text);
const char* to_string(Format f);
Format parse_format(const std::string& text);

struct ReportRow {
  std::string suite;
  std::string check_id;
  std::string paper_anchor;
  std::complex<double> value{0.0, 0.0};
  double tolerance = 0.0;
  Status status = Status::info;

  bool operator==(const ReportRow&) const;
};

// Row constructors. Non-finite values always fail.
// |value| <= tolerance.
ReportRow bound_row(std::string suite, std::string id, std::string anchor, std::complex<double> value,
                    double tolerance);
// value >= tolerance (real part).
ReportRow at_least_row(std::string suite, std::string id, std::string anchor, double value, double tolerance);
// Status given by the caller, for rules that are not a plain bound.
ReportRow rule_row(std::string suite, std::string id, std::string anchor, std::complex<double> value, double tolerance,
                   bool ok);
ReportRow info_row(std::string suite, std::string id, std::string anchor, std::complex<double> value);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g; non-finite values as nan, inf, -inf.
std::string format_number(double v);
double parse_number(const std::string& text);

std::string render_report(const std::vector<ReportRow>& rows, Format format);
std::vector<ReportRow> parse_report(const std::string& text, Format format);

// Throws ReportError on empty rows or an unwritable path.
void emit_report(const std::vector<ReportRow>& rows, Format format, const std::filesystem::path& path);

}  // namespace fockgabor::cli
