#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fockgabor::cli {

namespace {

const char* const kColumns[] = {"suite", "check_id", "paper_anchor", "value_re", "value_im", "tolerance", "status"};

bool finite(std::complex<double> v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ReportError("csv: unterminated quote");
  return fields;
}

std::string json_number(double v) {
  const std::string s = format_number(v);
  return std::isfinite(v) ? s : "\"" + s + "\"";
}

double json_to_number(const nlohmann::json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ReportError("json: expected a number");
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::info:
      return "info";
  }
  return "info";
}

Status parse_status(const std::string& text) {
  if (text == "pass") return Status::pass;
  if (text == "fail") return Status::fail;
  if (text == "info") return Status::info;
  throw ReportError("unknown status '" + text + "'");
}

const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw ReportError("unknown format '" + text + "' (expected csv or json)");
}

bool ReportRow::operator==(const ReportRow& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return suite == o.suite && check_id == o.check_id && paper_anchor == o.paper_anchor &&
         same(value.real(), o.value.real()) && same(value.imag(), o.value.imag()) && same(tolerance, o.tolerance) &&
         status == o.status;
}

ReportRow bound_row(std::string suite, std::string id, std::string anchor, std::complex<double> value,
                    double tolerance) {
  const bool ok = finite(value) && std::abs(value) <= tolerance;
  return rule_row(std::move(suite), std::move(id), std::move(anchor), value, tolerance, ok);
}

ReportRow at_least_row(std::string suite, std::string id, std::string anchor, double value, double tolerance) {
  const bool ok = std::isfinite(value) && value >= tolerance;
  return rule_row(std::move(suite), std::move(id), std::move(anchor), value, tolerance, ok);
}

ReportRow rule_row(std::string suite, std::string id, std::string anchor, std::complex<double> value, double tolerance,
                   bool ok) {
  ok = ok && finite(value);
  return {std::move(suite), std::move(id), std::move(anchor), value, tolerance, ok ? Status::pass : Status::fail};
}

ReportRow info_row(std::string suite, std::string id, std::string anchor, std::complex<double> value) {
  return {std::move(suite), std::move(id), std::move(anchor), value, 0.0, Status::info};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ReportError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ReportError("not a number: '" + text + "'");
  return v;
}

std::string render_report(const std::vector<ReportRow>& rows, Format format) {
  std::ostringstream os;
  if (format == Format::csv) {
    for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "," : "") << kColumns[i];
    os << "\n";
    for (const ReportRow& r : rows) {
      os << csv_field(r.suite) << "," << csv_field(r.check_id) << "," << csv_field(r.paper_anchor) << ","
         << format_number(r.value.real()) << "," << format_number(r.value.imag()) << ","
         << format_number(r.tolerance) << "," << to_string(r.status) << "\n";
    }
    return os.str();
  }
  os << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReportRow& r = rows[i];
    os << "  {\"suite\": " << nlohmann::json(r.suite).dump() << ", \"check_id\": " << nlohmann::json(r.check_id).dump()
       << ", \"paper_anchor\": " << nlohmann::json(r.paper_anchor).dump()
       << ", \"value_re\": " << json_number(r.value.real()) << ", \"value_im\": " << json_number(r.value.imag())
       << ", \"tolerance\": " << json_number(r.tolerance) << ", \"status\": \"" << to_string(r.status) << "\"}"
       << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "]\n";
  return os.str();
}

std::vector<ReportRow> parse_report(const std::string& text, Format format) {
  std::vector<ReportRow> rows;
  if (format == Format::csv) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ReportError("csv: missing header");
    const std::vector<std::string> header = csv_split(line);
    if (header.size() != std::size(kColumns)) throw ReportError("csv: bad header");
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] != kColumns[i]) throw ReportError("csv: bad header column '" + header[i] + "'");
    }
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> f = csv_split(line);
      if (f.size() != std::size(kColumns)) throw ReportError("csv: wrong field count in '" + line + "'");
      rows.push_back({f[0], f[1], f[2], {parse_number(f[3]), parse_number(f[4])}, parse_number(f[5]),
                      parse_status(f[6])});
    }
    return rows;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("json: ") + e.what());
  }
  if (!doc.is_array()) throw ReportError("json: expected an array of rows");
  for (const nlohmann::json& r : doc) {
    try {
      rows.push_back({r.at("suite").get<std::string>(), r.at("check_id").get<std::string>(),
                      r.at("paper_anchor").get<std::string>(),
                      {json_to_number(r.at("value_re")), json_to_number(r.at("value_im"))},
                      json_to_number(r.at("tolerance")), parse_status(r.at("status").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw ReportError(std::string("json: ") + e.what());
    }
  }
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, Format format, const std::filesystem::path& path) {
  if (rows.empty()) throw ReportError("no rows to write to " + path.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open " + path.string() + " for writing");
  out << render_report(rows, format);
  out.flush();
  if (!out) throw ReportError("write failed for " + path.string());
}

}  // namespace fockgabor::cli
