#include "wdecor/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>

#include "wdecor/error.hpp"

namespace wdecor {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

const std::vector<std::string>& trials_columns() {
  static const std::vector<std::string> columns{
      "trial", "seed",  "estimator", "target_label", "estimate", "stderr",     "method", "level",
      "side",  "lower", "upper",     "covered",      "width",    "lambda_min", "arm_counts"};
  return columns;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> columns{
      "estimator", "method",    "target_label", "level", "side",     "coverage",
      "n_trials",  "mean_width", "sd_width",    "bias",  "kurtosis", "ks_stat"};
  return columns;
}

namespace {

std::string field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << field(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(current));
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no, const std::string& column) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ", column " +
                                                column + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(const std::string& text, std::size_t line_no, const std::string& column) {
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || text[0] == '-' || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ", column " +
                                                column + ": expected an integer, got '" + text + "'");
  }
  return value;
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows) {
  write_line(out, trials_columns());
  for (const TrialRow& r : rows) {
    write_line(out, {std::to_string(r.trial), std::to_string(r.seed), r.estimator, r.target_label,
                     format_double(r.estimate), format_double(r.std_error), r.method,
                     format_double(r.level), r.side, format_double(r.lower), format_double(r.upper),
                     r.covered ? "1" : "0", format_double(r.width), format_double(r.lambda_min),
                     r.arm_counts});
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  write_line(out, summary_columns());
  for (const SummaryRow& r : rows) {
    write_line(out, {r.estimator, r.method, r.target_label, format_double(r.level), r.side,
                     format_double(r.coverage), std::to_string(r.n_trials),
                     format_double(r.mean_width), format_double(r.sd_width), format_double(r.bias),
                     format_double(r.kurtosis), format_double(r.ks_stat)});
  }
}

std::vector<TrialRow> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "trials.csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, 1);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  for (const auto& name : trials_columns()) {
    if (name != "arm_counts" && !index.count(name)) {
      throw Error(ErrorCode::InvalidArgument, "trials.csv is missing column '" + name + "'");
    }
  }

  std::vector<TrialRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line, line_no);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(fields.size()));
    }
    const auto text = [&](const char* name) -> const std::string& { return fields[index.at(name)]; };
    const auto number = [&](const char* name) { return parse_double(text(name), line_no, name); };
    TrialRow r;
    r.trial = parse_unsigned(text("trial"), line_no, "trial");
    r.seed = parse_unsigned(text("seed"), line_no, "seed");
    r.estimator = text("estimator");
    r.target_label = text("target_label");
    r.estimate = number("estimate");
    r.std_error = number("stderr");
    r.method = text("method");
    r.level = number("level");
    r.side = text("side");
    r.lower = number("lower");
    r.upper = number("upper");
    r.covered = parse_unsigned(text("covered"), line_no, "covered") != 0;
    r.width = number("width");
    r.lambda_min = number("lambda_min");
    if (index.count("arm_counts")) r.arm_counts = text("arm_counts");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace wdecor
