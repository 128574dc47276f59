#include <cstdio>
#include <fstream>

#include "disdrift/cli.hpp"

namespace disdrift {

std::string CsvWriter::format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += quote(fields[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::numeric_row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format(v));
  row(fields);
}

void CsvWriter::comment(const std::string& text) {
  buffer_ += "# ";
  buffer_ += text;
  buffer_ += '\n';
}

void CsvWriter::flush() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path_ + "'");
  out << buffer_;
  out.close();
  if (!out) throw ConfigError("cannot write output file '" + path_ + "'");
}

void write_gnuplot_script(const std::string& csv_path, const std::string& script) {
  const std::string path = csv_path + ".gp";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << script;
  out.close();
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
}

}  // namespace disdrift
