#include "telegraph/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "telegraph/error.hpp"

namespace telegraph {

namespace {

using json = nlohmann::json;

[[noreturn]] void field_error(std::string_view source, const std::string& field,
                              const std::string& what) {
  throw Error(ErrorKind::ParseError, std::string(source) + ": field " + field + ": " + what);
}

// nlohmann reports a byte offset; editors want line and column.
std::string position_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

RealMatrix read_matrix(const json& root, const char* name, int n, std::string_view source) {
  if (!root.contains(name)) field_error(source, name, "missing");
  const json& rows = root.at(name);
  if (!rows.is_array()) field_error(source, name, "expected an array of rows");
  if (rows.size() != static_cast<std::size_t>(n)) {
    field_error(source, name,
                "expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()));
  }
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string row_name = std::string(name) + "[" + std::to_string(i) + "]";
    const json& row = rows[i];
    if (!row.is_array()) field_error(source, row_name, "expected an array of numbers");
    if (row.size() != static_cast<std::size_t>(n)) {
      field_error(source, row_name,
                  "expected " + std::to_string(n) + " entries, found " + std::to_string(row.size()));
    }
    for (int j = 0; j < n; ++j) {
      const json& entry = row[j];
      if (!entry.is_number()) {
        field_error(source, row_name + "[" + std::to_string(j) + "]", "expected a number");
      }
      m(i, j) = entry.get<double>();
    }
  }
  return m;
}

void write_matrix(std::ostringstream& os, const char* name, const RealMatrix& m, bool last) {
  os << "  \"" << name << "\": [";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i == 0 ? "[" : ",\n        [");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ", ";
      os << round_trip(m(i, j));
    }
    os << "]";
  }
  os << "]" << (last ? "\n" : ",\n");
}

}  // namespace

std::string round_trip(double value) {
  // "-0" would come back as the integer 0 and lose its sign.
  if (value == 0.0 && std::signbit(value)) return "-0.0";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

LineConstants parse_config(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError,
                std::string(source) + ":" + position_of(text, e.byte) + ": malformed JSON");
  }
  if (!root.is_object()) {
    throw Error(ErrorKind::ParseError, std::string(source) + ": expected a JSON object");
  }
  for (const auto& item : root.items()) {
    static const char* const known[] = {"n", "units", "L", "C", "R", "G"};
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      field_error(source, item.key(), "unknown field");
    }
  }
  if (!root.contains("n")) field_error(source, "n", "missing");
  const json& n_field = root.at("n");
  if (!n_field.is_number_integer() || n_field.get<long long>() < 1 ||
      n_field.get<long long>() > 4096) {
    field_error(source, "n", "expected a positive integer");
  }
  const int n = n_field.get<int>();
  if (root.contains("units")) {
    const json& units = root.at("units");
    if (!units.is_string() || units.get<std::string>() != kConfigUnits) {
      field_error(source, "units", "only \"" + std::string(kConfigUnits) + "\" is supported");
    }
  }
  LineMatrices m;
  m.L = read_matrix(root, "L", n, source);
  m.C = read_matrix(root, "C", n, source);
  m.R = read_matrix(root, "R", n, source);
  m.G = read_matrix(root, "G", n, source);
  return LineConstants::from(m);
}

LineConstants load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IOError, "cannot read config " + path);
  return parse_config(buffer.str(), path);
}

std::string emit_config(const LineConstants& line) {
  std::ostringstream os;
  os << "{\n  \"n\": " << line.n() << ",\n  \"units\": \"" << kConfigUnits << "\",\n";
  write_matrix(os, "L", line.L(), false);
  write_matrix(os, "C", line.C(), false);
  write_matrix(os, "R", line.R(), false);
  write_matrix(os, "G", line.G(), true);
  os << "}\n";
  return os.str();
}

}  // namespace telegraph
