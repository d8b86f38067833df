#include "eqt/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "eqt/error.hpp"

namespace eqt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) os_ << (i ? "," : "") << header_[i];
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != header_.size()) throw Error("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw Error("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      os_ << c;
      continue;
    }
    os_ << '"';
    for (char ch : c) os_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    os_ << '"';
  }
  os_ << '\n';
}

}  // namespace eqt
