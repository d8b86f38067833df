#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eqt {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Comma-separated writer with a fixed header.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  void row(std::initializer_list<double> values);
  void row(std::span<const double> values);
  /// Pre-formatted cells; cells holding a comma or quote are quoted.
  void row(const std::vector<std::string>& cells);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ostream& os_;
  std::vector<std::string> header_;
};

}  // namespace eqt
