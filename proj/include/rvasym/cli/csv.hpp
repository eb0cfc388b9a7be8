#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rvasym::cli {

// RFC 4180 quoting: fields containing a comma, quote, CR or LF are wrapped in quotes
// with inner quotes doubled.
std::string csv_quote(const std::string& field);

// Shortest round-trip text for a double; "nan", "inf", "-inf" for non-finite values.
std::string csv_number(double v);

// Writes "# config_hash=<hash> version=<v>", then the header, then rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::string& hash, std::vector<std::string> header);

  std::size_t columns() const { return n_; }
  // Throws std::invalid_argument if the row width differs from the header.
  void row(const std::vector<std::string>& fields);

 private:
  void line(const std::vector<std::string>& fields);

  std::ostream& os_;
  std::size_t n_;
};

// Splits one CSV record, undoing csv_quote. Used by tests and tooling.
std::vector<std::string> csv_split(const std::string& line);

}  // namespace rvasym::cli
