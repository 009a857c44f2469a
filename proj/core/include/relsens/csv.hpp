#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace relsens {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Builds CSV text in memory; fields containing separators are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double v);
  CsvWriter& end_row();
  const std::string& str() const noexcept { return out_; }

 private:
  std::string out_;
  bool row_start_ = true;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace relsens
