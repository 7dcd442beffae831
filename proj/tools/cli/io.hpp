#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace modrabi::cli {

/// Shortest decimal that round-trips to the same double ("nan", "inf" for
/// non-finite values).
std::string format_double(double value);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view text);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& fields);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace modrabi::cli
