#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fracac {

/// Writes through a sibling temporary file and renames it into place.
void atomic_write(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal for finite values, "nan" / "inf" / "-inf" otherwise.
std::string format_number(double v);
double parse_number(const std::string& s);

/// Minimal CSV: comma separated, no quoting needed for the tables written here
/// (text fields have commas replaced). Lines starting with '#' are comments.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
};
CsvTable parse_csv(const std::string& text);
std::string csv_escape(std::string s);

}  // namespace fracac
