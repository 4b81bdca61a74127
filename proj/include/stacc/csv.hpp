// Minimal delimited-text helpers shared by the file readers.
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace stacc::csv {

std::vector<std::string> split(std::string_view line, char delim = ',');

struct Row {
  std::vector<std::string> fields;
  int line = 0;
};

/// Comma-separated file with a header line. Blank lines and lines starting
/// with `#` are skipped.
struct Table {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Index of `name` in the header; throws naming the file when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  const std::string& field(const Row& row, std::size_t col) const;
  double number(const Row& row, std::size_t col) const;
  long long integer(const Row& row, std::size_t col) const;
};

Table read(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace stacc::csv
