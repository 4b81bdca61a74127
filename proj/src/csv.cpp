#include "stacc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace stacc::csv {

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_field(const Table& t, const Row& row, const std::string& msg)
{
  throw std::runtime_error(t.path.string() + ":" + std::to_string(row.line) + ": " + msg);
}

}  // namespace

std::vector<std::string> split(std::string_view line, char delim)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::size_t Table::column(std::string_view name) const
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::runtime_error(path.string() + ": missing column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

bool Table::has_column(std::string_view name) const
{
  return std::find(header.begin(), header.end(), name) != header.end();
}

const std::string& Table::field(const Row& row, std::size_t col) const
{
  if (col >= row.fields.size()) {
    bad_field(*this, row, "expected at least " + std::to_string(col + 1) + " fields");
  }
  return row.fields[col];
}

double Table::number(const Row& row, std::size_t col) const
{
  const std::string& s = field(row, col);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    bad_field(*this, row, "'" + s + "' is not a number");
  }
  return v;
}

long long Table::integer(const Row& row, std::size_t col) const
{
  const std::string& s = field(row, col);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    bad_field(*this, row, "'" + s + "' is not an integer");
  }
  return v;
}

Table read(const std::filesystem::path& path)
{
  Table t;
  t.path = path;
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    t.rows.push_back({split(line), line_no});
  }
  if (t.header.empty()) throw std::runtime_error(path.string() + ": empty file");
  return t;
}

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace stacc::csv
