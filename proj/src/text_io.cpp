#include "wkpi/text_io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "wkpi/error.hpp"

namespace wkpi {

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw FormatError("not a number: '" + std::string(token) + "'");
  }
  return x;
}

long long parse_integer(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw FormatError("not an integer: '" + std::string(token) + "'");
  }
  return x;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer,
                           bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw FormatError("write failed: " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wkpi
