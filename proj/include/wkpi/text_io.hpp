#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wkpi {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// Parses a full token as a double; throws FormatError otherwise.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

/// Splits on `sep` without trimming.
std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

/// Writes through `writer` into a temporary sibling of `path` and renames it
/// into place only when the writer returns normally.
void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer,
                           bool binary = false);

}  // namespace wkpi
