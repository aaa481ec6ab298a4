// Copyright 2026 The gxe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace gxe::csv {

/// One parsed row plus its 1-based line number in the source.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column position of `name`; throws ParseError naming `source` if absent.
  std::size_t column(std::string_view name, std::string_view source) const;
};

/// Splits one line on commas. Double-quoted fields may contain commas and
/// `""` escapes. Surrounding whitespace is not trimmed.
std::vector<std::string> split_line(std::string_view line);

/// Reads a header line plus data rows. Blank lines are skipped, trailing
/// `\r` is removed, and every row must have the header's field count.
Table read(std::istream& in, std::string_view source);
Table read_file(const std::filesystem::path& path);

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

/// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

}  // namespace gxe::csv
