#pragma once

#include <string>
#include <vector>

namespace mgc {

/// Shortest decimal representation that round-trips through from_chars.
/// All emitted CSVs and JSON numbers go through this so reruns are
/// byte-identical and parse/serialize is lossless.
std::string format_double(double value);

double parse_double(const std::string& text);
long parse_long(const std::string& text);

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

/// Reads all lines (LF or CRLF) from a file, dropping the trailing newline.
std::vector<std::string> read_lines(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

} // namespace mgc
