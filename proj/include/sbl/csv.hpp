#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sbl {

// Minimal CSV support for the plain comma-separated, unquoted schemas this
// project reads and writes. All number formatting is locale-free so output
// files are byte-stable across runs and machines.

std::vector<std::string> split_csv_line(const std::string& line);

// Reads all lines; strips a trailing '\r' per line. Throws DataError when the
// file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

// Whole-file write; creates parent directories as needed.
void write_file(const std::string& path, const std::string& content);

// Strict numeric parsing: the whole token must be consumed.
// `context` names the row/column in error messages.
double parse_double(const std::string& token, const std::string& context);
std::int64_t parse_int(const std::string& token, const std::string& context);

// Fixed-point with `prec` decimals ("-0" is normalized to "0").
std::string fmt_fixed(double v, int prec);

// Shortest representation that parses back to the same double.
std::string fmt_shortest(double v);

// Day counts: integral values print without a decimal point ("7"), others use
// the shortest form ("2.5").
std::string fmt_days(double days);

}  // namespace sbl
