// Shared text-file plumbing: shortest round-trip float formatting,
// locale-independent parsing, and atomic whole-file writes.
#pragma once

#include <string>
#include <string_view>

namespace kqr {

// Shortest decimal string that parses back to the identical double
// ("0.1", "1e+300", "inf", "nan").
std::string format_double(double value);

// Strict parse of a full token; accepts "inf"/"-inf"/"nan". Throws
// std::runtime_error mentioning `what` when the token is not a number.
double parse_double(std::string_view token, std::string_view what);

long long parse_int(std::string_view token, std::string_view what);

// Reads a whole file; throws std::runtime_error when unreadable.
std::string read_text_file(const std::string& path);

// Writes content to a sibling temporary file, then renames it over `path`,
// so readers never observe a torn file. Throws on any I/O failure.
void atomic_write_file(const std::string& path, std::string_view content);

}  // namespace kqr
