#include "kqr/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace kqr {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

namespace {

[[noreturn]] void bad_token(std::string_view token, std::string_view what,
                            const char* kind) {
  std::ostringstream msg;
  msg << "expected " << kind << " for " << what << ", got \"" << token << "\"";
  throw std::runtime_error(msg.str());
}

}  // namespace

double parse_double(std::string_view token, std::string_view what) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || token.empty()) {
    bad_token(token, what, "a number");
  }
  return value;
}

long long parse_int(std::string_view token, std::string_view what) {
  long long value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || token.empty()) {
    bad_token(token, what, "an integer");
  }
  return value;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open \"" + path + "\" for reading");
  }
  std::ostringstream content;
  content << in.rdbuf();
  if (in.bad()) {
    throw std::runtime_error("read failure on \"" + path + "\"");
  }
  return content.str();
}

void atomic_write_file(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open \"" + tmp.string() + "\" for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      throw std::runtime_error("write failure on \"" + tmp.string() + "\"");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw std::runtime_error("cannot move \"" + tmp.string() + "\" onto \"" +
                             target.string() + "\": " + ec.message());
  }
}

}  // namespace kqr
