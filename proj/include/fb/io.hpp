#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fb {

/// Shortest representation that round-trips a double (locale-independent, '.').
std::string format_double(double v);

/// One RFC-4180 record: comma-joined fields, CRLF terminator appended by the writer.
class CsvWriter {
 public:
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64(const std::string& s);
std::string hex64(uint64_t v);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fb
