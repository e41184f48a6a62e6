#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "hkge/error.hpp"

namespace hkge::io {

/// Splits on a single delimiter without collapsing empty fields.
inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Line reader for the TSV inputs: strips a trailing CR, skips blank and
/// `#` comment lines, and tracks the 1-based line number.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw ConfigError("cannot open " + path.string());
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  }

  std::size_t line_no() const noexcept { return line_no_; }
  std::string where() const { return path_.string(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(where(), line_no_, what); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace hkge::io
