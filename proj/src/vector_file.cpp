#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "hkge/embedding.hpp"
#include "hkge/io.hpp"

namespace hkge {

namespace {

// Space-separated tokens; tolerates runs of spaces and a trailing space.
std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Eigen::Index> VectorFile::find(std::string_view id) const {
  if (index_.size() != ids.size()) {
    index_.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], static_cast<Eigen::Index>(i));
  }
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VectorFile read_vector_file(const std::filesystem::path& path) {
  io::LineReader in(path);
  std::string line;
  if (!in.next(line)) throw ParseError(path.string(), in.line_no(), "missing `count dim` header");
  auto header = tokens(line);
  std::size_t count = 0;
  long dim = 0;
  if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) ||
      dim <= 0) {
    in.fail("malformed `count dim` header");
  }

  VectorFile file;
  file.ids.reserve(count);
  file.values.resize(static_cast<Eigen::Index>(count), dim);
  std::size_t row = 0;
  while (in.next(line)) {
    if (row == count) in.fail("more rows than the header count " + std::to_string(count));
    auto f = tokens(line);
    if (f.size() != static_cast<std::size_t>(dim) + 1) {
      in.fail("expected id and " + std::to_string(dim) + " values, got " +
              std::to_string(f.empty() ? 0 : f.size() - 1));
    }
    file.ids.emplace_back(f[0]);
    for (long j = 0; j < dim; ++j) {
      double v = 0.0;
      if (!parse_number(f[static_cast<std::size_t>(j) + 1], v)) {
        in.fail("bad number '" + std::string(f[static_cast<std::size_t>(j) + 1]) + "'");
      }
      file.values(static_cast<Eigen::Index>(row), j) = v;
    }
    ++row;
  }
  if (row != count) {
    throw ParseError(path.string() + ": header declares " + std::to_string(count) +
                     " rows but body has " + std::to_string(row));
  }
  return file;
}

void write_vector_file(const VectorFile& file, const std::filesystem::path& path,
                       const std::vector<std::string>& comment) {
  if (file.ids.size() != static_cast<std::size_t>(file.values.rows())) {
    throw DataError("vector file ids and rows disagree");
  }
  if (!file.values.allFinite()) throw DataError("refusing to write non-finite values to " + path.string());
  for (const auto& id : file.ids) {
    if (id.empty() || id.find_first_of(" \t\n\r") != std::string::npos || id.front() == '#') {
      throw DataError("row id '" + id + "' cannot be written to a vector file");
    }
  }

  auto out = io::open_out(path);
  for (const auto& c : comment) out << "# " << c << '\n';
  out << file.ids.size() << ' ' << file.values.cols() << '\n';
  char buf[64];
  std::string line;
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    line = file.ids[i];
    for (Eigen::Index j = 0; j < file.values.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, file.values(static_cast<Eigen::Index>(i), j));
      line.push_back(' ');
      line.append(buf, ptr);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace hkge
